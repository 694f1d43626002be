import json
import os

import pytest

from stegosonic.cli import main
from stegosonic.riff_wav import build_wav
from stegosonic.synth import random_mp3, random_wav
from stegosonic.transfer import ListenConfig, ReceiveDaemon, auto_accept

from helpers import PASSWORD


@pytest.fixture(autouse=True)
def pw_env(monkeypatch):
    monkeypatch.setenv("STEGOSONIC_PASSWORD", PASSWORD)


@pytest.fixture
def carrier(tmp_path):
    p = tmp_path / "carrier.wav"
    p.write_bytes(random_wav(60000, rng=41))
    return p


@pytest.fixture
def mp3(tmp_path):
    p = tmp_path / "song.mp3"
    p.write_bytes(random_mp3(600, id3=True, rng=42))
    return p


def fake_pdf(n=3000):
    return b"%PDF-1.4\n" + os.urandom(n) + b"\n%%EOF\n"


DOCS = {
    "memo.txt": "Quarterly numbers attached.\r\nDo not forward. éè中\n".encode("utf-8"),
    "report.doc": b"\xd0\xcf\x11\xe0\xa1\xb1\x1a\xe1" + os.urandom(2500),
    "scan.pdf": fake_pdf(),
}


@pytest.mark.parametrize("method", ["lsb", "inject"])
@pytest.mark.parametrize("name", sorted(DOCS))
@pytest.mark.parametrize("compress", ["off", "medium"])
def test_document_round_trip(tmp_path, carrier, method, name, compress, capsys):
    doc = tmp_path / name
    doc.write_bytes(DOCS[name])
    enc = tmp_path / "enc.wav"
    out = tmp_path / ("out_" + name)
    assert main(["encode", "--method", method, "--in", str(carrier), "--payload", str(doc),
                 "--out", str(enc), "--compress", compress]) == 0
    printed = capsys.readouterr().out
    assert "max sealed payload" in printed and "written" in printed
    assert main(["decode", "--method", method, "--in", str(enc), "--out", str(out)]) == 0
    assert out.read_bytes() == DOCS[name]


def test_mp3_text_file_round_trip(tmp_path, mp3):
    doc = tmp_path / "memo.txt"
    doc.write_bytes(DOCS["memo.txt"])
    enc, out = tmp_path / "enc.mp3", tmp_path / "out.txt"
    assert main(["encode", "--method", "mp3", "--in", str(mp3), "--payload", str(doc),
                 "--out", str(enc), "--skip", "1"]) == 0
    assert main(["decode", "--method", "mp3", "--in", str(enc), "--out", str(out), "--skip", "1"]) == 0
    assert out.read_bytes() == DOCS["memo.txt"]
    assert enc.stat().st_size == mp3.stat().st_size


def test_mp3_refuses_pdf(tmp_path, mp3, capsys):
    doc = tmp_path / "scan.pdf"
    doc.write_bytes(fake_pdf(100))
    enc = tmp_path / "enc.mp3"
    assert main(["encode", "--method", "mp3", "--in", str(mp3), "--payload", str(doc),
                 "--out", str(enc)]) == 2
    assert "NotTextPayload" in capsys.readouterr().err
    assert not enc.exists()


@pytest.mark.parametrize("method", ["lsb", "inject", "mp3"])
@pytest.mark.parametrize("text", ["hello", "", "\U0001f600 zürich 日本 \x00 end"])
def test_text_message_round_trip(tmp_path, carrier, mp3, method, text, capsys):
    src = mp3 if method == "mp3" else carrier
    enc = tmp_path / "enc.bin"
    assert main(["encode", "--method", method, "--in", str(src), "--text", text, "--out", str(enc)]) == 0
    capsys.readouterr()
    assert main(["decode", "--method", method, "--in", str(enc), "--out", "-"]) == 0
    out = capsys.readouterr().out
    assert out.endswith(text + "\n")


def test_wrong_password(tmp_path, carrier, monkeypatch, capsys):
    enc, out = tmp_path / "enc.wav", tmp_path / "out.pdf"
    doc = tmp_path / "scan.pdf"
    doc.write_bytes(fake_pdf())
    assert main(["encode", "--method", "lsb", "--in", str(carrier), "--payload", str(doc), "--out", str(enc)]) == 0
    monkeypatch.setenv("STEGOSONIC_PASSWORD", "not it")
    assert main(["decode", "--method", "lsb", "--in", str(enc), "--out", str(out)]) == 2
    assert "AuthenticationFailed" in capsys.readouterr().err
    assert not out.exists()
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".")] == []


def test_password_flag_overrides_env(tmp_path, carrier, monkeypatch):
    enc, out = tmp_path / "enc.wav", tmp_path / "o.txt"
    monkeypatch.delenv("STEGOSONIC_PASSWORD")
    assert main(["encode", "--method", "inject", "--in", str(carrier), "--text", "x",
                 "--out", str(enc), "--password", "pw1"]) == 0
    assert main(["decode", "--method", "inject", "--in", str(enc), "--out", str(out),
                 "--password", "pw1"]) == 0
    assert out.read_text(encoding="utf-8") == "x"


def test_payload_too_large_leaves_no_output(tmp_path, capsys):
    small = tmp_path / "small.wav"
    small.write_bytes(random_wav(500, rng=1))
    doc = tmp_path / "big.pdf"
    doc.write_bytes(fake_pdf(5000))
    enc = tmp_path / "enc.wav"
    assert main(["encode", "--method", "lsb", "--in", str(small), "--payload", str(doc), "--out", str(enc)]) == 2
    err = capsys.readouterr().err
    assert "PayloadTooLarge" in err and "capacity of" in err
    assert not enc.exists()


def test_capacity_25_4_mb(tmp_path, capsys):
    n = 25_400_000 - 44
    big = tmp_path / "big.wav"
    big.write_bytes(build_wav(bytes(n - n % 4)))
    assert main(["capacity", "--method", "lsb", "--in", str(big), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["max_sealed_bytes"] <= 3_175_000
    assert main(["capacity", "--method", "lsb", "--in", str(big)]) == 0
    assert "max sealed payload" in capsys.readouterr().out


def test_capacity_inject_and_mp3(carrier, mp3, capsys):
    assert main(["capacity", "--method", "inject", "--in", str(carrier), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["max_sealed_bytes"] == 2**32 - 1
    assert main(["capacity", "--method", "mp3", "--in", str(mp3), "--json", "--skip", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["max_sealed_bytes"] <= mp3.stat().st_size // 16


@pytest.mark.parametrize("method", ["lsb", "inject"])
def test_remove_with_yes(tmp_path, carrier, method, capsys):
    enc, clean, out = tmp_path / "enc.wav", tmp_path / "clean.wav", tmp_path / "o.txt"
    main(["encode", "--method", method, "--in", str(carrier), "--text", "bye", "--out", str(enc)])
    assert main(["remove", "--method", method, "--in", str(enc), "--out", str(clean), "--yes"]) == 0
    if method == "inject":
        assert clean.read_bytes() == carrier.read_bytes()
    else:
        assert clean.stat().st_size == carrier.stat().st_size
    capsys.readouterr()
    assert main(["decode", "--method", method, "--in", str(clean), "--out", str(out)]) == 2
    assert "NoHiddenData" in capsys.readouterr().err


def test_remove_asks_first(tmp_path, carrier, monkeypatch):
    enc, clean = tmp_path / "enc.wav", tmp_path / "clean.wav"
    main(["encode", "--method", "lsb", "--in", str(carrier), "--text", "bye", "--out", str(enc)])
    monkeypatch.setattr("builtins.input", lambda prompt: "n")
    assert main(["remove", "--method", "lsb", "--in", str(enc), "--out", str(clean)]) == 0
    assert not clean.exists()
    monkeypatch.setattr("builtins.input", lambda prompt: "y")
    assert main(["remove", "--method", "lsb", "--in", str(enc), "--out", str(clean)]) == 0
    assert clean.exists()


def test_remove_clean_file_is_domain_error(carrier, tmp_path, capsys):
    assert main(["remove", "--method", "inject", "--in", str(carrier), "--out", str(tmp_path / "x"), "--yes"]) == 2
    assert "NoHiddenData" in capsys.readouterr().err


def test_compare_and_distortion(tmp_path, carrier, capsys):
    enc = tmp_path / "enc.wav"
    main(["encode", "--method", "lsb", "--in", str(carrier), "--text", "hi there", "--out", str(enc)])
    capsys.readouterr()
    assert main(["compare", str(carrier), str(carrier), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["identical"] is True
    assert main(["compare", str(carrier), str(enc), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert not rep["identical"] and rep["differing_bit_count"] == rep["differing_byte_count"]
    assert main(["distortion", str(carrier), str(enc), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["max_sample_delta"] == 1
    assert main(["compare", str(carrier), str(enc)]) == 0
    assert "files differ" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [[], ["encode", "--method", "zip"], ["remove", "--method", "mp3"]])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 1


def test_missing_input_is_usage_error(tmp_path):
    assert main(["compare", str(tmp_path / "nope"), str(tmp_path / "nope")]) == 1


def test_send_to_daemon(tmp_path, capsys):
    cfg = ListenConfig(host="127.0.0.1", port=0, download_dir=tmp_path / "in")
    with ReceiveDaemon(cfg, auto_accept) as d:
        f = tmp_path / "enc.wav"
        f.write_bytes(os.urandom(5000))
        assert main(["send", "127.0.0.1", str(f), "--port", str(d.address[1])]) == 0
    assert (tmp_path / "in" / "enc.wav").read_bytes() == f.read_bytes()
    assert "transfer complete" in capsys.readouterr().out


def test_send_refused(tmp_path, capsys):
    import socket

    s = socket.create_server(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    f = tmp_path / "a.wav"
    f.write_bytes(b"x")
    assert main(["send", "127.0.0.1", str(f), "--port", str(port)]) == 2
    assert "ConnectionRefused" in capsys.readouterr().err
