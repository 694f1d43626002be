"""
Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error (the error class name
is printed).  Outputs are written to a temporary file next to the target
and renamed into place only on success.
"""

from __future__ import annotations

import argparse
import getpass
import json
import logging
import os
import sys
import tempfile
import threading
from pathlib import Path

from . import analysis, capacity, transfer
from .errors import StegoError
from .injection_codec import embed_injection, extract_injection, remove_injection
from .lsb_codec import embed_lsb, extract_lsb, read_preamble, remove_message
from .mp3_codec import DEFAULT_SKIP, Mp3EmbedConfig, embed_mp3, extract_mp3
from .mpeg_frame import parse_mp3
from .payload import (
    DEFAULT_COMPRESSION,
    CompressionLevel,
    PayloadKind,
    decode_text,
    encode_text,
    open_sealed,
    seal,
)
from .riff_wav import parse_wav

ENV_PASSWORD = "STEGOSONIC_PASSWORD"

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None


def _password(args) -> str:
    if args.password:
        return args.password
    env = os.environ.get(ENV_PASSWORD)
    if env:
        return env
    return getpass.getpass("Password: ")


def _level(args) -> CompressionLevel:
    return CompressionLevel.parse(args.compress) if args.compress else DEFAULT_COMPRESSION


def _load_payload(args) -> tuple[bytes, PayloadKind]:
    if args.text is not None:
        return encode_text(args.text), PayloadKind.TEXT
    data = _read(args.payload)
    kind = PayloadKind.for_filename(args.payload)
    if kind == PayloadKind.TEXT:
        try:
            return encode_text(data.decode("utf-8")), kind
        except UnicodeDecodeError:
            kind = PayloadKind.RAW
    return data, kind


def _capacity_method(method: str, level: CompressionLevel) -> capacity.Method:
    if method == "lsb":
        dense = level != CompressionLevel.OFF
        return capacity.Method.LSB_DENSE if dense else capacity.Method.LSB_SPARSE
    return {"inject": capacity.Method.INJECTION, "mp3": capacity.Method.MP3}[method]


def cmd_encode(args) -> int:
    carrier = _read(args.input)
    level = _level(args)
    cfg = Mp3EmbedConfig(args.skip)
    rep = capacity.report(carrier, _capacity_method(args.method, level), cfg)
    print(capacity.format_report(rep))

    plaintext, kind = _load_payload(args)
    sealed = seal(plaintext, _password(args), level, kind)
    print(f"payload: {len(plaintext):,} bytes -> sealed {len(sealed):,} bytes ({level.name.lower()} compression)")

    if args.method == "lsb":
        out = embed_lsb(parse_wav(carrier), sealed, dense=level != CompressionLevel.OFF).raw_bytes
    elif args.method == "inject":
        out = embed_injection(parse_wav(carrier), sealed)
    else:
        out = embed_mp3(parse_mp3(carrier), sealed, cfg).raw_bytes
    atomic_write(args.out, out)
    print(f"encoded audio written to {args.out} ({len(out):,} bytes)")
    return EXIT_OK


def cmd_decode(args) -> int:
    carrier = _read(args.input)
    if args.method == "lsb":
        sealed = extract_lsb(parse_wav(carrier))
    elif args.method == "inject":
        sealed = extract_injection(carrier)
    else:
        sealed = extract_mp3(parse_mp3(carrier), Mp3EmbedConfig(args.skip))
    print(f"hidden payload found: {len(sealed):,} sealed bytes ({sealed.kind.name.lower()})")
    plaintext = open_sealed(sealed, _password(args))
    if sealed.kind == PayloadKind.TEXT:
        text = decode_text(plaintext)
        if args.out == "-":
            print(text)
            return EXIT_OK
        plaintext = text.encode("utf-8")
    atomic_write(args.out, plaintext)
    print(f"message recovered to {args.out} ({len(plaintext):,} bytes)")
    return EXIT_OK


def cmd_remove(args) -> int:
    carrier = _read(args.input)
    if args.method == "lsb":
        wav = parse_wav(carrier)
        pre = read_preamble(wav)
        print(f"hidden payload: {pre.payload_len:,} sealed bytes")
    else:
        extract_injection(carrier)  # raises NoHiddenData before any prompt
    if not args.yes:
        answer = input(f"Remove the hidden message from {args.input}? [y/N] ")
        if answer.strip().lower() not in ("y", "yes"):
            print("aborted, nothing written")
            return EXIT_OK
    out = remove_message(wav).raw_bytes if args.method == "lsb" else remove_injection(carrier)
    atomic_write(args.out, out)
    print(f"message removed; clean audio written to {args.out} ({len(out):,} bytes)")
    return EXIT_OK


def cmd_capacity(args) -> int:
    carrier = _read(args.input)
    rep = capacity.report(carrier, _capacity_method(args.method, _level(args)), Mp3EmbedConfig(args.skip))
    print(json.dumps(rep.as_dict()) if args.json else capacity.format_report(rep))
    return EXIT_OK


def cmd_compare(args) -> int:
    rep = analysis.compare_files(_read(args.a), _read(args.b))
    print(json.dumps(rep.as_dict()) if args.json else analysis.format_diff(rep))
    return EXIT_OK


def cmd_distortion(args) -> int:
    rep = analysis.distortion(parse_wav(_read(args.original)), parse_wav(_read(args.encoded)))
    if args.json:
        print(json.dumps(rep.as_dict()))
    else:
        print(
            f"max sample delta {rep.max_sample_delta}, rms {rep.rms_delta:.6f}, "
            f"modified samples {rep.modified_sample_fraction:.4%}"
        )
    return EXIT_OK


def cmd_send(args) -> int:
    if not os.path.isfile(args.file):
        raise UsageError(f"no such file: {args.file}")
    size = os.path.getsize(args.file)
    print(f"offering {os.path.basename(args.file)} ({size:,} bytes) to {args.host}")
    res = transfer.send_file(args.host, args.file, port=args.port, timeout=args.timeout)
    print(f"transfer complete: {res.bytes_sent:,} bytes via data port {res.data_port}")
    return EXIT_OK


def _prompt_decision(offer: transfer.Offer) -> bool:
    answer = input(f"Accept {offer.file_name} ({offer.file_size:,} bytes)? [y/N] ")
    return answer.strip().lower() in ("y", "yes")


def cmd_recv(args) -> int:
    cfg = transfer.ListenConfig.from_env(port=args.port, download_dir=args.dir)
    decide = transfer.auto_accept if args.auto_accept else _prompt_decision
    daemon = transfer.ReceiveDaemon(cfg, decide)
    host, port = daemon.address
    print(f"listening on {host}:{port}, saving to {cfg.download_dir} (Ctrl-C to stop)")
    stop = threading.Event()
    try:
        daemon.start()
        stop.wait()
    except KeyboardInterrupt:
        pass
    finally:
        daemon.stop()
    done = [s for s in daemon.sessions if s.state == transfer.State.COMPLETE]
    print(f"stopped; {len(done)} file(s) received")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stegosonic", description=__doc__.strip().splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def method_arg(sp, choices=("lsb", "inject", "mp3")):
        sp.add_argument("--method", required=True, choices=choices)
        sp.add_argument("--in", dest="input", required=True, metavar="CARRIER")

    def pw_arg(sp):
        sp.add_argument("--password", help=f"prefer ${ENV_PASSWORD} or the interactive prompt")

    levels = [lv.name.lower() for lv in CompressionLevel]

    sp = sub.add_parser("encode", help="hide a document or text message")
    method_arg(sp)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--payload", metavar="FILE")
    src.add_argument("--text", metavar="MSG")
    sp.add_argument("--out", required=True)
    pw_arg(sp)
    sp.add_argument("--compress", choices=levels, default=None)
    sp.add_argument("--skip", type=int, default=DEFAULT_SKIP)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="recover a hidden message")
    method_arg(sp)
    sp.add_argument("--out", required=True, help="'-' prints text messages")
    pw_arg(sp)
    sp.add_argument("--skip", type=int, default=DEFAULT_SKIP)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("remove", help="destroy a hidden message")
    method_arg(sp, ("lsb", "inject"))
    sp.add_argument("--out", required=True)
    sp.add_argument("--yes", action="store_true", help="do not ask for confirmation")
    sp.set_defaults(func=cmd_remove)

    sp = sub.add_parser("capacity", help="show how much can be hidden")
    method_arg(sp)
    sp.add_argument("--compress", choices=levels, default=None)
    sp.add_argument("--skip", type=int, default=DEFAULT_SKIP)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("compare", help="bit-exact comparison of two files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("distortion", help="sample-level difference of two WAVs")
    sp.add_argument("original")
    sp.add_argument("encoded")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_distortion)

    sp = sub.add_parser("send", help="offer a file to a receiver on the LAN")
    sp.add_argument("host")
    sp.add_argument("file")
    sp.add_argument("--port", type=int, default=None)
    sp.add_argument("--timeout", type=float, default=transfer.DEFAULT_TIMEOUT)
    sp.set_defaults(func=cmd_send)

    sp = sub.add_parser("recv", help="accept incoming files")
    sp.add_argument("--auto-accept", action="store_true")
    sp.add_argument("--dir", type=Path, default=None)
    sp.add_argument("--port", type=int, default=None)
    sp.set_defaults(func=cmd_recv)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s"
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StegoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
