import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stegosonic.errors import CorruptFrame, NoFramesFound, UnsupportedFormat
from stegosonic.mpeg_frame import (
    MPEG1,
    MPEG2,
    MPEG25,
    decode_header,
    encode_header,
    frame_length,
    parse_mp3,
    write_mp3,
)
from stegosonic.synth import random_mp3

from oracles import reference_diff, reference_frame_length


def test_frame_length_128k_44k():
    expected = reference_frame_length("1", 128000, 44100, 0)
    assert expected == 417
    assert frame_length(MPEG1, 128000, 44100, 0) == expected


def test_frame_length_with_padding():
    expected = reference_frame_length("1", 128000, 44100, 1)
    assert expected == 418
    assert frame_length(MPEG1, 128000, 44100, 1) == expected


@pytest.mark.parametrize("version", [MPEG1, MPEG2, MPEG25])
def test_frame_length_matches_oracle_everywhere(version):
    from stegosonic.mpeg_frame import _BITRATES, _SAMPLE_RATES

    for br in _BITRATES[version][1:-1]:
        for sr in _SAMPLE_RATES[version]:
            for pad in (0, 1):
                assert frame_length(version, br * 1000, sr, pad) == reference_frame_length(
                    version, br * 1000, sr, pad
                )


def test_header_round_trip():
    raw = encode_header(MPEG1, 128000, 44100, padding=1, mono=False, protected=True)
    # hand check: FF FA (MPEG1, L3, CRC on) 92 (br idx 9, sr idx 0, pad 1) 00
    assert raw == bytes((0xFF, 0xFA, 0x92, 0x00))
    hdr = decode_header(raw)
    assert (hdr.version, hdr.bitrate, hdr.sample_rate, hdr.padding) == (MPEG1, 128000, 44100, 1)
    assert hdr.protected and not hdr.mono
    assert hdr.main_data_offset == 4 + 2 + 32


@pytest.mark.parametrize(
    "version, mono, side",
    [(MPEG1, False, 32), (MPEG1, True, 17), (MPEG2, False, 17), (MPEG2, True, 9), (MPEG25, True, 9)],
)
def test_side_info_excluded(version, mono, side):
    rate = {MPEG1: 44100, MPEG2: 22050, MPEG25: 11025}[version]
    br = 64000 if version == MPEG1 else 32000
    st_ = parse_mp3(random_mp3(3, version=version, bitrate=br, sample_rate=rate, mono=mono, rng=1))
    fr = st_.frames[0]
    assert fr.data_span == (fr.offset + 4 + side, fr.end)


def test_not_a_header():
    assert decode_header(b"\x00\x00\x00\x00") is None
    assert decode_header(b"\xff\xfd\x90\x00") is None  # layer I
    assert decode_header(b"\xff\xfb\xf0\x00") is None  # bitrate index 15
    with pytest.raises(UnsupportedFormat):
        decode_header(b"\xff\xfb\x00\x00")  # free format


def test_n_identical_frames_tile():
    raw = random_mp3(25, rng=4)
    st_ = parse_mp3(raw)
    assert len(st_.frames) == 25
    assert all(f.length == 417 for f in st_.frames)
    assert write_mp3(st_) == raw
    assert st_.leading_span == (0, 0) and st_.trailing_span == (len(raw), len(raw))


def test_id3_tags_preserved():
    raw = random_mp3(10, id3=True, id3v1=True, rng=5)
    st_ = parse_mp3(raw)
    assert raw[: st_.leading_span[1]].startswith(b"ID3")
    assert raw[slice(*st_.trailing_span)].startswith(b"TAG")
    assert len(st_.frames) == 10
    assert write_mp3(st_) == raw


def test_truncated_last_frame_goes_to_trailing():
    raw = random_mp3(6, rng=6)[:-100]
    st_ = parse_mp3(raw)
    assert len(st_.frames) == 5
    assert st_.trailing_span == (5 * 417, len(raw))
    assert any("truncated" in d for d in st_.diagnostics)
    with pytest.raises(CorruptFrame):
        parse_mp3(raw, strict=True)


def test_crc_frames_flagged():
    st_ = parse_mp3(random_mp3(3, protected=True, rng=1))
    assert any("CRC" in d for d in st_.diagnostics)


def test_no_frames():
    with pytest.raises(NoFramesFound):
        parse_mp3(b"not an mp3 at all" * 10)
    with pytest.raises(NoFramesFound):
        parse_mp3(b"")


def test_free_format_only_rejected():
    with pytest.raises(UnsupportedFormat):
        parse_mp3(b"\xff\xfb\x00\x00" + bytes(400))


def test_single_flip_inside_frame_data():
    raw = random_mp3(8, rng=7)
    st_ = parse_mp3(raw)
    k = 5
    a, b = st_.frames[k].data_span
    buf = bytearray(raw)
    buf[a + 10] ^= 1
    out = write_mp3(st_.with_bytes(bytes(buf)))
    assert len(out) == len(raw)
    first, nbytes, nbits = reference_diff(raw, out)
    assert nbytes == 1 and nbits == 1 and a <= first < b
    reparsed = parse_mp3(out)
    assert [f.offset for f in reparsed.frames] == [f.offset for f in st_.frames]


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 30),
    version=st.sampled_from([MPEG1, MPEG2]),
    mono=st.booleans(),
    crc=st.booleans(),
    pads=st.lists(st.integers(0, 1), min_size=1, max_size=5),
    id3=st.booleans(),
    seed=st.integers(0, 2**32 - 1),
)
def test_reassembly_identity(n, version, mono, crc, pads, id3, seed):
    rate = 44100 if version == MPEG1 else 22050
    raw = random_mp3(
        n, version=version, bitrate=128000 if version == MPEG1 else 64000, sample_rate=rate,
        mono=mono, protected=crc, padding_pattern=pads, id3=id3, rng=seed,
    )
    st_ = parse_mp3(raw)
    assert len(st_.frames) == n
    assert write_mp3(st_) == raw
    for f in st_.frames:
        assert raw[f.offset] == 0xFF
        a, b = f.data_span
        assert f.offset + 4 <= a <= b == f.end
