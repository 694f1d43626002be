import struct

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from stegosonic.errors import MalformedRiff, NoHiddenData
from stegosonic.injection_codec import embed_injection, extract_injection, remove_injection
from stegosonic.payload import CompressionLevel, PayloadKind, SealedPayload, open_sealed, seal
from stegosonic.riff_wav import parse_wav
from stegosonic.synth import random_wav

from helpers import PASSWORD


@pytest.fixture
def wav():
    return parse_wav(random_wav(2000, rng=11, chunks_after=[(b"LIST", b"INFOtail")]))


def test_output_length(wav, small_sealed):
    out = embed_injection(wav, small_sealed)
    assert len(out) == len(wav.raw_bytes) + 5 + len(small_sealed.to_bytes())


def test_layout(wav, small_sealed):
    out = embed_injection(wav, small_sealed)
    h = wav.header_span[1]
    blob = small_sealed.to_bytes()
    assert out[:h] == wav.header
    assert out[h : h + 4] == struct.pack(">I", len(blob))
    assert out[h + 4] == 1  # compression requested
    assert out[h + 5 : h + 5 + len(wav.data)] == wav.data
    assert out[h + 5 + len(wav.data) : len(out) - len(blob)] == wav.trailing
    assert out[-len(blob):] == blob


def test_flags_byte_without_compression(wav):
    s = seal(b"abc", PASSWORD, CompressionLevel.OFF)
    out = embed_injection(wav, s)
    assert out[wav.header_span[1] + 4] == 0


def test_round_trip(wav, small_sealed):
    assert extract_injection(embed_injection(wav, small_sealed)) == small_sealed


def test_empty_plaintext_round_trip(wav):
    s = seal(b"", PASSWORD, CompressionLevel.OFF, PayloadKind.RAW)
    got = extract_injection(embed_injection(wav, s))
    assert open_sealed(got, PASSWORD) == b""


def test_unencoded_has_nothing(wav):
    with pytest.raises(NoHiddenData):
        extract_injection(wav.raw_bytes)


def test_truncation_detected(wav, small_sealed):
    out = embed_injection(wav, small_sealed)
    with pytest.raises(NoHiddenData):
        extract_injection(out[:-1])


def test_append_detected(wav, small_sealed):
    out = embed_injection(wav, small_sealed)
    with pytest.raises(NoHiddenData):
        extract_injection(out + b"\x00")


def test_remove_restores_original(wav, small_sealed):
    out = embed_injection(wav, small_sealed)
    assert remove_injection(out) == wav.raw_bytes
    with pytest.raises(NoHiddenData):
        remove_injection(remove_injection(out))


def test_non_canonical_header(small_sealed):
    w = parse_wav(random_wav(500, rng=2, chunks_before=[(b"LIST", b"INFOISFTabc\x00" * 5)]))
    assert w.header_span[1] > 44
    out = embed_injection(w, small_sealed)
    assert extract_injection(out) == small_sealed
    assert remove_injection(out) == w.raw_bytes


def test_inconsistent_riff_size_refused(wav, small_sealed):
    raw = bytearray(wav.raw_bytes)
    struct.pack_into("<I", raw, 4, 0xFFFFFFFF)
    with pytest.raises(MalformedRiff):
        embed_injection(parse_wav(bytes(raw)), small_sealed)


def test_not_a_wav():
    with pytest.raises(NoHiddenData):
        extract_injection(b"garbage" * 20)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(frames=st.integers(0, 2000), size=st.integers(45, 5000), seed=st.integers(0, 2**31))
def test_properties(frames, size, seed):
    w = parse_wav(random_wav(frames, rng=seed))
    rng = np.random.default_rng(seed)
    blob = bytes([rng.integers(0, 16)]) + rng.integers(0, 256, size - 1, dtype=np.uint8).tobytes()
    s = SealedPayload.from_bytes(blob)
    out = embed_injection(w, s)
    assert len(out) == len(w.raw_bytes) + 5 + size
    h = w.header_span[1]
    assert out[h + 5 : h + 5 + len(w.data)] == w.data
    assert extract_injection(out) == s
    assert remove_injection(out) == w.raw_bytes
