"""Synthetic carriers for tests and demos (random-noise WAV and MP3 images)."""

from __future__ import annotations

import numpy as np

from .mpeg_frame import MPEG1, encode_header, frame_length
from .riff_wav import build_wav


def random_wav(
    n_frames: int,
    *,
    num_channels: int = 2,
    bits_per_sample: int = 16,
    sample_rate: int = 44100,
    rng=None,
    silent: bool = False,
    chunks_before=(),
    chunks_after=(),
) -> bytes:
    rng = np.random.default_rng(rng)
    n = n_frames * num_channels * bits_per_sample // 8
    if silent:
        # 8-bit PCM is unsigned, silence sits at 0x80
        fill = 0x80 if bits_per_sample == 8 else 0
        data = bytes([fill]) * n
    else:
        data = rng.integers(0, 256, n, dtype=np.uint8).tobytes()
    return build_wav(
        data,
        sample_rate=sample_rate,
        num_channels=num_channels,
        bits_per_sample=bits_per_sample,
        chunks_before=chunks_before,
        chunks_after=chunks_after,
    )


def id3v2_tag(body_len: int = 64, rng=None) -> bytes:
    rng = np.random.default_rng(rng)
    size = body_len
    syncsafe = bytes((size >> s) & 0x7F for s in (21, 14, 7, 0))
    return b"ID3\x04\x00\x00" + syncsafe + rng.integers(0, 256, body_len, dtype=np.uint8).tobytes()


def random_mp3(
    n_frames: int,
    *,
    version: str = MPEG1,
    bitrate: int = 128000,
    sample_rate: int = 44100,
    mono: bool = False,
    protected: bool = False,
    padding_pattern=(0,),
    id3: bool = False,
    id3v1: bool = False,
    rng=None,
) -> bytes:
    """Concatenate ``n_frames`` Layer III frames with random bodies.

    The bodies are noise, not decodable audio, which is all the frame
    parser and codecs care about.
    """
    rng = np.random.default_rng(rng)
    parts = [id3v2_tag(rng=rng)] if id3 else []
    for i in range(n_frames):
        pad = padding_pattern[i % len(padding_pattern)]
        hdr = encode_header(version, bitrate, sample_rate, pad, mono, protected)
        body_len = frame_length(version, bitrate, sample_rate, pad) - 4
        parts.append(hdr + rng.integers(0, 256, body_len, dtype=np.uint8).tobytes())
    if id3v1:
        parts.append(b"TAG" + bytes(125))
    return b"".join(parts)
