"""
RIFF/WAVE container parsing and byte-exact re-serialization.

The parser walks chunks instead of assuming a canonical 44-byte header, so
LIST/fact/cue chunks survive untouched.  A parsed file is split into three
contiguous spans: everything before the ``data`` payload (the header), the
payload itself, and whatever follows it (pad byte, trailing chunks).
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MalformedRiff, UnsupportedFormat

log = logging.getLogger(__name__)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_EXTENSIBLE = 0xFFFE
# KSDATAFORMAT_SUBTYPE_PCM
_PCM_SUBFORMAT = bytes.fromhex("0100000000001000800000aa00389b71")

TYPICAL_SAMPLE_RATES = (44100, 48000, 88200, 96000)
SUPPORTED_BITS = (8, 16, 24, 32)


@dataclass(frozen=True)
class WavFormat:
    audio_format: int
    num_channels: int
    sample_rate: int
    bits_per_sample: int
    block_align: int

    @property
    def is_pcm(self) -> bool:
        return self.audio_format == WAVE_FORMAT_PCM

    @property
    def sample_width(self) -> int:
        return self.bits_per_sample // 8


@dataclass(frozen=True)
class WavFile:
    raw_bytes: bytes
    format: WavFormat
    header_span: tuple[int, int]
    data_span: tuple[int, int]
    trailing_span: tuple[int, int]
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    @property
    def header(self) -> bytes:
        return self.raw_bytes[slice(*self.header_span)]

    @property
    def data(self) -> bytes:
        return self.raw_bytes[slice(*self.data_span)]

    @property
    def trailing(self) -> bytes:
        return self.raw_bytes[slice(*self.trailing_span)]

    def with_data(self, data) -> "WavFile":
        """Return a copy whose audio data region is replaced by ``data`` (same length)."""
        start, end = self.data_span
        if len(data) != end - start:
            raise ValueError("replacement data must keep the data region length")
        raw = self.raw_bytes[:start] + bytes(data) + self.raw_bytes[end:]
        return replace(self, raw_bytes=raw)

    def __len__(self):
        return len(self.raw_bytes)


def _parse_fmt(body: bytes) -> WavFormat:
    if len(body) < 16:
        raise MalformedRiff("fmt chunk shorter than 16 bytes")
    audio_format, channels, rate, _byte_rate, block_align, bits = struct.unpack_from(
        "<HHIIHH", body
    )
    if audio_format == WAVE_FORMAT_EXTENSIBLE and len(body) >= 40:
        # WAVEFORMATEXTENSIBLE wrapping plain integer PCM is treated as PCM
        if body[24:40] == _PCM_SUBFORMAT:
            audio_format = WAVE_FORMAT_PCM
    return WavFormat(audio_format, channels, rate, bits, block_align)


def _check_format(fmt: WavFormat, notes: list) -> None:
    if fmt.num_channels < 1:
        raise MalformedRiff("fmt chunk declares zero channels")
    if fmt.sample_rate <= 0:
        raise MalformedRiff("fmt chunk declares a non-positive sample rate")
    if fmt.sample_rate not in TYPICAL_SAMPLE_RATES:
        notes.append(f"unusual sample rate {fmt.sample_rate} Hz")
    if fmt.is_pcm and fmt.bits_per_sample in SUPPORTED_BITS:
        expected = fmt.num_channels * fmt.bits_per_sample // 8
        if fmt.block_align != expected:
            raise MalformedRiff(
                f"block_align {fmt.block_align} != channels x bits / 8 = {expected}"
            )


def require_pcm(fmt: WavFormat) -> None:
    if not fmt.is_pcm:
        raise UnsupportedFormat(f"audio format {fmt.audio_format:#06x} is not integer PCM")
    if fmt.bits_per_sample not in SUPPORTED_BITS:
        raise UnsupportedFormat(f"{fmt.bits_per_sample}-bit PCM is not supported")


def parse_wav(raw) -> WavFile:
    """Parse a WAV image into header / data / trailing spans.

    Raises MalformedRiff when the RIFF structure is broken or the fmt/data
    chunks are missing.  Non-PCM files parse fine; codecs that need PCM
    check ``format.is_pcm`` themselves.
    """
    raw = bytes(raw)
    if not raw:
        raise MalformedRiff("empty input")
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedRiff("missing RIFF/WAVE signature")

    notes = []
    riff_size = struct.unpack_from("<I", raw, 4)[0]
    if riff_size + 8 != len(raw):
        notes.append(f"RIFF size field {riff_size} disagrees with file length {len(raw)}")

    fmt = None
    pos = 12
    while pos + 8 <= len(raw):
        ck_id = raw[pos : pos + 4]
        ck_size = struct.unpack_from("<I", raw, pos + 4)[0]
        body_start = pos + 8
        body_end = body_start + ck_size
        if body_end > len(raw):
            raise MalformedRiff(f"chunk {ck_id!r} at offset {pos} is truncated")
        if ck_id == b"fmt ":
            fmt = _parse_fmt(raw[body_start:body_end])
        elif ck_id == b"data":
            if fmt is None:
                raise MalformedRiff("data chunk precedes fmt chunk")
            _check_format(fmt, notes)
            for note in notes:
                log.info("%s", note)
            return WavFile(
                raw_bytes=raw,
                format=fmt,
                header_span=(0, body_start),
                data_span=(body_start, body_end),
                trailing_span=(body_end, len(raw)),
                diagnostics=tuple(notes),
            )
        # chunks are word aligned
        pos = body_end + (ck_size & 1)

    if fmt is None:
        raise MalformedRiff("no fmt chunk")
    raise MalformedRiff("no data chunk")


def write_wav(wav: WavFile) -> bytes:
    start, end = wav.data_span
    if not (wav.header_span == (0, start) and wav.trailing_span == (end, len(wav.raw_bytes))):
        raise ValueError("inconsistent spans")
    return wav.raw_bytes


def read_wav(path) -> WavFile:
    with open(path, "rb") as fh:
        return parse_wav(fh.read())


def build_wav(
    data,
    *,
    sample_rate: int = 44100,
    num_channels: int = 2,
    bits_per_sample: int = 16,
    chunks_before=(),
    chunks_after=(),
) -> bytes:
    """Assemble a PCM WAV image from raw little-endian sample bytes.

    ``chunks_before`` / ``chunks_after`` are ``(fourcc, body)`` pairs placed
    around the data chunk, e.g. ``[(b"LIST", b"INFO...")]``.
    """
    data = bytes(data)
    block_align = num_channels * bits_per_sample // 8
    fmt_body = struct.pack(
        "<HHIIHH",
        WAVE_FORMAT_PCM,
        num_channels,
        sample_rate,
        sample_rate * block_align,
        block_align,
        bits_per_sample,
    )

    def chunk(ck_id, body):
        pad = b"\x00" if len(body) & 1 else b""
        return ck_id + struct.pack("<I", len(body)) + body + pad

    parts = [chunk(b"fmt ", fmt_body)]
    parts += [chunk(i, b) for i, b in chunks_before]
    parts.append(chunk(b"data", data))
    parts += [chunk(i, b) for i, b in chunks_after]
    body = b"WAVE" + b"".join(parts)
    return b"RIFF" + struct.pack("<I", len(body)) + body


def sample_values(wav: WavFile) -> np.ndarray:
    """Decode the data region to signed integer samples (interleaved, int64).

    8-bit PCM is unsigned on disk and is re-centred around zero.
    """
    fmt = wav.format
    require_pcm(fmt)
    width = fmt.sample_width
    buf = np.frombuffer(wav.data, dtype=np.uint8)
    buf = buf[: len(buf) - len(buf) % width]
    if width == 1:
        return buf.astype(np.int64) - 128
    if width == 2:
        return buf.view("<i2").astype(np.int64)
    if width == 4:
        return buf.view("<i4").astype(np.int64)
    # 24-bit: assemble little-endian triplets then sign-extend
    trip = buf.reshape(-1, 3).astype(np.int64)
    vals = trip[:, 0] | (trip[:, 1] << 8) | (trip[:, 2] << 16)
    return np.where(vals & 0x800000, vals - (1 << 24), vals)
