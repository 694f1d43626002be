"""
Split an MPEG-1/2/2.5 Layer III byte stream into frames.

Each frame's ``data_span`` covers only the main-data bytes: the 4-byte
header, the optional CRC word and the side-information block are all
excluded, so LSB edits inside ``data_span`` never touch sync words or
the bit-allocation side info.

ID3v2 tags at the start land in ``leading_span``; anything after the last
whole frame (ID3v1 ``TAG`` block, a truncated frame, junk) lands in
``trailing_span``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .errors import CorruptFrame, NoFramesFound, UnsupportedFormat

log = logging.getLogger(__name__)

MPEG1, MPEG2, MPEG25 = "1", "2", "2.5"
_VERSIONS = {0b11: MPEG1, 0b10: MPEG2, 0b00: MPEG25}

# kbit/s, Layer III only; index 0 is "free format", 15 is invalid
_BITRATES = {
    MPEG1: (0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, None),
    MPEG2: (0, 8, 16, 24, 32, 40, 48, 56, 64, 80, 96, 112, 128, 144, 160, None),
}
_BITRATES[MPEG25] = _BITRATES[MPEG2]

_SAMPLE_RATES = {
    MPEG1: (44100, 48000, 32000),
    MPEG2: (22050, 24000, 16000),
    MPEG25: (11025, 12000, 8000),
}

# side-info length in bytes, keyed by (is MPEG-1, is mono)
_SIDE_INFO = {(True, False): 32, (True, True): 17, (False, False): 17, (False, True): 9}

CHANNEL_MODE_MONO = 0b11


@dataclass(frozen=True)
class FrameHeader:
    version: str
    layer: int
    protected: bool  # True when a 16-bit CRC follows the header
    bitrate: int  # bit/s
    sample_rate: int
    padding: int
    channel_mode: int

    @property
    def mono(self) -> bool:
        return self.channel_mode == CHANNEL_MODE_MONO

    @property
    def frame_length(self) -> int:
        return frame_length(self.version, self.bitrate, self.sample_rate, self.padding)

    @property
    def side_info_length(self) -> int:
        return _SIDE_INFO[(self.version == MPEG1, self.mono)]

    @property
    def main_data_offset(self) -> int:
        """Offset of the first main-data byte relative to the frame start."""
        return 4 + (2 if self.protected else 0) + self.side_info_length


def frame_length(version: str, bitrate: int, sample_rate: int, padding: int) -> int:
    """Layer III frame length in bytes (header included)."""
    coeff = 144 if version == MPEG1 else 72
    return coeff * bitrate // sample_rate + padding


def decode_header(b: bytes) -> FrameHeader | None:
    """Decode a 4-byte Layer III frame header, or return None if it is not one.

    Free-format frames (bitrate index 0) raise UnsupportedFormat since their
    length cannot be derived from the header.
    """
    if len(b) < 4 or b[0] != 0xFF or (b[1] & 0xE0) != 0xE0:
        return None
    version = _VERSIONS.get((b[1] >> 3) & 0b11)
    layer_bits = (b[1] >> 1) & 0b11
    if version is None or layer_bits != 0b01:  # 0b01 == Layer III
        return None
    br_index = b[2] >> 4
    sr_index = (b[2] >> 2) & 0b11
    if br_index == 0b1111 or sr_index == 0b11:
        return None
    if br_index == 0:
        raise UnsupportedFormat("free-format (bitrate index 0) frames are not supported")
    return FrameHeader(
        version=version,
        layer=3,
        protected=not (b[1] & 0x01),
        bitrate=_BITRATES[version][br_index] * 1000,
        sample_rate=_SAMPLE_RATES[version][sr_index],
        padding=(b[2] >> 1) & 0x01,
        channel_mode=b[3] >> 6,
    )


def encode_header(
    version: str = MPEG1,
    bitrate: int = 128000,
    sample_rate: int = 44100,
    padding: int = 0,
    mono: bool = False,
    protected: bool = False,
) -> bytes:
    """Build a 4-byte Layer III header (inverse of ``decode_header``)."""
    ver_bits = {v: k for k, v in _VERSIONS.items()}[version]
    br_index = _BITRATES[version].index(bitrate // 1000)
    sr_index = _SAMPLE_RATES[version].index(sample_rate)
    b1 = 0xE0 | (ver_bits << 3) | (0b01 << 1) | (0 if protected else 1)
    b2 = (br_index << 4) | (sr_index << 2) | (padding << 1)
    b3 = (CHANNEL_MODE_MONO if mono else 0b00) << 6
    return bytes((0xFF, b1, b2, b3))


@dataclass(frozen=True)
class Mp3Frame:
    offset: int
    header: FrameHeader
    length: int

    @property
    def header_bytes_span(self) -> tuple[int, int]:
        return (self.offset, self.offset + 4)

    @property
    def data_span(self) -> tuple[int, int]:
        return (self.offset + self.header.main_data_offset, self.offset + self.length)

    @property
    def end(self) -> int:
        return self.offset + self.length


@dataclass(frozen=True)
class Mp3Stream:
    raw_bytes: bytes
    leading_span: tuple[int, int]
    frames: tuple[Mp3Frame, ...]
    trailing_span: tuple[int, int]
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def __len__(self):
        return len(self.raw_bytes)

    def with_bytes(self, raw) -> "Mp3Stream":
        """Same frame layout over edited bytes of identical length."""
        if len(raw) != len(self.raw_bytes):
            raise ValueError("edited stream must keep its length")
        return replace(self, raw_bytes=bytes(raw))


def id3v2_size(raw: bytes, pos: int = 0) -> int:
    """Total size of an ID3v2 tag starting at ``pos`` (0 if none)."""
    if raw[pos : pos + 3] != b"ID3" or len(raw) < pos + 10:
        return 0
    size_bytes = raw[pos + 6 : pos + 10]
    if any(x & 0x80 for x in size_bytes):
        return 0
    size = 0
    for x in size_bytes:  # syncsafe: 7 bits per byte
        size = (size << 7) | x
    footer = 10 if raw[pos + 5] & 0x10 else 0
    return 10 + size + footer


def _header_at(raw: bytes, pos: int) -> FrameHeader | None:
    try:
        return decode_header(raw[pos : pos + 4])
    except UnsupportedFormat:
        return None


def _find_first_frame(raw: bytes, start: int) -> int:
    """Offset of the first header followed by another header (or by EOF)."""
    saw_free_format = False
    pos = raw.find(b"\xff", start)
    while pos != -1 and pos + 4 <= len(raw):
        try:
            hdr = decode_header(raw[pos : pos + 4])
        except UnsupportedFormat:
            saw_free_format, hdr = True, None
        if hdr is not None:
            nxt = pos + hdr.frame_length
            if nxt == len(raw) or _header_at(raw, nxt) is not None:
                return pos
        pos = raw.find(b"\xff", pos + 1)
    if saw_free_format:
        raise UnsupportedFormat("only free-format frames found; their length is not computable")
    return -1


def parse_mp3(raw, *, strict: bool = False) -> Mp3Stream:
    """Parse an MP3 image into leading tag bytes, frames and trailing bytes.

    A frame whose computed length runs past the end of the file is kept in
    the trailing span and noted in ``diagnostics``; with ``strict=True`` it
    raises CorruptFrame instead.
    """
    raw = bytes(raw)
    if not raw:
        raise NoFramesFound("empty input")

    lead = 0
    while True:
        tag = id3v2_size(raw, lead)
        if not tag:
            break
        lead += tag
    lead = min(lead, len(raw))

    first = _find_first_frame(raw, lead)
    if first < 0:
        raise NoFramesFound("no MPEG Layer III frame sync found")

    notes = []
    if first != lead:
        notes.append(f"{first - lead} junk bytes before the first frame")

    frames = []
    pos = first
    while pos + 4 <= len(raw):
        hdr = _header_at(raw, pos)
        if hdr is None:
            break
        length = hdr.frame_length
        if pos + length > len(raw):
            msg = f"frame at offset {pos} truncated ({len(raw) - pos} of {length} bytes)"
            if strict:
                raise CorruptFrame(msg)
            notes.append(msg)
            break
        frames.append(Mp3Frame(pos, hdr, length))
        pos += length

    if any(f.header.protected for f in frames):
        notes.append("CRC-protected frames present; CRCs are not updated after edits")
    for note in notes:
        log.info("%s", note)

    return Mp3Stream(
        raw_bytes=raw,
        leading_span=(0, first),
        frames=tuple(frames),
        trailing_span=(pos, len(raw)),
        diagnostics=tuple(notes),
    )


def write_mp3(stream: Mp3Stream) -> bytes:
    expected = stream.leading_span[1]
    for fr in stream.frames:
        if fr.offset != expected:
            raise ValueError("frames do not tile the stream")
        expected = fr.end
    if stream.trailing_span != (expected, len(stream.raw_bytes)):
        raise ValueError("inconsistent trailing span")
    return stream.raw_bytes


def read_mp3(path) -> Mp3Stream:
    with open(path, "rb") as fh:
        return parse_mp3(fh.read())
