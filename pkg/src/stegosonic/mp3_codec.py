"""
Method III: LSB embedding in MP3 main-data bytes with a constant frame skip.

Frame 0 carries the 40-bit size record in the LSBs of its first 40
main-data bytes.  Payload bits then go into every main-data byte of frames
``skip+1``, ``2*(skip+1)``, ... so ``skip`` untouched frames separate any two
modified ones.  Headers, CRC words and side info are never written.

The skip value is not stored in the file; both sides must agree on it,
much like the password.  Sealed size is capped at 1/16 of the file.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedPayload, NoHiddenData, NotTextPayload, PayloadTooLarge, TooFewFrames
from .lsb_codec import bits_to_bytes, bytes_to_bits, read_lsbs, write_lsbs
from .mpeg_frame import Mp3Stream
from .payload import CompressionLevel, PayloadKind, SealedPayload
from .preamble import FLAG_DENSE, PREAMBLE_BITS, StegPreamble

DEFAULT_SKIP = 3
SIZE_CAP_DIVISOR = 16


@dataclass(frozen=True)
class Mp3EmbedConfig:
    skip: int = DEFAULT_SKIP

    def __post_init__(self):
        if self.skip < 0:
            raise ValueError("skip must be >= 0")


def selected_frames(stream: Mp3Stream, cfg: Mp3EmbedConfig) -> list[int]:
    """Indices of payload-carrying frames (frame 0 is the size record)."""
    return list(range(cfg.skip + 1, len(stream.frames), cfg.skip + 1))


def _size_positions(stream: Mp3Stream) -> np.ndarray:
    start, end = stream.frames[0].data_span
    if end - start < PREAMBLE_BITS:
        raise TooFewFrames("first frame's data field is too short for the size record")
    return np.arange(start, start + PREAMBLE_BITS, dtype=np.int64)


def payload_positions(stream: Mp3Stream, cfg: Mp3EmbedConfig) -> np.ndarray:
    """Absolute byte offsets whose LSBs carry payload bits, in order."""
    spans = [stream.frames[i].data_span for i in selected_frames(stream, cfg)]
    if not spans:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate([np.arange(a, b, dtype=np.int64) for a, b in spans])


def _bit_budget(stream: Mp3Stream, cfg: Mp3EmbedConfig) -> int:
    return sum(
        stream.frames[i].data_span[1] - stream.frames[i].data_span[0]
        for i in selected_frames(stream, cfg)
    )


def capacity_mp3(stream: Mp3Stream, cfg: Mp3EmbedConfig = Mp3EmbedConfig()) -> int:
    if len(stream.frames) < 2:
        raise TooFewFrames(f"need at least 2 frames, found {len(stream.frames)}")
    return min(len(stream.raw_bytes) // SIZE_CAP_DIVISOR, _bit_budget(stream, cfg) // 8)


def embed_mp3(
    stream: Mp3Stream, sealed: SealedPayload, cfg: Mp3EmbedConfig = Mp3EmbedConfig()
) -> Mp3Stream:
    if sealed.kind != PayloadKind.TEXT:
        raise NotTextPayload("only text payloads can be hidden in MP3 carriers")
    blob = sealed.to_bytes()
    cap = capacity_mp3(stream, cfg)
    if len(blob) > cap:
        raise PayloadTooLarge(len(blob), cap, "sealed payload")
    flags = FLAG_DENSE if sealed.level != CompressionLevel.OFF else 0
    buf = np.frombuffer(stream.raw_bytes, dtype=np.uint8).copy()
    write_lsbs(buf, _size_positions(stream), StegPreamble(len(blob), flags).to_bits())
    bits = bytes_to_bits(blob)
    write_lsbs(buf, payload_positions(stream, cfg)[: len(bits)], bits)
    return stream.with_bytes(buf.tobytes())


def extract_mp3(stream: Mp3Stream, cfg: Mp3EmbedConfig = Mp3EmbedConfig()) -> SealedPayload:
    if len(stream.frames) < 2:
        raise NoHiddenData("too few frames to hold a message")
    buf = np.frombuffer(stream.raw_bytes, dtype=np.uint8)
    pre = StegPreamble.from_bits(read_lsbs(buf, _size_positions(stream)))
    cap = capacity_mp3(stream, cfg)
    if pre.payload_len == 0 or pre.payload_len > cap:
        raise NoHiddenData(f"no hidden message (size record {pre.payload_len}, capacity {cap})")
    pos = payload_positions(stream, cfg)[: 8 * pre.payload_len]
    try:
        return SealedPayload.from_bytes(bits_to_bytes(read_lsbs(buf, pos)))
    except MalformedPayload as exc:
        raise NoHiddenData(f"no hidden message ({exc})") from None
