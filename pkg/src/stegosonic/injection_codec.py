"""
Method II: insert a 5-byte preamble after the WAV header and append the
sealed payload after everything else.

Encoded layout::

    header | preamble(5) | audio data | trailing chunks | sealed payload

RIFF and data chunk size fields are left exactly as they were, so the
original file length is still recorded in the RIFF size field.  Extraction
uses that to check ``len(file) == riff_size + 8 + 5 + payload_len`` before
trusting anything, which is how un-encoded or truncated files are told apart.
Strict players may misread encoded files; sample bytes are never altered.
"""

from __future__ import annotations

import struct

from .errors import MalformedPayload, MalformedRiff, NoHiddenData
from .payload import CompressionLevel, SealedPayload
from .preamble import FLAG_DENSE, MAX_PAYLOAD_LEN, PREAMBLE_LEN, StegPreamble
from .riff_wav import WavFile, parse_wav


def _riff_length(raw: bytes) -> int:
    return struct.unpack_from("<I", raw, 4)[0] + 8


def embed_injection(wav: WavFile, sealed: SealedPayload) -> bytes:
    raw = wav.raw_bytes
    if _riff_length(raw) != len(raw):
        raise MalformedRiff(
            "RIFF size field does not match the file length; "
            "injection needs it to verify extraction"
        )
    blob = sealed.to_bytes()
    if len(blob) > MAX_PAYLOAD_LEN:
        raise ValueError("sealed payload does not fit a 32-bit length field")
    flags = FLAG_DENSE if sealed.level != CompressionLevel.OFF else 0
    pre = StegPreamble(len(blob), flags).to_bytes()
    cut = wav.header_span[1]
    return raw[:cut] + pre + raw[cut:] + blob


def _locate(raw: bytes) -> tuple[int, StegPreamble]:
    try:
        cut = parse_wav(raw).header_span[1]
    except MalformedRiff as exc:
        raise NoHiddenData(f"no hidden message ({exc})") from None
    if cut + PREAMBLE_LEN > len(raw):
        raise NoHiddenData("no hidden message (file ends inside the preamble)")
    pre = StegPreamble.from_bytes(raw[cut : cut + PREAMBLE_LEN])
    expected = _riff_length(raw) + PREAMBLE_LEN + pre.payload_len
    if pre.payload_len == 0 or expected != len(raw):
        raise NoHiddenData("no hidden message (length consistency check failed)")
    return cut, pre


def extract_injection(raw) -> SealedPayload:
    raw = bytes(raw)
    _, pre = _locate(raw)
    try:
        return SealedPayload.from_bytes(raw[len(raw) - pre.payload_len :])
    except MalformedPayload as exc:
        raise NoHiddenData(f"no hidden message ({exc})") from None


def remove_injection(raw) -> bytes:
    """Return the original carrier, byte for byte."""
    raw = bytes(raw)
    cut, pre = _locate(raw)
    return raw[:cut] + raw[cut + PREAMBLE_LEN : len(raw) - pre.payload_len]
