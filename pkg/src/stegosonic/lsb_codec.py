"""
Method I: hide a sealed payload in the least-significant bits of PCM samples.

Only the low-order byte of each sample word is eligible, taken in stored
(interleaved) order so consecutive bits alternate across channels.  The
first 40 eligible bytes always carry the preamble; the payload follows
either in every eligible byte (dense) or in runs of 8 used / 8 skipped
(sparse).  File length never changes and no sample moves by more than one
quantization step.
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedPayload, NoHiddenData, PayloadTooLarge
from .payload import SealedPayload
from .preamble import FLAG_DENSE, PREAMBLE_BITS, StegPreamble
from .riff_wav import WavFile, require_pcm

SPARSE_RUN = 8


def write_lsbs(buf: np.ndarray, positions: np.ndarray, bits: np.ndarray) -> None:
    """Set the LSB of ``buf[positions[i]]`` to ``bits[i]`` in place."""
    buf[positions] = (buf[positions] & 0xFE) | bits


def read_lsbs(buf: np.ndarray, positions: np.ndarray) -> np.ndarray:
    return buf[positions] & 1


def bytes_to_bits(data: bytes) -> np.ndarray:
    """MSB-first bit array."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(bits.astype(np.uint8)).tobytes()


def eligible_count(wav: WavFile) -> int:
    """Number of sample words, i.e. low-order bytes that may carry a bit."""
    width = wav.format.sample_width
    return (wav.data_span[1] - wav.data_span[0]) // width


def _payload_slots(dense: bool, n_eligible: int) -> int:
    m = max(n_eligible - PREAMBLE_BITS, 0)
    if dense:
        return m
    full, rem = divmod(m, 2 * SPARSE_RUN)
    return full * SPARSE_RUN + min(rem, SPARSE_RUN)


def carrier_positions(wav: WavFile, dense: bool, n_bits: int | None = None) -> np.ndarray:
    """Data-region byte offsets carrying bits, in embedding order.

    The first 40 entries hold the preamble.  ``n_bits`` truncates the list;
    by default every usable position for the mode is returned.
    """
    n_elig = eligible_count(wav)
    total = min(n_elig, PREAMBLE_BITS) + _payload_slots(dense, n_elig)
    if n_bits is None:
        n_bits = total
    if n_bits > total:
        raise ValueError(f"requested {n_bits} positions, only {total} available")
    k = np.arange(n_bits, dtype=np.int64)
    if not dense:
        tail = k[PREAMBLE_BITS:] - PREAMBLE_BITS
        k[PREAMBLE_BITS:] = (
            PREAMBLE_BITS + (tail // SPARSE_RUN) * 2 * SPARSE_RUN + tail % SPARSE_RUN
        )
    return k * wav.format.sample_width


def capacity_lsb(wav: WavFile, dense: bool) -> int:
    """Largest sealed payload (bytes) that fits with the given mode."""
    require_pcm(wav.format)
    n_elig = eligible_count(wav)
    if n_elig < PREAMBLE_BITS:
        return 0
    by_bits = _payload_slots(dense, n_elig) // 8
    return max(0, min(by_bits, len(wav.raw_bytes) // 8))


def embed_lsb(wav: WavFile, sealed: SealedPayload, dense: bool) -> WavFile:
    require_pcm(wav.format)
    blob = sealed.to_bytes()
    cap = capacity_lsb(wav, dense)
    if len(blob) > cap:
        raise PayloadTooLarge(len(blob), cap, "sealed payload")
    pre = StegPreamble(len(blob), FLAG_DENSE if dense else 0)
    bits = bytes_to_bits(pre.to_bytes() + blob)
    buf = np.frombuffer(wav.data, dtype=np.uint8).copy()
    write_lsbs(buf, carrier_positions(wav, dense, len(bits)), bits)
    return wav.with_data(buf.tobytes())


def read_preamble(wav: WavFile) -> StegPreamble:
    """Decode the preamble and validate it against the carrier capacity."""
    require_pcm(wav.format)
    if eligible_count(wav) < PREAMBLE_BITS:
        raise NoHiddenData("carrier too small to hold a preamble")
    buf = np.frombuffer(wav.data, dtype=np.uint8)
    pos = np.arange(PREAMBLE_BITS, dtype=np.int64) * wav.format.sample_width
    pre = StegPreamble.from_bits(read_lsbs(buf, pos))
    if pre.payload_len == 0:
        raise NoHiddenData("no hidden message (zero length)")
    cap = capacity_lsb(wav, pre.dense)
    if pre.payload_len > cap:
        raise NoHiddenData(
            f"no hidden message (declared length {pre.payload_len} exceeds capacity {cap})"
        )
    return pre


def extract_lsb(wav: WavFile) -> SealedPayload:
    pre = read_preamble(wav)
    n_bits = PREAMBLE_BITS + 8 * pre.payload_len
    buf = np.frombuffer(wav.data, dtype=np.uint8)
    pos = carrier_positions(wav, pre.dense, n_bits)[PREAMBLE_BITS:]
    blob = bits_to_bytes(read_lsbs(buf, pos))
    try:
        return SealedPayload.from_bytes(blob)
    except MalformedPayload as exc:
        raise NoHiddenData(f"no hidden message ({exc})") from None


def remove_message(wav: WavFile) -> WavFile:
    """Clear every LSB that held the preamble or the payload."""
    pre = read_preamble(wav)
    n_bits = PREAMBLE_BITS + 8 * pre.payload_len
    buf = np.frombuffer(wav.data, dtype=np.uint8).copy()
    pos = carrier_positions(wav, pre.dense, n_bits)
    buf[pos] &= 0xFE
    return wav.with_data(buf.tobytes())

