"""Bit-exact file comparison and carrier distortion measurement."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import FormatMismatch
from .riff_wav import WavFile, sample_values


@dataclass(frozen=True)
class DiffReport:
    identical: bool
    first_diff_offset: int | None
    differing_byte_count: int
    differing_bit_count: int
    length_a: int
    length_b: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DistortionReport:
    max_sample_delta: int
    rms_delta: float
    modified_sample_fraction: float

    def as_dict(self) -> dict:
        return asdict(self)


def compare_files(a, b) -> DiffReport:
    """Exhaustive byte and bit diff.

    When lengths differ, every byte past the shorter input counts as one
    differing byte and eight differing bits.
    """
    x = np.frombuffer(bytes(a), dtype=np.uint8)
    y = np.frombuffer(bytes(b), dtype=np.uint8)
    n = min(len(x), len(y))
    extra = abs(len(x) - len(y))
    xor = x[:n] ^ y[:n]
    nz = np.flatnonzero(xor)
    diff_bytes = int(nz.size) + extra
    diff_bits = int(np.unpackbits(xor).sum()) + 8 * extra
    if nz.size:
        first = int(nz[0])
    elif extra:
        first = n
    else:
        first = None
    return DiffReport(diff_bytes == 0, first, diff_bytes, diff_bits, len(x), len(y))


def distortion(original: WavFile, encoded: WavFile) -> DistortionReport:
    """Sample-wise difference in native sample units."""
    if original.format != encoded.format:
        raise FormatMismatch("carriers have different formats")
    if len(original.data) != len(encoded.data):
        raise FormatMismatch("carriers have different data lengths")
    delta = sample_values(encoded) - sample_values(original)
    if delta.size == 0:
        return DistortionReport(0, 0.0, 0.0)
    return DistortionReport(
        max_sample_delta=int(np.abs(delta).max()),
        rms_delta=float(np.sqrt(np.mean(delta.astype(np.float64) ** 2))),
        modified_sample_fraction=float(np.count_nonzero(delta) / delta.size),
    )


def format_diff(rep: DiffReport) -> str:
    if rep.identical:
        return f"identical ({rep.length_a:,} bytes)"
    return (
        f"files differ: {rep.differing_byte_count:,} bytes / {rep.differing_bit_count:,} bits, "
        f"first difference at offset {rep.first_diff_offset} "
        f"(lengths {rep.length_a:,} vs {rep.length_b:,})"
    )
