"""The 5-byte length + flags record that precedes every hidden payload."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoHiddenData

PREAMBLE_LEN = 5
PREAMBLE_BITS = PREAMBLE_LEN * 8
MAX_PAYLOAD_LEN = 2**32 - 1

FLAG_DENSE = 0x01


@dataclass(frozen=True)
class StegPreamble:
    payload_len: int
    flags: int = 0

    @property
    def dense(self) -> bool:
        return bool(self.flags & FLAG_DENSE)

    def to_bytes(self) -> bytes:
        n = self.payload_len
        if not 0 <= n <= MAX_PAYLOAD_LEN:
            raise ValueError(f"payload length {n} does not fit in 32 bits")
        # most significant byte first, peeled off with 8-bit right shifts
        return bytes((n >> s) & 0xFF for s in (24, 16, 8, 0)) + bytes((self.flags,))

    @classmethod
    def from_bytes(cls, b) -> "StegPreamble":
        """Rebuild the record; reserved flag bits set means no hidden data."""
        b = bytes(b)
        if len(b) != PREAMBLE_LEN:
            raise ValueError("preamble must be 5 bytes")
        n = 0
        for byte in b[:4]:
            n = (n << 8) | byte
        if b[4] & ~FLAG_DENSE:
            raise NoHiddenData("preamble flags carry reserved bits")
        return cls(n, b[4])

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.to_bytes(), dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits) -> "StegPreamble":
        return cls.from_bytes(np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes())
