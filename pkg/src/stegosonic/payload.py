"""
Sealed payload envelope: optional DEFLATE compression, then AES-256-GCM.

Wire layout (no framing, the embedding layer carries the length)::

    flags(1) | salt(16) | nonce(12) | ciphertext + tag(16)

flags bits 0-1 hold the compression level, bits 2-3 the payload kind,
bits 4-7 are reserved and must be zero.  The flags byte is bound to the
ciphertext as associated data, so tampering with it fails authentication.
"""

from __future__ import annotations

import enum
import functools
import os
import zlib
from dataclasses import dataclass
from typing import Callable

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.pbkdf2 import PBKDF2HMAC

from .errors import AuthenticationFailed, DecompressionFailed, EmptyPassword, MalformedPayload

SALT_LEN = 16
NONCE_LEN = 12
TAG_LEN = 16
KEY_LEN = 32  # AES-256
FLAGS_LEN = 1
OVERHEAD = FLAGS_LEN + SALT_LEN + NONCE_LEN + TAG_LEN  # 45

KDF_ITERATIONS = 100_000


class CompressionLevel(enum.IntEnum):
    OFF = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @classmethod
    def parse(cls, name: str) -> "CompressionLevel":
        return cls[name.strip().upper()]


DEFAULT_COMPRESSION = CompressionLevel.MEDIUM

# zlib presets: fastest / library default / best
_ZLIB_LEVEL = {
    CompressionLevel.LOW: 1,
    CompressionLevel.MEDIUM: 6,
    CompressionLevel.HIGH: 9,
}


class PayloadKind(enum.IntEnum):
    TEXT = 0
    DOC = 1
    PDF = 2
    RAW = 3

    @classmethod
    def for_filename(cls, name: str) -> "PayloadKind":
        ext = os.path.splitext(name)[1].lower()
        return {".txt": cls.TEXT, ".doc": cls.DOC, ".docx": cls.DOC, ".pdf": cls.PDF}.get(
            ext, cls.RAW
        )


def pack_flags(level: CompressionLevel, kind: PayloadKind) -> int:
    return int(level) | (int(kind) << 2)


def unpack_flags(flags: int) -> tuple[CompressionLevel, PayloadKind]:
    if flags & 0xF0:
        raise MalformedPayload(f"reserved flag bits set: {flags:#04x}")
    return CompressionLevel(flags & 0b11), PayloadKind((flags >> 2) & 0b11)


@dataclass(frozen=True)
class SealedPayload:
    flags: int
    salt: bytes
    nonce: bytes
    ciphertext: bytes

    @property
    def level(self) -> CompressionLevel:
        return unpack_flags(self.flags)[0]

    @property
    def kind(self) -> PayloadKind:
        return unpack_flags(self.flags)[1]

    def to_bytes(self) -> bytes:
        return bytes((self.flags,)) + self.salt + self.nonce + self.ciphertext

    @classmethod
    def from_bytes(cls, blob) -> "SealedPayload":
        blob = bytes(blob)
        if len(blob) < OVERHEAD:
            raise MalformedPayload(f"sealed payload needs at least {OVERHEAD} bytes, got {len(blob)}")
        unpack_flags(blob[0])
        s = FLAGS_LEN
        n = s + SALT_LEN
        c = n + NONCE_LEN
        return cls(blob[0], blob[s:n], blob[n:c], blob[c:])

    def __len__(self):
        return FLAGS_LEN + len(self.salt) + len(self.nonce) + len(self.ciphertext)


@functools.lru_cache(maxsize=64)
def _derive(password: bytes, salt: bytes, iterations: int) -> bytes:
    kdf = PBKDF2HMAC(algorithm=hashes.SHA256(), length=KEY_LEN, salt=salt, iterations=iterations)
    return kdf.derive(password)


def derive_key(password: str, salt: bytes, iterations: int = KDF_ITERATIONS) -> bytes:
    """PBKDF2-HMAC-SHA256 -> 256-bit AES key."""
    if not password:
        raise EmptyPassword("password must not be empty")
    return _derive(password.encode("utf-8"), bytes(salt), iterations)


def compress(data: bytes, level: CompressionLevel) -> bytes:
    if level == CompressionLevel.OFF:
        return data
    return zlib.compress(data, _ZLIB_LEVEL[level])


def decompress(data: bytes, level: CompressionLevel) -> bytes:
    if level == CompressionLevel.OFF:
        return data
    try:
        return zlib.decompress(data)
    except zlib.error as exc:
        raise DecompressionFailed(str(exc)) from None


def seal(
    plaintext,
    password: str,
    level: CompressionLevel = DEFAULT_COMPRESSION,
    kind: PayloadKind = PayloadKind.RAW,
    *,
    iterations: int = KDF_ITERATIONS,
    randbytes: Callable[[int], bytes] = os.urandom,
) -> SealedPayload:
    """Compress (unless ``level`` is OFF) and encrypt ``plaintext``.

    A fresh salt and nonce are drawn from ``randbytes`` on every call.
    """
    if not password:
        raise EmptyPassword("password must not be empty")
    level = CompressionLevel(level)
    kind = PayloadKind(kind)
    flags = pack_flags(level, kind)
    salt = randbytes(SALT_LEN)
    nonce = randbytes(NONCE_LEN)
    key = derive_key(password, salt, iterations)
    body = compress(bytes(plaintext), level)
    ct = AESGCM(key).encrypt(nonce, body, bytes((flags,)))
    return SealedPayload(flags, salt, nonce, ct)


def open_sealed(sealed: SealedPayload, password: str, *, iterations: int = KDF_ITERATIONS) -> bytes:
    """Authenticate, decrypt and decompress.

    A wrong password and a corrupted blob both raise AuthenticationFailed;
    nothing is returned unless the tag verifies.
    """
    level, _ = unpack_flags(sealed.flags)
    if len(sealed.ciphertext) < TAG_LEN:
        raise MalformedPayload("ciphertext shorter than the authentication tag")
    key = derive_key(password, sealed.salt, iterations)
    try:
        body = AESGCM(key).decrypt(sealed.nonce, sealed.ciphertext, bytes((sealed.flags,)))
    except InvalidTag:
        raise AuthenticationFailed("wrong password or corrupted payload") from None
    return decompress(body, level)


# ``open`` mirrors ``seal``; aliased so it doesn't shadow the builtin inside this module
open = open_sealed  # noqa: A001


def encode_text(message: str) -> bytes:
    return message.encode("utf-16-le")


def decode_text(data: bytes) -> str:
    return data.decode("utf-16-le")
