"""Pre-flight capacity report shown before any encoding starts."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

from .lsb_codec import capacity_lsb
from .mp3_codec import Mp3EmbedConfig, capacity_mp3
from .mpeg_frame import parse_mp3
from .payload import OVERHEAD
from .preamble import MAX_PAYLOAD_LEN
from .riff_wav import parse_wav


class Method(enum.Enum):
    LSB_DENSE = "lsb-dense"
    LSB_SPARSE = "lsb-sparse"
    INJECTION = "inject"
    MP3 = "mp3"


@dataclass(frozen=True)
class CapacityReport:
    method: str
    carrier_bytes: int
    max_sealed_bytes: int
    # sealed cap minus envelope overhead; compression can move the real figure either way
    estimated_max_plaintext_bytes: int
    bounded: bool

    def as_dict(self) -> dict:
        return asdict(self)


def report(carrier, method: Method, cfg: Mp3EmbedConfig | None = None) -> CapacityReport:
    carrier = bytes(carrier)
    method = Method(method)
    bounded = True
    if method in (Method.LSB_DENSE, Method.LSB_SPARSE):
        cap = capacity_lsb(parse_wav(carrier), dense=method is Method.LSB_DENSE)
    elif method is Method.INJECTION:
        parse_wav(carrier)
        cap, bounded = MAX_PAYLOAD_LEN, False
    else:
        cap = capacity_mp3(parse_mp3(carrier), cfg or Mp3EmbedConfig())
    return CapacityReport(
        method=method.value,
        carrier_bytes=len(carrier),
        max_sealed_bytes=cap,
        estimated_max_plaintext_bytes=max(0, cap - OVERHEAD),
        bounded=bounded,
    )


def format_report(rep: CapacityReport) -> str:
    rows = [
        ("method", rep.method),
        ("carrier size", f"{rep.carrier_bytes:,} bytes"),
        (
            "max sealed payload",
            f"{rep.max_sealed_bytes:,} bytes" + ("" if rep.bounded else " (32-bit length field)"),
        ),
        ("est. max plaintext", f"~{rep.estimated_max_plaintext_bytes:,} bytes"),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)
