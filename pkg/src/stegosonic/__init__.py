"""Hide, recover and remove encrypted documents inside WAV and MP3 audio."""

from .analysis import DiffReport, DistortionReport, compare_files, distortion
from .capacity import CapacityReport, Method, report
from .errors import *  # noqa: F401,F403
from .injection_codec import embed_injection, extract_injection, remove_injection
from .lsb_codec import capacity_lsb, embed_lsb, extract_lsb, remove_message
from .mp3_codec import Mp3EmbedConfig, capacity_mp3, embed_mp3, extract_mp3
from .mpeg_frame import Mp3Frame, Mp3Stream, parse_mp3, write_mp3
from .payload import CompressionLevel, PayloadKind, SealedPayload, open_sealed, seal
from .preamble import StegPreamble
from .riff_wav import WavFile, WavFormat, parse_wav, write_wav

__version__ = "0.1.0"
