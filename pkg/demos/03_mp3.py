# coding: utf-8

# # Text inside MP3 frames
#
# Only text travels this way. The first frame holds the length record, then
# one frame in every ``skip + 1`` carries payload bits in the low bit of its
# main data bytes. Headers and side info are never touched.

# In[1]:

from stegosonic import parse_mp3, seal, open_sealed, CompressionLevel, PayloadKind
from stegosonic import Mp3EmbedConfig, capacity_mp3, embed_mp3, extract_mp3
from stegosonic.payload import encode_text, decode_text
from stegosonic.synth import random_mp3

song = parse_mp3(random_mp3(2000, id3=True, rng=11))
print(len(song.frames), "frames,", len(song.raw_bytes), "bytes")


# In[2]:

for skip in (0, 1, 3, 7):
    print("skip", skip, "->", capacity_mp3(song, Mp3EmbedConfig(skip)), "bytes")


# In[3]:

msg = "The package is under the third bench. Bring the blue umbrella."
cfg = Mp3EmbedConfig(3)
sealed = seal(encode_text(msg), "pw", CompressionLevel.HIGH, PayloadKind.TEXT)
stego = embed_mp3(song, sealed, cfg)
print(decode_text(open_sealed(extract_mp3(stego, cfg), "pw")))


# A different skip reads the wrong bits, and authentication catches it.

# In[4]:

try:
    open_sealed(extract_mp3(stego, Mp3EmbedConfig(2)), "pw")
except Exception as e:
    print(type(e).__name__)
