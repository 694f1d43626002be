# coding: utf-8

# # Appending a payload after the audio
#
# Injection leaves every sample alone. A 5-byte record goes right after the
# header and the sealed blob goes at the very end. Size is limited only by the
# 32-bit length field.

# In[1]:

import numpy as np

from stegosonic import parse_wav, seal, open_sealed
from stegosonic import embed_injection, extract_injection, remove_injection
from stegosonic.synth import random_wav

rng = np.random.default_rng(3)
raw = random_wav(44100, rng=rng, chunks_after=[(b"LIST", b"INFOISFT\x04\x00\x00\x00demo")])
wav = parse_wav(raw)


# In[2]:

pdf = b"%PDF-1.4\n" + rng.integers(0, 256, 200_000, dtype=np.uint8).tobytes()
sealed = seal(pdf, "correct horse")
out = embed_injection(wav, sealed)
print(len(raw), "+ 5 +", len(sealed), "=", len(out))


# The audio bytes are all still there, just shifted by the 5-byte record.

# In[3]:

h, d = len(wav.header), len(wav.data)
assert out[h + 5:h + 5 + d] == wav.data
assert open_sealed(extract_injection(out), "correct horse") == pdf


# In[4]:

assert remove_injection(out) == raw
