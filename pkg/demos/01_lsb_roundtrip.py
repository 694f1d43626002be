# coding: utf-8

# # Hiding a document in the low bits of a WAV file
#
# We make a few seconds of noise, seal a small document with a password and
# tuck it into the least significant bits of the samples. The file keeps its
# exact size and no sample moves by more than one step.

# In[1]:

import numpy as np

from stegosonic import CompressionLevel, PayloadKind, seal, open_sealed
from stegosonic import parse_wav, embed_lsb, extract_lsb, capacity_lsb, remove_message
from stegosonic.analysis import distortion
from stegosonic.synth import random_wav

rng = np.random.default_rng(7)
carrier = parse_wav(random_wav(3 * 44100, rng=rng))
len(carrier.raw_bytes), carrier.format


# How much room is there? Dense mode uses every low-order byte, sparse mode
# every other run of eight.

# In[2]:

print("dense :", capacity_lsb(carrier, dense=True), "bytes")
print("sparse:", capacity_lsb(carrier, dense=False), "bytes")


# In[3]:

doc = b"Minutes of the 14 March meeting.\n" * 200
sealed = seal(doc, "hunter2", CompressionLevel.MEDIUM, PayloadKind.DOC)
print(len(doc), "->", len(sealed), "bytes after compression and encryption")

stego = embed_lsb(carrier, sealed, dense=True)
assert len(stego.raw_bytes) == len(carrier.raw_bytes)


# In[4]:

rep = distortion(carrier, stego)
print("max delta", rep.max_sample_delta, " rms", round(rep.rms_delta, 4),
      " touched", f"{rep.modified_sample_fraction:.2%}")


# Getting it back needs the same password.

# In[5]:

assert open_sealed(extract_lsb(stego), "hunter2") == doc


# In[6]:

clean = remove_message(stego)
try:
    extract_lsb(clean)
except Exception as e:
    print(type(e).__name__)
