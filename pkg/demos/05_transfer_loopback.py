# coding: utf-8

# # Sending a stego file to a receiver
#
# The receiver sees an offer (name, size, digest) and decides. Nothing else
# crosses the wire until it says yes. Here both ends run in one process.

# In[1]:

import os
import tempfile
from pathlib import Path

from stegosonic.transfer import ListenConfig, ReceiveDaemon, send_file

tmp = Path(tempfile.mkdtemp())
src = tmp / "holiday.wav"
src.write_bytes(os.urandom(1 << 20))


# In[2]:

def decide(offer):
    print("offer:", offer.file_name, offer.file_size, "bytes")
    return offer.file_name.endswith(".wav")

cfg = ListenConfig(host="127.0.0.1", port=0, download_dir=tmp / "inbox")
with ReceiveDaemon(cfg, decide) as daemon:
    res = send_file("127.0.0.1", src, port=daemon.address[1])
    print(res.state, res.bytes_sent)

    odd = tmp / "notes.exe"
    odd.write_bytes(b"MZ")
    try:
        send_file("127.0.0.1", odd, port=daemon.address[1])
    except Exception as e:
        print(type(e).__name__)


# In[3]:

assert (tmp / "inbox" / "holiday.wav").read_bytes() == src.read_bytes()
sorted(p.name for p in (tmp / "inbox").iterdir())
