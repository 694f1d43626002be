import os
import socket
import threading

from stegosonic.payload import CompressionLevel, PayloadKind, seal

PASSWORD = "correct horse battery staple"


def sealed_of_length(n, level=CompressionLevel.OFF, kind=PayloadKind.RAW, password=PASSWORD):
    """A genuine sealed payload whose serialized length is exactly ``n``."""
    assert n >= 45
    return seal(os.urandom(n - 45), password, level, kind)


class CountingProxy:
    """Forward one TCP port to another, counting bytes client -> server."""

    def __init__(self, target):
        self.target = target
        self.upstream_bytes = 0
        self._lock = threading.Lock()
        self.sock = socket.create_server(("127.0.0.1", 0))
        self.port = self.sock.getsockname()[1]
        threading.Thread(target=self._serve, daemon=True).start()

    def _serve(self):
        while True:
            try:
                client, _ = self.sock.accept()
            except OSError:
                return
            server = socket.create_connection(self.target)
            threading.Thread(target=self._pump, args=(client, server, True), daemon=True).start()
            threading.Thread(target=self._pump, args=(server, client, False), daemon=True).start()

    def _pump(self, src, dst, upstream):
        try:
            while True:
                data = src.recv(65536)
                if not data:
                    break
                if upstream:
                    with self._lock:
                        self.upstream_bytes += len(data)
                dst.sendall(data)
        except OSError:
            pass
        finally:
            for s in (src, dst):
                try:
                    s.shutdown(socket.SHUT_WR)
                except OSError:
                    pass

    def close(self):
        self.sock.close()
