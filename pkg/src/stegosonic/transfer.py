"""
LAN file transfer with explicit receiver consent.

Control channel (TCP, default port 47555).  Every control record is
``length(4) | type(1) | body`` with all integers big-endian:

    OFFER   0x01  proto_version(1) offer_id(8) name_len(2) name size(8) sha256(32)
    ACCEPT  0x02  offer_id(8) data_port(2)
    REJECT  0x03  offer_id(8)
    RESULT  0x04  offer_id(8) status(1)     0 ok, 1 checksum mismatch, 2 failed

After ACCEPT the sender connects to ``data_port`` (an OS-assigned ephemeral
port, one per accepted offer) and streams ``chunk_len(4) | bytes`` records
ending with a zero-length chunk.  The receiver checks size and digest, moves
the file into place atomically and answers with RESULT on the control
channel.  Nothing but the OFFER crosses the wire before ACCEPT.

There is no transport encryption or peer authentication: confidentiality
is the job of the steganographic payload.
"""

from __future__ import annotations

import enum
import errno
import hashlib
import logging
import os
import socket
import socketserver
import struct
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import (
    ChecksumMismatch,
    ConnectionRefused,
    DiskFull,
    OfferRejected,
    PortInUse,
    ProtocolError,
    TransferError,
    TransferTimeout,
)

log = logging.getLogger(__name__)

PROTO_VERSION = 1
DEFAULT_PORT = 47555
DEFAULT_TIMEOUT = 60.0
CHUNK_SIZE = 64 * 1024
MAX_CHUNK = 16 * 1024 * 1024
MAX_RECORD = 64 * 1024

MSG_OFFER, MSG_ACCEPT, MSG_REJECT, MSG_RESULT = 0x01, 0x02, 0x03, 0x04
STATUS_OK, STATUS_CHECKSUM, STATUS_FAILED = 0, 1, 2

ENV_PORT = "STEGOSONIC_PORT"
ENV_DIR = "STEGOSONIC_DIR"


# -- wire format -------------------------------------------------------------


@dataclass(frozen=True)
class Offer:
    file_name: str
    file_size: int
    checksum: bytes
    offer_id: bytes

    def __post_init__(self):
        if not valid_file_name(self.file_name):
            raise ProtocolError(f"illegal file name {self.file_name!r}")
        if len(self.checksum) != 32 or len(self.offer_id) != 8:
            raise ProtocolError("bad checksum or offer id length")


def valid_file_name(name: str) -> bool:
    return (
        bool(name)
        and name not in (".", "..")
        and "/" not in name
        and "\\" not in name
        and "\x00" not in name
    )


def pack_offer(offer: Offer) -> bytes:
    name = offer.file_name.encode("utf-8")
    return (
        struct.pack(">B8sH", PROTO_VERSION, offer.offer_id, len(name))
        + name
        + struct.pack(">Q32s", offer.file_size, offer.checksum)
    )


def unpack_offer(body: bytes) -> Offer:
    try:
        version, offer_id, name_len = struct.unpack_from(">B8sH", body)
        if version != PROTO_VERSION:
            raise ProtocolError(f"unsupported protocol version {version}")
        name = body[11 : 11 + name_len].decode("utf-8")
        size, digest = struct.unpack_from(">Q32s", body, 11 + name_len)
    except (struct.error, UnicodeDecodeError) as exc:
        raise ProtocolError(f"malformed OFFER: {exc}") from None
    if len(body) != 11 + name_len + 40:
        raise ProtocolError("OFFER has trailing bytes")
    return Offer(name, size, digest, offer_id)


def pack_record(msg_type: int, body: bytes) -> bytes:
    return struct.pack(">IB", len(body) + 1, msg_type) + body


def recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        part = sock.recv(min(n - len(buf), 1 << 20))
        if not part:
            raise ProtocolError(f"connection closed after {len(buf)} of {n} bytes")
        buf += part
    return bytes(buf)


def read_record(sock: socket.socket) -> tuple[int, bytes]:
    (length,) = struct.unpack(">I", recv_exact(sock, 4))
    if not 1 <= length <= MAX_RECORD:
        raise ProtocolError(f"control record length {length} out of range")
    rec = recv_exact(sock, length)
    return rec[0], rec[1:]


def iter_chunks(sock: socket.socket):
    """Yield data-stream chunks until the zero-length end marker."""
    while True:
        (n,) = struct.unpack(">I", recv_exact(sock, 4))
        if n == 0:
            return
        if n > MAX_CHUNK:
            raise ProtocolError(f"chunk of {n} bytes exceeds limit")
        yield recv_exact(sock, n)


def pack_chunk(data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + data


END_OF_STREAM = struct.pack(">I", 0)


# -- sessions ----------------------------------------------------------------


class State(enum.Enum):
    OFFERED = "offered"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    STREAMING = "streaming"
    COMPLETE = "complete"
    FAILED = "failed"


_TRANSITIONS = {
    State.OFFERED: {State.ACCEPTED, State.REJECTED},
    # ACCEPTED -> FAILED covers a sender that never opens the data connection
    State.ACCEPTED: {State.STREAMING, State.FAILED},
    State.STREAMING: {State.COMPLETE, State.FAILED},
}


@dataclass
class TransferSession:
    offer: Offer
    state: State = State.OFFERED
    data_port: int | None = None
    bytes_moved: int = 0
    path: Path | None = None
    error: str | None = None

    def advance(self, new: State) -> None:
        if new not in _TRANSITIONS.get(self.state, ()):
            raise ProtocolError(f"illegal session transition {self.state.name} -> {new.name}")
        self.state = new


@dataclass(frozen=True)
class TransferResult:
    state: State
    offer: Offer
    data_port: int | None
    bytes_sent: int


# -- sender ------------------------------------------------------------------


def file_digest(path) -> tuple[int, bytes]:
    h = hashlib.sha256()
    size = 0
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(CHUNK_SIZE), b""):
            h.update(block)
            size += len(block)
    return size, h.digest()


def make_offer(path) -> Offer:
    size, digest = file_digest(path)
    return Offer(os.path.basename(os.fspath(path)), size, digest, os.urandom(8))


def _read_file_chunks(path, chunk_size: int):
    with open(path, "rb") as fh:
        yield from iter(lambda: fh.read(chunk_size), b"")


def send_file(
    address: str,
    path,
    *,
    port: int | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    chunk_size: int = CHUNK_SIZE,
) -> TransferResult:
    """Offer ``path`` to the receiver at ``address`` and stream it once accepted.

    Raises OfferRejected, ChecksumMismatch, TransferTimeout or
    ConnectionRefused.  Safe to call from several threads at once.
    """
    if port is None:
        port = int(os.environ.get(ENV_PORT, DEFAULT_PORT))
    offer = make_offer(path)
    try:
        ctrl = socket.create_connection((address, port), timeout=timeout)
    except ConnectionRefusedError:
        raise ConnectionRefused(f"no receiver listening on {address}:{port}") from None
    except socket.timeout:
        raise TransferTimeout(f"connecting to {address}:{port} timed out") from None

    with ctrl:
        ctrl.sendall(pack_record(MSG_OFFER, pack_offer(offer)))
        try:
            msg, body = read_record(ctrl)
        except socket.timeout:
            raise TransferTimeout(f"no answer to offer within {timeout:g} s") from None
        if msg == MSG_REJECT:
            raise OfferRejected(f"receiver declined {offer.file_name}")
        if msg != MSG_ACCEPT or len(body) != 10 or body[:8] != offer.offer_id:
            raise ProtocolError("unexpected reply to OFFER")
        (data_port,) = struct.unpack(">H", body[8:])

        sent = 0
        data_host = ctrl.getpeername()[0]
        with socket.create_connection((data_host, data_port), timeout=timeout) as data:
            for chunk in _read_file_chunks(path, chunk_size):
                data.sendall(pack_chunk(chunk))
                sent += len(chunk)
            data.sendall(END_OF_STREAM)

        try:
            msg, body = read_record(ctrl)
        except socket.timeout:
            raise TransferTimeout("receiver did not confirm the transfer") from None
        if msg != MSG_RESULT or len(body) != 9 or body[:8] != offer.offer_id:
            raise ProtocolError("unexpected reply after data stream")
        status = body[8]
    if status == STATUS_CHECKSUM:
        raise ChecksumMismatch(f"receiver digest differs for {offer.file_name}")
    if status != STATUS_OK:
        raise TransferError(f"receiver failed to store {offer.file_name}")
    return TransferResult(State.COMPLETE, offer, data_port, sent)


# -- receiver ----------------------------------------------------------------


@dataclass
class ListenConfig:
    host: str = "0.0.0.0"
    port: int = DEFAULT_PORT
    download_dir: Path = field(default_factory=Path.cwd)
    data_timeout: float = DEFAULT_TIMEOUT

    @classmethod
    def from_env(cls, **overrides) -> "ListenConfig":
        cfg = cls()
        if ENV_PORT in os.environ:
            cfg.port = int(os.environ[ENV_PORT])
        if ENV_DIR in os.environ:
            cfg.download_dir = Path(os.environ[ENV_DIR])
        for k, v in overrides.items():
            if v is not None:
                setattr(cfg, k, v)
        cfg.download_dir = Path(cfg.download_dir)
        return cfg


Decision = Callable[[Offer], bool]


def auto_accept(offer: Offer) -> bool:
    return True


def auto_reject(offer: Offer) -> bool:
    return False


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class ReceiveDaemon:
    """Control-port listener that runs one session per incoming offer.

    ``decide`` is called for each offer, one call at a time.  Use as a
    context manager or call ``start()`` / ``stop()``.
    """

    def __init__(self, config: ListenConfig, decide: Decision = auto_reject):
        self.config = config
        self.decide = decide
        self.sessions: list[TransferSession] = []
        self.data_bytes_received = 0
        self._decide_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._thread = None
        daemon = self

        class Handler(socketserver.BaseRequestHandler):
            def handle(self):
                daemon._handle(self.request)

        try:
            self._server = _Server((config.host, config.port), Handler)
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise PortInUse(f"port {config.port} is already in use") from None
            raise

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def serve_forever(self) -> None:
        self._server.serve_forever(poll_interval=0.1)

    def start(self) -> "ReceiveDaemon":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    # one control connection == one session
    def _handle(self, ctrl: socket.socket) -> None:
        ctrl.settimeout(self.config.data_timeout)
        try:
            msg, body = read_record(ctrl)
            if msg != MSG_OFFER:
                raise ProtocolError(f"expected OFFER, got message type {msg}")
            offer = unpack_offer(body)
        except (ProtocolError, OSError) as exc:
            log.warning("dropping control connection: %s", exc)
            return

        session = TransferSession(offer)
        with self._state_lock:
            self.sessions.append(session)

        with self._decide_lock:
            try:
                accepted = bool(self.decide(offer))
            except Exception:
                log.exception("decision callback failed; rejecting")
                accepted = False
        if not accepted:
            session.advance(State.REJECTED)
            ctrl.sendall(pack_record(MSG_REJECT, offer.offer_id))
            return

        try:
            status = self._receive(ctrl, session)
        except (ProtocolError, OSError) as exc:
            if session.state in (State.ACCEPTED, State.STREAMING):
                session.error = str(exc)
                session.advance(State.FAILED)
            log.warning("session %s failed: %s", offer.offer_id.hex(), exc)
            status = STATUS_FAILED
        try:
            ctrl.sendall(pack_record(MSG_RESULT, offer.offer_id + bytes((status,))))
        except OSError:
            pass

    def _receive(self, ctrl: socket.socket, session: TransferSession) -> int:
        offer = session.offer
        local_ip = ctrl.getsockname()[0]
        with socket.create_server((local_ip, 0)) as listener:
            listener.settimeout(self.config.data_timeout)
            session.data_port = listener.getsockname()[1]
            session.advance(State.ACCEPTED)
            ctrl.sendall(pack_record(MSG_ACCEPT, offer.offer_id + struct.pack(">H", session.data_port)))
            conn, _ = listener.accept()

        dest_dir = Path(self.config.download_dir)
        dest_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=dest_dir, prefix=".part-")
        ok = False
        try:
            with conn, os.fdopen(fd, "wb") as out:
                conn.settimeout(self.config.data_timeout)
                session.advance(State.STREAMING)
                h = hashlib.sha256()
                for chunk in iter_chunks(conn):
                    session.bytes_moved += len(chunk)
                    with self._state_lock:
                        self.data_bytes_received += len(chunk)
                    if session.bytes_moved > offer.file_size:
                        raise ProtocolError("sender streamed more bytes than offered")
                    h.update(chunk)
                    try:
                        out.write(chunk)
                    except OSError as exc:
                        if exc.errno == errno.ENOSPC:
                            raise DiskFull("no space left for incoming file") from None
                        raise

            if session.bytes_moved != offer.file_size or h.digest() != offer.checksum:
                session.error = "checksum mismatch"
                session.advance(State.FAILED)
                return STATUS_CHECKSUM

            with self._state_lock:
                final = _unique_path(dest_dir / offer.file_name)
                os.replace(tmp, final)
            ok = True
            session.path = final
            session.advance(State.COMPLETE)
            return STATUS_OK
        except DiskFull as exc:
            session.error = str(exc)
            session.advance(State.FAILED)
            return STATUS_FAILED
        finally:
            if not ok and os.path.exists(tmp):
                os.unlink(tmp)


def _unique_path(path: Path) -> Path:
    if not path.exists():
        return path
    stem, suffix = path.stem, path.suffix
    n = 1
    while True:
        cand = path.with_name(f"{stem} ({n}){suffix}")
        if not cand.exists():
            return cand
        n += 1


def receive_daemon(config: ListenConfig, decision_source: Decision) -> None:
    """Serve offers in the calling thread until interrupted."""
    daemon = ReceiveDaemon(config, decision_source)
    log.info("listening on %s:%d, saving to %s", *daemon.address, config.download_dir)
    try:
        daemon.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        daemon._server.server_close()
