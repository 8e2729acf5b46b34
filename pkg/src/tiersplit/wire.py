"""Length-prefixed TCP framing for distributed runs, plus a loopback server.

Frame layout: 4-byte big-endian payload length, 1-byte message type, payload.
Message types:

  0x01 PROBE       4-byte big-endian echo size, then padding bytes
  0x02 PROBE_ACK   empty payload
  0x03 ACTIVATION  1-byte stage tag, 4-byte big-endian layer index, tensor bytes
  0x04 RESULT      8-byte big-endian handling time in nanoseconds

A peer that receives an unknown message type resets the connection rather
than replying. The loopback server exists so link probing and the wire
format can be exercised end to end without real machines.
"""

from __future__ import annotations

import socket
import socketserver
import struct
import threading
import time
from dataclasses import dataclass

from .errors import TransportError

MSG_PROBE = 0x01
MSG_PROBE_ACK = 0x02
MSG_ACTIVATION = 0x03
MSG_RESULT = 0x04

_HEADER = struct.Struct(">IB")
MAX_FRAME_BYTES = 64 * 1024 * 1024


def encode_frame(msg_type: int, payload: bytes) -> bytes:
    if not 0 <= msg_type <= 0xFF:
        raise ValueError(f"message type {msg_type} out of range")
    if len(payload) > MAX_FRAME_BYTES:
        raise ValueError(f"payload of {len(payload)} bytes exceeds frame limit")
    return _HEADER.pack(len(payload), msg_type) + payload


def encode_probe(echo_size: int) -> bytes:
    if echo_size < 0:
        raise ValueError("echo size must be >= 0")
    return encode_frame(MSG_PROBE, struct.pack(">I", echo_size) + b"\x00" * echo_size)


def encode_activation(stage_tag: int, layer_index: int, tensor: bytes) -> bytes:
    return encode_frame(
        MSG_ACTIVATION, struct.pack(">BI", stage_tag, layer_index) + tensor
    )


def encode_result(handling_ns: int) -> bytes:
    return encode_frame(MSG_RESULT, struct.pack(">Q", handling_ns))


def decode_result(payload: bytes) -> int:
    if len(payload) != 8:
        raise TransportError(f"result payload must be 8 bytes, got {len(payload)}")
    return struct.unpack(">Q", payload)[0]


def parse_activation(payload: bytes) -> tuple[int, int, bytes]:
    if len(payload) < 5:
        raise TransportError("activation payload shorter than its 5-byte header")
    tag, index = struct.unpack_from(">BI", payload)
    return tag, index, payload[5:]


def read_exact(sock: socket.socket, n: int) -> bytes:
    chunks = []
    remaining = n
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            raise TransportError("connection closed mid-frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    header = read_exact(sock, _HEADER.size)
    length, msg_type = _HEADER.unpack(header)
    if length > MAX_FRAME_BYTES:
        raise TransportError(f"declared frame length {length} exceeds limit")
    return msg_type, read_exact(sock, length)


def _reset_connection(sock: socket.socket) -> None:
    # RST instead of FIN so the peer sees a hard failure, not a clean close
    sock.setsockopt(
        socket.SOL_SOCKET, socket.SO_LINGER, struct.pack("ii", 1, 0)
    )
    sock.close()


class _LoopbackHandler(socketserver.BaseRequestHandler):
    def handle(self):
        sock = self.request
        while True:
            try:
                msg_type, payload = read_frame(sock)
            except TransportError:
                return
            started = time.perf_counter_ns()
            if msg_type == MSG_PROBE:
                if len(payload) < 4:
                    _reset_connection(sock)
                    return
                declared = struct.unpack_from(">I", payload)[0]
                if declared != len(payload) - 4:
                    _reset_connection(sock)
                    return
                sock.sendall(encode_frame(MSG_PROBE_ACK, b""))
            elif msg_type == MSG_ACTIVATION:
                try:
                    parse_activation(payload)
                except TransportError:
                    _reset_connection(sock)
                    return
                sock.sendall(encode_result(time.perf_counter_ns() - started))
            else:
                _reset_connection(sock)
                return


class LoopbackServer:
    """Threaded localhost peer speaking the frame protocol.

    Usable as a context manager; `address` is (host, port) after start().
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._server = socketserver.ThreadingTCPServer(
            (host, port), _LoopbackHandler, bind_and_activate=False
        )
        self._server.allow_reuse_address = True
        self._server.daemon_threads = True
        self._server.server_bind()
        self._server.server_activate()
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> "LoopbackServer":
        self._thread = threading.Thread(
            target=self._server.serve_forever, kwargs={"poll_interval": 0.05},
            daemon=True,
        )
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def __enter__(self) -> "LoopbackServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


@dataclass
class LoopbackHop:
    """Hop adapter measuring wall-clock round trips against a LoopbackServer."""

    address: tuple[str, int]
    name: str = "loopback"
    timeout_s: float = 5.0

    def rtt(self, payload_bytes: int) -> float:
        try:
            with socket.create_connection(self.address, timeout=self.timeout_s) as sock:
                started = time.perf_counter()
                sock.sendall(encode_probe(payload_bytes))
                msg_type, body = read_frame(sock)
                elapsed = time.perf_counter() - started
        except OSError as exc:
            raise TransportError(f"probe to {self.address} failed: {exc}") from exc
        if msg_type != MSG_PROBE_ACK:
            raise TransportError(f"expected probe ack, got type 0x{msg_type:02x}")
        if body:
            raise TransportError("probe ack carried unexpected payload")
        return elapsed
