"""Length-prefixed binary framing and the two-party session loop.

Every frame is ``u32 length (big-endian) | payload`` where the payload is a
one-byte kind followed by a fixed-width body:

====== ======== ==========================================================
kind   name     body
====== ======== ==========================================================
0x01   Hello    u8 version (=1), u8 variant, u64 n, u64 steps (sender's own)
0x02   Endpoint i64 value
0x03   Verdict  u8 (1 = a<b, 0 = not)
====== ======== ==========================================================

All integers are big-endian; payloads never exceed 64 bytes.
"""

from __future__ import annotations

import enum
import queue
import socket
import struct
import threading
from dataclasses import dataclass
from typing import Protocol, Union

from .errors import ChannelClosed, ConfigMismatch, MalformedFrame, ProtocolOrder, UnknownKind, VersionMismatch
from .protocol import (
    PartyInput,
    ProtocolConfig,
    Role,
    Variant,
    Verdict,
    alice_prepare,
    bob_prepare,
    decide,
    receive_verdict,
    share_verdict,
)
from .rng import RngStream

VERSION = 1
MAX_PAYLOAD = 64

_LEN = struct.Struct(">I")
_HELLO = struct.Struct(">BBBQQ")
_ENDPOINT = struct.Struct(">Bq")
_VERDICT = struct.Struct(">BB")


class Kind(enum.IntEnum):
    HELLO = 0x01
    ENDPOINT = 0x02
    VERDICT = 0x03


@dataclass(frozen=True)
class Hello:
    variant: Variant
    n: int
    steps: int
    version: int = VERSION


@dataclass(frozen=True)
class Endpoint:
    value: int


@dataclass(frozen=True)
class VerdictMsg:
    a_less_than_b: bool


Message = Union[Hello, Endpoint, VerdictMsg]


def encode(msg: Message) -> bytes:
    if isinstance(msg, Hello):
        payload = _HELLO.pack(Kind.HELLO, msg.version, int(msg.variant), msg.n, msg.steps)
    elif isinstance(msg, Endpoint):
        payload = _ENDPOINT.pack(Kind.ENDPOINT, msg.value)
    elif isinstance(msg, VerdictMsg):
        payload = _VERDICT.pack(Kind.VERDICT, int(bool(msg.a_less_than_b)))
    else:
        raise TypeError(f"not a message: {msg!r}")
    return _LEN.pack(len(payload)) + payload


def decode(data: bytes) -> Message:
    """Decode exactly one complete frame."""
    if len(data) < _LEN.size + 1:
        raise MalformedFrame(f"frame too short ({len(data)} bytes)")
    (length,) = _LEN.unpack_from(data)
    if length > MAX_PAYLOAD:
        raise MalformedFrame(f"declared payload length {length} exceeds {MAX_PAYLOAD}")
    payload = data[_LEN.size:]
    if len(payload) != length:
        raise MalformedFrame(f"declared length {length}, got {len(payload)} payload bytes")
    try:
        kind = Kind(payload[0])
    except ValueError:
        raise UnknownKind(f"unknown message kind 0x{payload[0]:02x}") from None
    expected = {Kind.HELLO: _HELLO, Kind.ENDPOINT: _ENDPOINT, Kind.VERDICT: _VERDICT}[kind]
    if length != expected.size:
        raise MalformedFrame(f"{kind.name} payload must be {expected.size} bytes, got {length}")
    if kind is Kind.HELLO:
        _, version, variant, n, steps = _HELLO.unpack(payload)
        if version != VERSION:
            raise VersionMismatch(f"unsupported version {version}")
        try:
            return Hello(Variant(variant), n, steps, version)
        except ValueError:
            raise MalformedFrame(f"unknown variant {variant}") from None
    if kind is Kind.ENDPOINT:
        return Endpoint(_ENDPOINT.unpack(payload)[1])
    flag = _VERDICT.unpack(payload)[1]
    if flag > 1:
        raise MalformedFrame(f"verdict byte must be 0 or 1, got {flag}")
    return VerdictMsg(bool(flag))


class Channel(Protocol):
    def send(self, data: bytes) -> None: ...

    def recv_exact(self, size: int) -> bytes:
        """Return exactly ``size`` bytes, or ``b""`` on a clean EOF at a frame boundary."""
        ...

    def close_write(self) -> None: ...


class SocketChannel:
    def __init__(self, sock: socket.socket):
        self.sock = sock

    def send(self, data: bytes) -> None:
        self.sock.sendall(data)

    def recv_exact(self, size: int) -> bytes:
        buf = bytearray()
        while len(buf) < size:
            chunk = self.sock.recv(size - len(buf))
            if not chunk:
                if buf:
                    raise ChannelClosed("connection closed mid-frame")
                return b""
            buf += chunk
        return bytes(buf)

    def close_write(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_WR)
        except OSError:
            pass


class LoopbackChannel:
    """One end of an in-memory, thread-safe byte pipe pair."""

    def __init__(self, inbox: queue.Queue, outbox: queue.Queue, timeout: float | None = 30.0):
        self._inbox = inbox
        self._outbox = outbox
        self._buf = bytearray()
        self._eof = False
        self.timeout = timeout

    def send(self, data: bytes) -> None:
        self._outbox.put(bytes(data))

    def recv_exact(self, size: int) -> bytes:
        while len(self._buf) < size and not self._eof:
            try:
                chunk = self._inbox.get(timeout=self.timeout)
            except queue.Empty:
                raise ChannelClosed("timed out waiting for peer") from None
            if chunk is None:
                self._eof = True
            else:
                self._buf += chunk
        if len(self._buf) < size:
            if self._buf:
                raise ChannelClosed("peer closed mid-frame")
            return b""
        out = bytes(self._buf[:size])
        del self._buf[:size]
        return out

    def close_write(self) -> None:
        self._outbox.put(None)


def loopback_pair(timeout: float | None = 30.0) -> tuple[LoopbackChannel, LoopbackChannel]:
    q1: queue.Queue = queue.Queue()
    q2: queue.Queue = queue.Queue()
    return LoopbackChannel(q1, q2, timeout), LoopbackChannel(q2, q1, timeout)


class RecordingChannel:
    """Wraps a channel and keeps the decoded messages it sends and receives."""

    def __init__(self, inner: Channel):
        self.inner = inner
        self.sent: list[Message] = []
        self.received: list[Message] = []

    def send(self, data: bytes) -> None:
        self.sent.append(decode(data))
        self.inner.send(data)

    def recv_exact(self, size: int) -> bytes:
        return self.inner.recv_exact(size)

    def close_write(self) -> None:
        self.inner.close_write()


def send_message(channel: Channel, msg: Message) -> None:
    channel.send(encode(msg))


def recv_message(channel: Channel) -> Message | None:
    """Read one frame; ``None`` when the peer has closed its side cleanly."""
    header = channel.recv_exact(_LEN.size)
    if not header:
        return None
    (length,) = _LEN.unpack(header)
    if length > MAX_PAYLOAD:
        raise MalformedFrame(f"declared payload length {length} exceeds {MAX_PAYLOAD}")
    payload = channel.recv_exact(length)
    if len(payload) != length:
        raise ChannelClosed("connection closed mid-frame")
    msg = decode(header + payload)
    if isinstance(channel, RecordingChannel):
        channel.received.append(msg)
    return msg


def _expect(channel: Channel, kind: type) -> Message:
    msg = recv_message(channel)
    if msg is None:
        raise ChannelClosed(f"peer closed while a {kind.__name__} was expected")
    if not isinstance(msg, kind):
        raise ProtocolOrder(f"expected {kind.__name__}, got {type(msg).__name__}")
    return msg


def run_session(role: Role, channel: Channel, inp: PartyInput, config: ProtocolConfig, rng: RngStream,
                *, share: bool = False) -> Verdict | None:
    """Execute one comparison over ``channel``.

    Message order: both parties send Hello; Bob sends his endpoint; in the
    symmetric variant Alice replies with hers; Alice sends a Verdict only when
    ``share`` is set. Each side half-closes when done. Returns the verdict
    this party is entitled to, or ``None`` for Bob when he learns nothing.
    """
    send_message(channel, Hello(config.variant, config.n, config.steps_for(role)))
    peer = _expect(channel, Hello)
    if peer.n != config.n or peer.variant != config.variant:
        channel.close_write()
        raise ConfigMismatch(
            f"peer has n={peer.n}, variant={peer.variant.name}; "
            f"we have n={config.n}, variant={config.variant.name}"
        )

    if role is Role.ALICE:
        state = alice_prepare(inp, config, rng)
        own = state.publish()
        B = _expect(channel, Endpoint).value
        if own is not None:
            send_message(channel, Endpoint(own))
        verdict = decide(state, B)
        if share:
            verdict = share_verdict(state)
            send_message(channel, VerdictMsg(verdict.a_less_than_b))
        channel.close_write()
        if recv_message(channel) is not None:
            raise ProtocolOrder("unexpected message after Bob's endpoint")
        return verdict

    state = bob_prepare(inp, config, rng)
    send_message(channel, Endpoint(state.publish()))
    if config.variant is Variant.SYMMETRIC:
        decide(state, _expect(channel, Endpoint).value)
    channel.close_write()
    msg = recv_message(channel)
    if isinstance(msg, VerdictMsg):
        receive_verdict(state, msg.a_less_than_b)
        msg = recv_message(channel)
    if msg is not None:
        raise ProtocolOrder(f"unexpected {type(msg).__name__} at end of session")
    return state.verdict


def run_loopback(a: int, b: int, config: ProtocolConfig, alice_rng: RngStream, bob_rng: RngStream,
                 *, share: bool = False, record: bool = False):
    """Run both roles over an in-memory channel in two threads.

    Returns ``(alice_verdict, bob_verdict)``, plus the two recording channels
    when ``record`` is true.
    """
    ca, cb = loopback_pair()
    if record:
        ca, cb = RecordingChannel(ca), RecordingChannel(cb)
    results: dict[str, object] = {}

    def bob_side() -> None:
        try:
            results["bob"] = run_session(Role.BOB, cb, PartyInput(b, Role.BOB), config, bob_rng)
        except BaseException as exc:  # surfaced in the caller's thread
            results["bob_error"] = exc

    t = threading.Thread(target=bob_side, daemon=True)
    t.start()
    try:
        alice = run_session(Role.ALICE, ca, PartyInput(a, Role.ALICE), config, alice_rng, share=share)
    finally:
        t.join()
    if "bob_error" in results:
        raise results["bob_error"]  # type: ignore[misc]
    out = (alice, results["bob"])
    return out + (ca, cb) if record else out
