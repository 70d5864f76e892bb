"""Transport-agnostic party state machines for the random-walk comparison.

Alice holds ``a`` and Bob holds ``b``, both in ``[1, n]``. Each walks from
their number; Bob publishes his endpoint ``B``. Alice concludes ``a < b``
iff ``A < B``. Variants:

* ``ASYMMETRIC``: Alice keeps ``A`` private, so only she learns the verdict.
* ``SYMMETRIC``: Alice publishes ``A`` too, and Bob decides independently.
* ``NOWALK``: Alice does not walk and compares her raw ``a`` against ``B``.

Ties (``A == B``) count as "not a < b".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import InvalidInput, ProtocolOrder
from .rng import RngStream
from .walks import WalkSpec, walk_endpoint_fast

DEFAULT_N = 8000
DEFAULT_STEPS = 160_000


class Variant(enum.IntEnum):
    ASYMMETRIC = 0
    SYMMETRIC = 1
    NOWALK = 2


class Role(enum.Enum):
    ALICE = "alice"
    BOB = "bob"


class Phase(enum.IntEnum):
    INIT = 0
    WALK_DONE = 1
    AWAITING_PEER = 2
    DECIDED = 3
    SHARED = 4


@dataclass(frozen=True)
class ProtocolConfig:
    n: int = DEFAULT_N
    alice_steps: int = DEFAULT_STEPS
    bob_steps: int = DEFAULT_STEPS
    variant: Variant = Variant.ASYMMETRIC

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidInput(f"n must be >= 2, got {self.n}")
        if self.alice_steps < 0 or self.bob_steps < 0:
            raise InvalidInput("step counts must be non-negative")
        if self.variant is Variant.NOWALK and self.alice_steps != 0:
            raise InvalidInput("the no-walk variant requires alice_steps == 0")

    @classmethod
    def nowalk(cls, n: int = DEFAULT_N, bob_steps: int = DEFAULT_STEPS) -> ProtocolConfig:
        return cls(n=n, alice_steps=0, bob_steps=bob_steps, variant=Variant.NOWALK)

    def steps_for(self, role: Role) -> int:
        return self.alice_steps if role is Role.ALICE else self.bob_steps


@dataclass(frozen=True)
class PartyInput:
    value: int
    role: Role


@dataclass(frozen=True)
class Verdict:
    """Outcome of a comparison.

    ``A`` is the value Alice compared (her raw ``a`` in the no-walk variant)
    and is ``None`` when the holder never saw it, e.g. Bob receiving a shared
    verdict in the asymmetric variant.
    """

    a_less_than_b: bool
    A: int | None
    B: int | None
    shared: bool = False

    @property
    def tie(self) -> bool:
        return self.A is not None and self.A == self.B


@dataclass
class SessionState:
    role: Role
    config: ProtocolConfig
    phase: Phase = Phase.INIT
    own_endpoint: int | None = field(default=None, repr=False)
    peer_endpoint: int | None = None
    verdict: Verdict | None = None

    @property
    def publishable(self) -> bool:
        return self.role is Role.BOB or self.config.variant is Variant.SYMMETRIC

    def public_endpoint(self) -> int | None:
        """The endpoint this party may reveal, or ``None`` if it is private."""
        if self.phase < Phase.WALK_DONE:
            raise ProtocolOrder("walk has not been performed yet")
        return self.own_endpoint if self.publishable else None

    def publish(self) -> int | None:
        """Release the public endpoint (if any) and wait for the peer."""
        out = self.public_endpoint()
        if self.phase == Phase.WALK_DONE:
            self.phase = Phase.AWAITING_PEER
        return out


def _prepare(role: Role, inp: PartyInput, config: ProtocolConfig, rng: RngStream) -> SessionState:
    if inp.role is not role:
        raise InvalidInput(f"expected a {role.value} input, got {inp.role.value}")
    if not 1 <= inp.value <= config.n:
        raise InvalidInput(f"private value {inp.value} outside [1, {config.n}]")
    state = SessionState(role=role, config=config)
    if role is Role.ALICE and config.variant is Variant.NOWALK:
        # compared directly, no walk is materialised
        state.own_endpoint = inp.value
    else:
        spec = WalkSpec(inp.value, config.steps_for(role))
        state.own_endpoint = walk_endpoint_fast(spec, rng).endpoint
    state.phase = Phase.WALK_DONE
    return state


def alice_prepare(inp: PartyInput, config: ProtocolConfig, rng: RngStream) -> SessionState:
    return _prepare(Role.ALICE, inp, config, rng)


def bob_prepare(inp: PartyInput, config: ProtocolConfig, rng: RngStream) -> SessionState:
    return _prepare(Role.BOB, inp, config, rng)


def decide(state: SessionState, peer_endpoint: int) -> Verdict:
    """Apply the rule ``a < b  iff  A < B`` from the holder's point of view."""
    if state.phase < Phase.WALK_DONE:
        raise ProtocolOrder("cannot decide before the local walk is done")
    if state.phase >= Phase.DECIDED:
        raise ProtocolOrder("session already decided")
    if state.role is Role.BOB and state.config.variant is not Variant.SYMMETRIC:
        raise ProtocolOrder("Bob decides only in the symmetric variant")
    if state.role is Role.ALICE:
        A, B = state.own_endpoint, peer_endpoint
    else:
        A, B = peer_endpoint, state.own_endpoint
    state.peer_endpoint = peer_endpoint
    state.verdict = Verdict(A < B, A, B)
    state.phase = Phase.DECIDED
    return state.verdict


def share_verdict(state: SessionState) -> Verdict:
    """Mark Alice's verdict as shared with Bob; repeated calls are idempotent."""
    if state.phase < Phase.DECIDED or state.verdict is None:
        raise ProtocolOrder("nothing to share before a decision")
    if not state.verdict.shared:
        state.verdict = Verdict(state.verdict.a_less_than_b, state.verdict.A, state.verdict.B, shared=True)
    state.phase = Phase.SHARED
    return state.verdict


def receive_verdict(state: SessionState, a_less_than_b: bool) -> Verdict:
    """Record a verdict Alice chose to share (Bob's side)."""
    if state.role is not Role.BOB or state.phase < Phase.WALK_DONE:
        raise ProtocolOrder("only a prepared Bob session can receive a verdict")
    if state.verdict is not None and state.verdict.a_less_than_b != a_less_than_b:
        raise ProtocolOrder("shared verdict disagrees with the locally computed one")
    A = state.verdict.A if state.verdict is not None else None
    state.verdict = Verdict(a_less_than_b, A, state.own_endpoint, shared=True)
    state.phase = Phase.SHARED
    return state.verdict


def run_local(a: int, b: int, config: ProtocolConfig, alice_rng: RngStream, bob_rng: RngStream,
              *, share: bool = False) -> tuple[Verdict, Verdict | None]:
    """Run both parties in-process; returns Alice's and Bob's verdicts."""
    alice = alice_prepare(PartyInput(a, Role.ALICE), config, alice_rng)
    bob = bob_prepare(PartyInput(b, Role.BOB), config, bob_rng)
    A = alice.publish()
    B = bob.publish()
    verdict = decide(alice, B)
    bob_verdict = decide(bob, A) if A is not None else None
    if share:
        receive_verdict(bob, share_verdict(alice).a_less_than_b)
        bob_verdict = bob.verdict
    return verdict, bob_verdict
