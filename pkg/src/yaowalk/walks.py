"""Simple symmetric and lazy random walks on the integers.

Walks are never clamped to the public interval: a party starting at 3 may
finish at -400. Two engines produce the same endpoint law: a literal
step-by-step walk and a binomial shortcut (an m-step walk ends at
``start + 2 * Binomial(m, 1/2) - m``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .rng import RngStream

POSITION_LIMIT = 1 << 62

# Bits per chunk when stepping literally; bounds memory for long walks.
_CHUNK = 1 << 22
_LAZY_STEPS = np.array([-2, 0, 0, 2], dtype=np.int64)


@dataclass(frozen=True)
class WalkSpec:
    start: int
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise InvalidInput(f"steps must be non-negative, got {self.steps}")
        if abs(self.start) + self.steps >= POSITION_LIMIT:
            raise InvalidInput("start + steps would overflow 64-bit positions")


@dataclass(frozen=True)
class WalkResult:
    endpoint: int
    displacement: int


def walk_stepwise(spec: WalkSpec, rng: RngStream) -> WalkResult:
    """Take ``spec.steps`` fair +-1 steps, drawing exactly one coin flip per step."""
    heads = 0
    remaining = spec.steps
    while remaining:
        k = min(remaining, _CHUNK)
        heads += int(rng.coin_flips(k).sum(dtype=np.int64))
        remaining -= k
    disp = 2 * heads - spec.steps
    return WalkResult(spec.start + disp, disp)


def walk_endpoint_fast(spec: WalkSpec, rng: RngStream) -> WalkResult:
    if spec.steps == 0:
        return WalkResult(spec.start, 0)
    disp = 2 * int(rng.generator.binomial(spec.steps, 0.5)) - spec.steps
    return WalkResult(spec.start + disp, disp)


def lazy_difference_walk(steps: int, start_gap: int, rng: RngStream) -> int:
    """Simulate ``Y = B - A`` step by step: stay w.p. 1/2, move +-2 w.p. 1/4 each."""
    if steps < 0:
        raise InvalidInput(f"steps must be non-negative, got {steps}")
    y = start_gap
    remaining = steps
    while remaining:
        k = min(remaining, _CHUNK)
        y += int(_LAZY_STEPS[rng.generator.integers(0, 4, size=k)].sum())
        remaining -= k
    return y


def sample_displacements(steps: int, size: int, rng: RngStream, *, stepwise: bool = False) -> np.ndarray:
    """Displacements of ``size`` independent ``steps``-step walks.

    The default draws binomials; ``stepwise=True`` sums explicit coin flips,
    which is far slower but follows the walk literally.
    """
    if steps < 0:
        raise InvalidInput(f"steps must be non-negative, got {steps}")
    if steps == 0:
        return np.zeros(size, dtype=np.int64)
    if not stepwise:
        return 2 * rng.generator.binomial(steps, 0.5, size=size).astype(np.int64) - steps
    out = np.empty(size, dtype=np.int64)
    rows = max(1, _CHUNK // steps)
    for lo in range(0, size, rows):
        hi = min(size, lo + rows)
        if steps <= _CHUNK:
            bits = rng.generator.integers(0, 2, size=(hi - lo, steps), dtype=np.int8)
            out[lo:hi] = bits.sum(axis=1, dtype=np.int64)
        else:
            for i in range(lo, hi):
                out[i] = (walk_stepwise(WalkSpec(0, steps), rng).displacement + steps) // 2
    return 2 * out - steps


def sample_lazy_displacements(steps: int, size: int, rng: RngStream) -> np.ndarray:
    """``Y_m - Y_0`` for ``size`` lazy difference walks.

    Each lazy step is ``2 * (Binomial(2, 1/2) - 1)``, so m steps sum to
    ``2 * (Binomial(2m, 1/2) - m)``.
    """
    if steps < 0:
        raise InvalidInput(f"steps must be non-negative, got {steps}")
    if steps == 0:
        return np.zeros(size, dtype=np.int64)
    return 2 * (rng.generator.binomial(2 * steps, 0.5, size=size).astype(np.int64) - steps)
