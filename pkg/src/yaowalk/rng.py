"""Deterministic, splittable random streams keyed by ``(seed, stream_id)``."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

_U64 = (1 << 64) - 1

# Conventional stream ids for the two parties and the starting-point draws.
STARTS = 0
ALICE = 1
BOB = 2


def _mix(*keys: int) -> int:
    h = hashlib.blake2b(digest_size=8)
    for k in keys:
        h.update(int(k).to_bytes(16, "big", signed=True))
    return int.from_bytes(h.digest(), "big")


@dataclass
class RngStream:
    """A reproducible source of coin flips.

    Two streams with equal ``(seed, stream_id)`` yield identical sequences;
    streams with different ids are independent (they are seeded from distinct
    ``numpy.random.SeedSequence`` entropy). A stream is stateful and must not
    be shared between threads.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v <= _U64:
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {v}")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence([self.seed, self.stream_id])
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def child(self, *keys: int) -> RngStream:
        """Derive an independent sub-stream, e.g. ``stream.child(block_index)``."""
        return RngStream(self.seed, _mix(self.stream_id, *keys))

    def coin_flips(self, count: int) -> np.ndarray:
        """``count`` fair bits as an int8 array of zeros and ones."""
        return self.generator.integers(0, 2, size=count, dtype=np.int8)
