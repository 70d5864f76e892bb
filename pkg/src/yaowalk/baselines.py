"""Reference points and reductions around the random-walk comparison.

* guess probabilities: how often the modal guess ``b = B`` is right, and the
  a-priori rate ``H_n / n`` when only the comparison outcome is known;
* the deterministic subinterval protocol, whose guess rate is ``~1/sqrt(n)``;
* an order-preserving CDF map for non-uniform private values;
* base-n digit decomposition for values beyond the interval.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInput, OddSteps, ValueNotInSupport


def guess_probability(steps: int) -> tuple[float, float]:
    """``(exact, stirling)`` chances that an even-length walk ends where it began.

    ``exact`` is ``C(m, m/2) / 2**m``, accumulated as the product of
    ``(2i - 1) / (2i)`` in log space; ``stirling`` is ``sqrt(2 / (pi m))``.
    """
    if steps < 2 or steps % 2:
        raise OddSteps(f"steps must be a positive even integer, got {steps}")
    i = np.arange(1, steps // 2 + 1, dtype=np.float64)
    exact = math.exp(np.log1p(-0.5 / i).sum())
    return exact, math.sqrt(2 / (math.pi * steps))


def apriori_guess_probability(n: int) -> float:
    """``H_n / n``, roughly ``ln(n) / n``."""
    if n < 1:
        raise InvalidInput(f"n must be positive, got {n}")
    return math.fsum(1 / k for k in range(1, n + 1)) / n


@dataclass(frozen=True)
class SubintervalScheme:
    """Partition of ``[1, n]`` given by the left endpoint of each piece."""

    n: int
    endpoints: tuple[int, ...]
    pivot: int

    def bounds(self) -> list[tuple[int, int]]:
        ends = list(self.endpoints[1:]) + [self.n + 1]
        return [(lo, hi - 1) for lo, hi in zip(self.endpoints, ends)]

    def locate(self, value: int) -> int:
        """Index of the piece containing ``value``."""
        return bisect.bisect_right(self.endpoints, value) - 1

    def guess_probability(self) -> float:
        """Observer's chance of guessing a uniform ``b`` from its piece alone."""
        return len(self.endpoints) / self.n


@dataclass(frozen=True)
class SubintervalVerdict:
    a_le_b: bool
    scheme: SubintervalScheme
    piece: int


def subinterval_scheme(a: int, n: int) -> SubintervalScheme:
    width = math.isqrt(n - 1) + 1 if n > 1 else 1  # ceil(sqrt(n))
    starts = set(range(1, n + 1, width))
    starts.add(a)
    return SubintervalScheme(n, tuple(sorted(starts)), a)


def subinterval_protocol(a: int, b: int, n: int) -> SubintervalVerdict:
    """Decide ``a <= b`` by having Bob name the piece that holds ``b``.

    Alice's ``a`` starts a piece, so every piece lies wholly in ``[a, n]`` or
    wholly below ``a``.
    """
    if n < 1 or not (1 <= a <= n and 1 <= b <= n):
        raise InvalidInput(f"a={a}, b={b} must lie in [1, {n}]")
    scheme = subinterval_scheme(a, n)
    piece = scheme.locate(b)
    return SubintervalVerdict(scheme.endpoints[piece] >= a, scheme, piece)


@dataclass(frozen=True)
class Pmf:
    support: tuple[int, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probabilities) or not self.support:
            raise InvalidInput("support and probabilities must be non-empty and equally long")
        if any(x >= y for x, y in zip(self.support, self.support[1:])):
            raise InvalidInput("support must be strictly increasing")
        if self.support[0] < 1:
            raise InvalidInput("support must lie in [1, N]")
        if any(p < 0 for p in self.probabilities):
            raise InvalidInput("probabilities must be non-negative")
        if abs(math.fsum(self.probabilities) - 1) > 1e-12:
            raise InvalidInput("probabilities must sum to 1")

    @classmethod
    def uniform(cls, size: int) -> Pmf:
        return cls(tuple(range(1, size + 1)), (1 / size,) * size)

    @classmethod
    def from_weights(cls, support: Sequence[int], weights: Sequence[float]) -> Pmf:
        total = math.fsum(weights)
        probs = [w / total for w in weights]
        # push the rounding residue onto the largest entry
        probs[probs.index(max(probs))] += 1 - math.fsum(probs)
        return cls(tuple(support), tuple(probs))

    def cdf(self, value: int) -> float:
        i = bisect.bisect_left(self.support, value)
        if i == len(self.support) or self.support[i] != value:
            raise ValueNotInSupport(f"{value} is not in the support")
        return math.fsum(self.probabilities[: i + 1])


def inverse_transform(pmf: Pmf, n_target: int, value: int) -> int:
    """Map ``value`` to ``max(1, round(n_target * F(value)))``.

    The map is non-decreasing, so comparisons of mapped values agree with
    comparisons of the originals up to ties. Discrete inputs cannot be made
    exactly uniform; the image is only approximately so.
    """
    if n_target < 1:
        raise InvalidInput(f"n_target must be positive, got {n_target}")
    return max(1, math.floor(n_target * pmf.cdf(value) + 0.5))


def digit_decompose(x: int, base_n: int) -> list[int]:
    """Least-significant-first digits of ``x`` in base ``base_n``."""
    if base_n < 2:
        raise InvalidInput(f"base must be >= 2, got {base_n}")
    if x < 0:
        raise InvalidInput(f"x must be non-negative, got {x}")
    digits = []
    while True:
        x, c = divmod(x, base_n)
        digits.append(c)
        if not x:
            return digits


def recompose(digits: Sequence[int], base_n: int) -> int:
    return sum(c * base_n**k for k, c in enumerate(digits))


def compare_digits(x: Sequence[int], y: Sequence[int]) -> int:
    """-1, 0 or 1 by comparing coefficients from the highest power down."""
    width = max(len(x), len(y))
    xs = list(x) + [0] * (width - len(x))
    ys = list(y) + [0] * (width - len(y))
    for cx, cy in zip(reversed(xs), reversed(ys)):
        if cx != cy:
            return -1 if cx < cy else 1
    return 0


__all__ = [
    "Pmf",
    "SubintervalScheme",
    "SubintervalVerdict",
    "apriori_guess_probability",
    "compare_digits",
    "digit_decompose",
    "guess_probability",
    "inverse_transform",
    "recompose",
    "subinterval_protocol",
    "subinterval_scheme",
]
