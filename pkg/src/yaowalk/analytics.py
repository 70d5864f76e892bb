"""Closed-form facts about the comparison protocol and its lower bounds.

With ``m`` steps per party and a tail exponent ``alpha`` in (1/2, 1), the
probability that Alice's verdict is right, given ``A < B``, is bounded below
by combining three factors:

* the tail term ``(1 - exp(-m**(2*alpha - 1) / 2))**2``, a Chernoff bound on
  both walks staying within ``m**alpha`` of their start;
* the pair term ``Q = (n - 2*m**alpha + 1)(n - 2*m**alpha) / (n**2 - n)``,
  the fraction of ordered pairs ``a < b`` that are at least ``2*m**alpha``
  apart;
* the factor ``1 - 1/n`` from ``P(a < b) / P(A < B)``.

:func:`lower_bound_main` multiplies the three; :func:`lower_bound_improved`
adds the ``(1/2)(1 - Q)(1 - 1/n)`` contribution of close pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import AlphaOutOfRange, EmptyAlphaRange, InvalidInput

GRID_POINTS = 512
EDGE_SHRINK = 1e-6
ALPHA_XTOL = 1e-9


def expected_abs_diff(n: int) -> Fraction:
    """E|a - b| for independent uniforms on {1..n}, as an exact rational."""
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    return Fraction(n * n - 1, 3 * n)


def expected_min(n: int) -> Fraction:
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    return n + 1 + Fraction((n + 1) * (1 - 4 * n), 6 * n)


def closeness_bound(n: int, t: int) -> float:
    """Upper bound ``2t/n`` on ``P(|a - b| < t)``.

    The bound is strict for every ``t >= 1``; it exceeds 1 once ``t > n/2``.
    """
    if n < 1 or t < 1:
        raise InvalidInput("n and t must be positive")
    return 2 * t / n


def _power(m: float, exponent: float) -> float:
    # m**exponent via logs; stays finite for m up to 1e15 and beyond
    return math.exp(exponent * math.log(m))


def _check_tail_args(m: float, alpha: float) -> None:
    if m < 1:
        raise InvalidInput(f"m must be >= 1, got {m}")
    if not 0.5 <= alpha <= 1:
        raise InvalidInput(f"alpha must lie in [1/2, 1], got {alpha}")


def tail_bound_simple(m: float, alpha: float) -> float:
    """``exp(-m**(2*alpha - 1) / 2)``, bounding ``P(S_m >= m**alpha)``."""
    _check_tail_args(m, alpha)
    return math.exp(-_power(m, 2 * alpha - 1) / 2)


def _log_cosh_deficit(x: float) -> float:
    """``ln cosh x - x**2/2``, which is never positive."""
    if abs(x) < 1e-2:
        x2 = x * x
        return -x2 * x2 / 12 + x2**3 / 45
    # cosh(x) - 1 == 2 sinh(x/2)**2 keeps the log accurate near zero
    return math.log1p(2 * math.sinh(x / 2) ** 2) - x * x / 2


def tail_bound_cosh(m: float, alpha: float) -> float:
    """``exp(-m**(2*alpha - 1) + m * ln cosh(m**(alpha - 1)))``.

    This is the Chernoff bound before ``ln cosh x <= x**2/2`` is applied. It is
    evaluated as the simple bound times ``exp(m * (ln cosh x - x**2/2))`` so
    that it never exceeds :func:`tail_bound_simple`, even after rounding.
    """
    _check_tail_args(m, alpha)
    return tail_bound_simple(m, alpha) * math.exp(m * _log_cosh_deficit(_power(m, alpha - 1)))


def tail_term(m: float, alpha: float) -> float:
    return (1 - tail_bound_simple(m, alpha)) ** 2


def pair_fraction(n: int, gap: float) -> float:
    """``(n - gap + 1)(n - gap) / (n**2 - n)``.

    For integer ``gap`` this is exactly ``P(b - a >= gap | a < b)``.
    """
    if n < 2:
        raise InvalidInput(f"n must be >= 2, got {n}")
    if gap >= n:
        raise AlphaOutOfRange(f"gap {gap} must be below n = {n}")
    return (n - gap + 1) * (n - gap) / (n * n - n)


def q_term(n: int, m: float, alpha: float) -> float:
    """Pair term with real-valued ``m**alpha``; raises when ``2*m**alpha >= n``."""
    return pair_fraction(n, 2 * _power(m, alpha))


@dataclass(frozen=True)
class BoundQuery:
    n: int
    m: float
    alpha: float
    lam: float | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidInput(f"n must be >= 2, got {self.n}")
        if self.m < 1:
            raise InvalidInput(f"m must be >= 1, got {self.m}")
        if not 0.5 < self.alpha < 1:
            raise InvalidInput(f"alpha must lie in (1/2, 1), got {self.alpha}")
        if self.lam is not None:
            target = self.n ** self.lam
            if abs(self.m - target) / target >= 1e-9:
                raise InvalidInput(f"m = {self.m} is inconsistent with n**lam = {target}")

    @classmethod
    def from_lambda(cls, n: int, lam: float, alpha: float) -> BoundQuery:
        return cls(n=n, m=n**lam, alpha=alpha, lam=lam)


@dataclass(frozen=True)
class BoundResult:
    value: float
    alpha_star: float
    q_term: float
    tail_term: float


def _components(q: BoundQuery) -> tuple[float, float]:
    return tail_term(q.m, q.alpha), q_term(q.n, q.m, q.alpha)


def lower_bound_main(q: BoundQuery) -> BoundResult:
    t, qq = _components(q)
    return BoundResult(t * qq * (1 - 1 / q.n), q.alpha, qq, t)


def lower_bound_improved(q: BoundQuery) -> BoundResult:
    t, qq = _components(q)
    return BoundResult((t * qq + 0.5 * (1 - qq)) * (1 - 1 / q.n), q.alpha, qq, t)


def alpha_range(n: int, m: float) -> tuple[float, float]:
    """Open interval of admissible alpha: ``(1/2, min(1, ln(n/2) / ln m))``.

    With ``m = n**lam`` the upper end is ``ln(n/2) / (lam ln n)``, the point
    where ``2*m**alpha`` reaches ``n``.
    """
    hi = 1.0 if m <= 1 else min(1.0, math.log(n / 2) / math.log(m))
    if hi <= 0.5:
        raise EmptyAlphaRange(f"no admissible alpha for n={n}, m={m}")
    return 0.5, hi


def maximize_bound(n: int, lam: float, *, select_by: str = "main") -> BoundResult:
    """Optimise the lower bound over admissible alpha for ``m = n**lam`` steps.

    ``alpha_star`` is the maximiser of ``select_by``'s objective and ``value``
    is always the improved bound evaluated there. The default,
    ``select_by="main"``, picks alpha by the product of the tail and pair
    terms; this is the convention under which the published n**(4/3) and
    n**(5/3) tables are reproduced. ``select_by="improved"`` returns the true
    maximum of the improved bound, which is somewhat higher for small n.

    The search is a 512-point grid over the interval (shrunk by 1e-6 at both
    ends) followed by bounded Brent refinement between the best grid point's
    neighbours.
    """
    if n < 4:
        raise InvalidInput(f"n must be >= 4, got {n}")
    if lam <= 0:
        raise InvalidInput(f"lambda must be positive, got {lam}")
    if select_by not in ("main", "improved"):
        raise ValueError(f"select_by must be 'main' or 'improved', got {select_by!r}")
    m = n**lam
    lo, hi = alpha_range(n, m)
    lo, hi = lo + EDGE_SHRINK, hi - EDGE_SHRINK
    if lo >= hi:
        raise EmptyAlphaRange(f"admissible alpha interval for n={n}, lambda={lam} is too narrow")
    from scipy.optimize import minimize_scalar

    objective = lower_bound_main if select_by == "main" else lower_bound_improved

    def score(alpha: float) -> float:
        return objective(BoundQuery(n, m, alpha)).value

    step = (hi - lo) / (GRID_POINTS - 1)
    grid = [lo + i * step for i in range(GRID_POINTS)]
    values = [score(a) for a in grid]
    best = max(range(GRID_POINTS), key=values.__getitem__)
    a_lo, a_hi = grid[max(best - 1, 0)], grid[min(best + 1, GRID_POINTS - 1)]
    res = minimize_scalar(lambda a: -score(a), bounds=(a_lo, a_hi), method="bounded",
                          options={"xatol": ALPHA_XTOL})
    alpha_star = float(res.x) if -res.fun >= values[best] else grid[best]
    return lower_bound_improved(BoundQuery(n, m, alpha_star))
