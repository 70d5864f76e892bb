"""Monte Carlo estimates of the protocol's conditional success probability.

Trials are processed in fixed blocks of :data:`BLOCK` trials. Block ``k``
draws its starting points, Alice's walks and Bob's walks from three
sub-streams of ``RngStream(seed)`` keyed by ``(party, k)``, so results do
not depend on evaluation order and two plans with the same seed share their
``(a, b)`` draws and Bob's walks trial by trial.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterator, TextIO

import numpy as np

from .analytics import maximize_bound
from .errors import InvalidInput, NoConditioningEvents, OddSteps
from .rng import ALICE, BOB, STARTS, RngStream
from .walks import sample_displacements

BLOCK = 1 << 16
TABLE_EXPONENTS = range(3, 10)
TABLE_LAMBDAS = {1: 4 / 3, 2: 5 / 3}
MC_MAX_N = 10**4


class SimVariant(enum.Enum):
    BOTH_WALK = "both"
    NOWALK = "nowalk"


@dataclass(frozen=True)
class SimPlan:
    n: int
    alice_steps: int
    bob_steps: int
    trials: int
    seed: int = 0
    variant: SimVariant = SimVariant.BOTH_WALK
    stepwise: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidInput(f"n must be positive, got {self.n}")
        if self.trials < 1:
            raise InvalidInput(f"trials must be positive, got {self.trials}")
        if self.alice_steps < 0 or self.bob_steps < 0:
            raise InvalidInput("step counts must be non-negative")
        if self.variant is SimVariant.NOWALK and self.alice_steps != 0:
            raise InvalidInput("the no-walk variant requires alice_steps == 0")

    @classmethod
    def symmetric(cls, n: int, steps: int, trials: int, seed: int = 0, **kw) -> SimPlan:
        return cls(n, steps, steps, trials, seed, **kw)


@dataclass(frozen=True)
class SimSummary:
    trials_total: int
    trials_A_lt_B: int
    trials_correct_given_A_lt_B: int
    equality_count: int
    trials_A_gt_B: int
    guess_hits: int

    @property
    def estimate(self) -> float:
        """Empirical P(a < b | A < B)."""
        if self.trials_A_lt_B == 0:
            raise NoConditioningEvents("no trial had A < B; increase trials")
        return self.trials_correct_given_A_lt_B / self.trials_A_lt_B

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials_A_lt_B)

    @property
    def guess_rate(self) -> float:
        return self.guess_hits / self.trials_total


@dataclass
class TrialBlock:
    first_trial: int
    a: np.ndarray
    b: np.ndarray
    A: np.ndarray
    B: np.ndarray


def iter_blocks(plan: SimPlan) -> Iterator[TrialBlock]:
    root = RngStream(plan.seed)
    for k, lo in enumerate(range(0, plan.trials, BLOCK)):
        size = min(BLOCK, plan.trials - lo)
        starts = root.child(STARTS, k).generator.integers(1, plan.n + 1, size=(2, size), dtype=np.int64)
        a, b = starts
        B = b + sample_displacements(plan.bob_steps, size, root.child(BOB, k), stepwise=plan.stepwise)
        if plan.variant is SimVariant.NOWALK:
            A = a.copy()
        else:
            A = a + sample_displacements(plan.alice_steps, size, root.child(ALICE, k), stepwise=plan.stepwise)
        yield TrialBlock(lo, a, b, A, B)


def summarize(blocks) -> SimSummary:
    total = lt = correct = eq = gt = hits = 0
    for blk in blocks:
        A_lt_B = blk.A < blk.B
        total += len(blk.a)
        lt += int(A_lt_B.sum())
        correct += int((A_lt_B & (blk.a < blk.b)).sum())
        eq += int((blk.A == blk.B).sum())
        gt += int((blk.A > blk.B).sum())
        hits += int((blk.B == blk.b).sum())
    return SimSummary(total, lt, correct, eq, gt, hits)


def run_simulation(plan: SimPlan) -> SimSummary:
    summary = summarize(iter_blocks(plan))
    if summary.trials_A_lt_B == 0:
        raise NoConditioningEvents(f"no trial had A < B in {plan.trials} trials")
    return summary


def compare_nowalk(n: int, bob_steps: int, trials: int, seed: int = 0) -> tuple[SimSummary, SimSummary]:
    """Both-walk and no-walk summaries over identical ``(a, b)`` draws and Bob walks."""
    if trials < 10**4:
        raise InvalidInput(f"the paired comparison needs at least 10^4 trials, got {trials}")
    both = run_simulation(SimPlan(n, bob_steps, bob_steps, trials, seed))
    nowalk = run_simulation(SimPlan(n, 0, bob_steps, trials, seed, SimVariant.NOWALK))
    return both, nowalk


def guess_rate(n: int, steps: int, trials: int, seed: int = 0) -> float:
    """Frequency with which Bob's public endpoint equals his private number."""
    if steps % 2:
        raise OddSteps(f"b == B is unreachable after an odd number of steps ({steps})")
    return run_simulation(SimPlan(n, 0, steps, trials, seed, SimVariant.NOWALK)).guess_rate


def write_trials_csv(plan: SimPlan, out: TextIO) -> SimSummary:
    """Per-trial CSV followed by a ``#`` summary line."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["trial", "a", "b", "A", "B", "a_lt_b", "A_lt_B"])
    blocks = []
    for blk in iter_blocks(plan):
        blocks.append(blk)
        idx = np.arange(blk.first_trial, blk.first_trial + len(blk.a))
        rows = np.column_stack([idx, blk.a, blk.b, blk.A, blk.B, blk.a < blk.b, blk.A < blk.B]).astype(np.int64)
        w.writerows(rows.tolist())
    s = summarize(blocks)
    est = f"{s.estimate:.6f}" if s.trials_A_lt_B else "nan"
    err = f"{s.stderr:.6f}" if s.trials_A_lt_B else "nan"
    out.write(
        f"# trials={s.trials_total} A_lt_B={s.trials_A_lt_B} correct={s.trials_correct_given_A_lt_B} "
        f"ties={s.equality_count} A_gt_B={s.trials_A_gt_B} guess_hits={s.guess_hits} "
        f"estimate={est} stderr={err}\n"
    )
    return s


def table_rows(table: int) -> list[tuple[int, float, float]]:
    lam = TABLE_LAMBDAS[table]
    rows = []
    for k in TABLE_EXPONENTS:
        r = maximize_bound(10**k, lam)
        rows.append((10**k, r.value, r.alpha_star))
    return rows


def reproduce_tables(mc_trials: int = 10**4, seed: int = 0) -> str:
    """CSV of both bound tables, with a Monte Carlo column for ``n <= 10^4``.

    Step counts for the simulation column are ``round(n**lambda)``.
    """
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["table", "lambda", "n", "bound", "alpha_star", "mc_estimate", "mc_stderr"])
    for table, lam in TABLE_LAMBDAS.items():
        for n, value, alpha in table_rows(table):
            mc = ["", ""]
            if mc_trials and n <= MC_MAX_N:
                s = run_simulation(SimPlan.symmetric(n, round(n**lam), mc_trials, seed))
                mc = [f"{s.estimate:.4f}", f"{s.stderr:.4f}"]
            w.writerow([table, f"{lam:.6f}", n, f"{value:.4f}", f"{alpha:.4f}", *mc])
    return out.getvalue()
