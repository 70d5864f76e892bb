import numpy as np
import pytest
from scipy.stats import binom

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the terminal summary prints them all."""

    def record(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def exact_success_probability(n: int, alice_steps: int, bob_steps: int) -> float:
    """P(a < b | A < B) by convolving the gap law with the endpoint-difference law.

    Independent of the simulator: S_B - S_A equals 2 * Binomial(ma + mb, 1/2) - ma - mb.
    """
    total = alice_steps + bob_steps
    k = np.arange(total + 1)
    pk = binom.pmf(k, total, 0.5)
    y = 2 * k - total
    cdf = np.cumsum(pk)
    d = np.arange(-(n - 1), n)
    pd = (n - np.abs(d)) / n**2
    idx = np.searchsorted(y, -d, side="right")
    p_le = np.where(idx > 0, cdf[np.maximum(idx - 1, 0)], 0.0)
    joint = pd * (1 - p_le)  # P(b - a = d, Y > -d)
    return joint[d > 0].sum() / joint.sum()
