"""Probabilistic comparison of private integers by random walks.

Two parties holding ``a`` and ``b`` in ``[1, n]`` each take a simple
symmetric random walk from their number and compare endpoints. No one-way
functions are involved; the verdict is right with probability close to 1
when the walk length is well below ``n**2``.
"""

from .analytics import (
    BoundQuery,
    BoundResult,
    closeness_bound,
    expected_abs_diff,
    expected_min,
    lower_bound_improved,
    lower_bound_main,
    maximize_bound,
    q_term,
    tail_bound_cosh,
    tail_bound_simple,
)
from .baselines import (
    Pmf,
    apriori_guess_probability,
    digit_decompose,
    guess_probability,
    inverse_transform,
    subinterval_protocol,
)
from .protocol import (
    PartyInput,
    ProtocolConfig,
    Role,
    SessionState,
    Variant,
    Verdict,
    alice_prepare,
    bob_prepare,
    decide,
    share_verdict,
)
from .rng import RngStream
from .simlab import SimPlan, SimSummary, compare_nowalk, guess_rate, reproduce_tables, run_simulation
from .transport import decode, encode, run_session
from .walks import WalkResult, WalkSpec, lazy_difference_walk, walk_endpoint_fast, walk_stepwise

__version__ = "0.1.0"
