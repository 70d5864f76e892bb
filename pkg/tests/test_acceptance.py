"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import math
import random
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from yaowalk.analytics import (
    closeness_bound,
    expected_abs_diff,
    expected_min,
    maximize_bound,
    tail_bound_cosh,
    tail_bound_simple,
)
from yaowalk.baselines import guess_probability, subinterval_protocol
from yaowalk.protocol import ProtocolConfig, Variant
from yaowalk.rng import ALICE, BOB, RngStream
from yaowalk.simlab import SimPlan, compare_nowalk, guess_rate, run_simulation
from yaowalk.transport import Endpoint, Hello, VerdictMsg, decode, encode, run_loopback
from yaowalk.walks import sample_displacements, sample_lazy_displacements

TABLE_1 = {"bound": [0.586, 0.743, 0.859, 0.927, 0.963, 0.982, 0.991],
           "alpha": [0.574, 0.574, 0.568, 0.563, 0.557, 0.553, 0.549]}
TABLE_2 = {"bound": [0.453, 0.466, 0.514, 0.586, 0.667, 0.743, 0.807],
           "alpha": [0.500, 0.517, 0.526, 0.529, 0.530, 0.530, 0.529]}
TABLE_TOL = 0.005


def _table_check(lam, table):
    t0 = time.perf_counter()
    results = [maximize_bound(10**k, lam) for k in range(3, 10)]
    elapsed = time.perf_counter() - t0
    worst_v = max(abs(r.value - v) for r, v in zip(results, table["bound"]))
    worst_a = max(abs(r.alpha_star - a) for r, a in zip(results, table["alpha"]))
    ok = worst_v <= TABLE_TOL and worst_a <= TABLE_TOL and elapsed < 1.0
    return ok, f"max|dvalue|={worst_v:.4f} max|dalpha|={worst_a:.4f} time={elapsed:.3f}s"


def test_c01_table1(criterion):
    ok, detail = _table_check(4 / 3, TABLE_1)
    assert criterion("C1 table 1 regression", ok, detail), detail


def test_c02_table2(criterion):
    ok, detail = _table_check(5 / 3, TABLE_2)
    assert criterion("C2 table 2 regression", ok, detail), detail


def test_c03_simulation_n1000(criterion):
    t0 = time.perf_counter()
    s = run_simulation(SimPlan.symmetric(1000, 10**4, 10**5, seed=2024))
    elapsed = time.perf_counter() - t0
    ok = 0.88 <= s.estimate <= 0.92 and elapsed < 60
    detail = f"estimate={s.estimate:.4f}+-{s.stderr:.4f} time={elapsed:.2f}s"
    assert criterion("C3 n=1000 lambda=4/3 ~0.9", ok, detail), detail


def test_c04_simulation_n2000(criterion):
    n = 2000
    steps = round(n ** (4 / 3))
    s = run_simulation(SimPlan.symmetric(n, steps, 10**5, seed=2025))
    detail = f"steps={steps} estimate={s.estimate:.4f}+-{s.stderr:.4f} (need >= 0.98)"
    assert criterion("C4 n=2000 lambda=4/3 >= 0.98", s.estimate >= 0.98, detail), detail


def test_c05_simulation_lambda_5_3(criterion):
    s = run_simulation(SimPlan.symmetric(1000, 10**5, 10**5, seed=2026))
    detail = f"estimate={s.estimate:.4f}+-{s.stderr:.4f}"
    assert criterion("C5 n=1000 lambda=5/3 ~0.75", 0.72 <= s.estimate <= 0.78, detail), detail


def test_c06a_recommended_parameters_success(criterion):
    s = run_simulation(SimPlan.symmetric(8000, 160_000, 10**4, seed=2027))
    detail = f"estimate={s.estimate:.4f}+-{s.stderr:.4f} (need >= 0.97)"
    assert criterion("C6a n=8000 m=160000 success >= 0.97", s.estimate >= 0.97, detail), detail


def test_c06b_recommended_parameters_guess_rate(criterion):
    r = guess_rate(8000, 160_000, 10**6, seed=2028)
    detail = f"guess_rate={r:.5f}"
    assert criterion("C6b n=8000 m=160000 guess rate ~0.002", 0.0017 <= r <= 0.0023, detail), detail


def test_c07_exact_moment_oracles(criterion):
    ok = True
    for n in range(1, 201):
        a = np.arange(1, n + 1)
        diff = int(np.abs(np.subtract.outer(a, a)).sum())
        mins = int(np.minimum.outer(a, a).sum())
        ok &= expected_abs_diff(n) * n * n == diff and expected_min(n) * n * n == mins
    strict = True
    for n in range(1, 101):
        a = np.arange(1, n + 1)
        counts = np.bincount(np.abs(np.subtract.outer(a, a)).ravel(), minlength=n)
        below = np.cumsum(counts)  # below[t-1] = #{|a-b| < t}
        for t in range(1, n + 1):
            strict &= below[t - 1] / n**2 < closeness_bound(n, t)
    detail = f"moments_exact={ok} closeness_strict={strict}"
    assert criterion("C7 exact-moment oracles", ok and strict, detail), detail


def test_c08_tail_bound_validity(criterion):
    m, size = 10**4, 10**6
    d = sample_displacements(m, size, RngStream(2029))
    parts, ok = [], True
    for alpha in (0.55, 0.6, 0.75):
        p = float(np.mean(d > m**alpha))
        bound = tail_bound_simple(m, alpha)
        ok &= p <= bound + 3 * math.sqrt(p * (1 - p) / size)
        parts.append(f"a={alpha}:{p:.4f}<={bound:.4f}")
    grid = [(mm, al) for mm in (1, 2, 10, 100, 10**4, 10**6, 10**9, 10**15) for al in np.linspace(0.5, 1, 51)]
    dom = all(tail_bound_cosh(mm, al) <= tail_bound_simple(mm, al) for mm, al in grid)
    detail = " ".join(parts) + f" cosh<=simple on {len(grid)} points: {dom}"
    assert criterion("C8 tail-bound validity", ok and dom, detail), detail


def test_c09_msd_ratio(criterion):
    m, size = 10**4, 10**5
    x = sample_displacements(m, size, RngStream(2030, 1)).astype(float)
    y = sample_lazy_displacements(m, size, RngStream(2030, 2)).astype(float)
    rx, ry = np.mean(x**2) / m, np.mean(y**2) / (2 * m)
    ok = 0.95 <= rx <= 1.05 and 0.95 <= ry <= 1.05
    detail = f"E(X^2)/m={rx:.4f} E(Y^2)/2m={ry:.4f}"
    assert criterion("C9 mean squared displacement", ok, detail), detail


def test_c10_nowalk_dominance(criterion):
    both, nowalk = compare_nowalk(1000, 10**4, 10**5, seed=2031)
    se = math.hypot(both.stderr, nowalk.stderr)
    ok = nowalk.estimate >= both.estimate - 2 * se
    detail = f"nowalk={nowalk.estimate:.4f} both={both.estimate:.4f} 2se={2 * se:.4f}"
    assert criterion("C10 no-walk dominance", ok, detail), detail


def test_c11_lambda_two_does_not_converge(criterion):
    est = [run_simulation(SimPlan.symmetric(n, n * n, 10**5, seed=2032 + n)).estimate for n in (100, 300, 1000)]
    flat = max(est) - min(est) < 0.03
    ok = all(e < 0.75 for e in est) and flat
    detail = "estimates=" + ",".join(f"{e:.4f}" for e in est) + f" spread<0.03:{flat}"
    assert criterion("C11 lambda>=2 non-convergence", ok, detail), detail


def test_c12_stirling_and_guess_rate(criterion):
    ms = sorted({int(x) // 2 * 2 for x in np.logspace(2, 7, 30)})
    stirling_ok = all(abs(e - s) / e < 0.01 for e, s in map(guess_probability, ms))
    parts, rate_ok = [], True
    for m in (10**4, 160_000):
        exact = guess_probability(m)[0]
        r = guess_rate(1000, m, 10**6, seed=2040 + m)
        rate_ok &= abs(r - exact) / exact < 0.15
        parts.append(f"m={m}:{r:.5f}/{exact:.5f}")
    detail = f"stirling<1%:{stirling_ok} " + " ".join(parts)
    assert criterion("C12 Stirling guess formula", stirling_ok and rate_ok, detail), detail


def test_c13_subinterval_baseline(criterion):
    ok, counts = True, []
    for n in (16, 100, 400):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                ok &= subinterval_protocol(a, b, n).a_le_b == (a <= b)
        k = [len(subinterval_protocol(a, 1, n).scheme.endpoints) for a in range(1, n + 1)]
        ok &= all(abs(x - math.sqrt(n)) <= 2 for x in k)
        counts.append(f"n={n}:{min(k)}-{max(k)}")
    detail = "pieces " + " ".join(counts)
    assert criterion("C13 subinterval baseline", ok, detail), detail


def _cli(*args):
    return subprocess.Popen([sys.executable, "-m", "yaowalk", *args], stdout=subprocess.PIPE,
                            stderr=subprocess.PIPE, text=True)


def _parse(out):
    lines = dict(line.split("=", 1) for line in out.split())
    return lines["verdict"], lines.get("B"), lines.get("A")


def _fmt(v, variant):
    if v is None:
        return "unknown", None, None
    A = str(v.A) if variant is Variant.SYMMETRIC and v.A is not None else None
    return ("a<b" if v.a_less_than_b else "a>=b"), (str(v.B) if v.B is not None else None), A


def _two_process_session(cfg):
    n, f, g, variant, a, b, seed, share, alice_listens = cfg
    vname = {Variant.ASYMMETRIC: "asym", Variant.SYMMETRIC: "sym", Variant.NOWALK: "nowalk"}[variant]
    common = ["--n", str(n), "--variant", vname, "--seed", str(seed), "--verbose", "--timeout", "60"]
    alice_args = ["compare", "--role", "alice", "--value", str(a), "--steps", str(f), *common]
    bob_args = ["compare", "--role", "bob", "--value", str(b), "--steps", str(g), *common]
    if share:
        alice_args.append("--share")
    first, second = (alice_args, bob_args) if alice_listens else (bob_args, alice_args)
    p1 = _cli(*first, "--listen", "127.0.0.1:0")
    addr = p1.stderr.readline().strip().split("=", 1)[1]
    p2 = _cli(*second, "--connect", addr)
    out2, err2 = p2.communicate(timeout=120)
    out1, err1 = p1.communicate(timeout=120)
    if p1.returncode or p2.returncode:
        raise RuntimeError(f"child failed: {err1} {err2}")
    alice_out, bob_out = (out1, out2) if alice_listens else (out2, out1)
    return _parse(alice_out), _parse(bob_out)


def test_c14_wire_and_process_integration(criterion):
    rng = random.Random(2033)
    configs = []
    for _ in range(100):
        variant = rng.choice(list(Variant))
        n = rng.randint(2, 10_000)
        g = rng.choice([0, rng.randint(0, 50_000)])
        f = 0 if variant is Variant.NOWALK else rng.choice([g, rng.randint(0, 50_000)])
        configs.append((n, f, g, variant, rng.randint(1, n), rng.randint(1, n), rng.getrandbits(64),
                        rng.random() < 0.3, rng.random() < 0.5))
    with ThreadPoolExecutor(max_workers=8) as pool:
        observed = list(pool.map(_two_process_session, configs))
    mismatches = 0
    for cfg, (alice_out, bob_out) in zip(configs, observed):
        n, f, g, variant, a, b, seed, share, _ = cfg
        ref_a, ref_b = run_loopback(a, b, ProtocolConfig(n, f, g, variant), RngStream(seed, ALICE),
                                    RngStream(seed, BOB), share=share)
        mismatches += alice_out != _fmt(ref_a, variant) or bob_out != _fmt(ref_b, variant)

    transcripts_ok = True
    for seed in range(20):
        _, _, ca, cb = run_loopback(10, 20, ProtocolConfig(100, 500, 500), RngStream(seed, ALICE),
                                    RngStream(seed, BOB), record=True)
        sent = ca.sent + cb.sent
        transcripts_ok &= sum(isinstance(m, Endpoint) for m in sent) == 1
        transcripts_ok &= not any(isinstance(m, Endpoint) for m in ca.sent)

    gen = random.Random(2034)
    codec_ok = True
    for _ in range(10**4):
        kind = gen.randrange(3)
        if kind == 0:
            msg = Hello(gen.choice(list(Variant)), gen.getrandbits(64), gen.getrandbits(64))
        elif kind == 1:
            msg = Endpoint(gen.randint(-(2**63), 2**63 - 1))
        else:
            msg = VerdictMsg(gen.random() < 0.5)
        codec_ok &= decode(encode(msg)) == msg
    ok = mismatches == 0 and transcripts_ok and codec_ok
    detail = f"process mismatches={mismatches}/100 transcript_ok={transcripts_ok} codec_ok={codec_ok}"
    assert criterion("C14 wire/protocol integration", ok, detail), detail
