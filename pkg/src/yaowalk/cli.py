"""Command-line entry point: ``yaowalk <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import math
import socket
import sys
import time

from . import analytics, baselines, simlab
from .errors import YaoWalkError
from .protocol import PartyInput, ProtocolConfig, Role, Variant, Verdict
from .rng import ALICE, BOB, RngStream
from .transport import SocketChannel, run_loopback, run_session

VARIANTS = {"asym": Variant.ASYMMETRIC, "sym": Variant.SYMMETRIC, "nowalk": Variant.NOWALK}


def _row(*fields) -> None:
    csv.writer(sys.stdout, lineterminator="\n").writerow(fields)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _steps(args) -> int:
    if args.steps is not None:
        return args.steps
    if args.lam is not None:
        return round(args.n**args.lam)
    raise SystemExit("one of --steps or --lambda is required")


def cmd_bound(args) -> None:
    if args.table:
        _row("n", "bound", "alpha_star")
        for n, value, alpha in simlab.table_rows(args.table):
            _row(n, f"{value:.4f}", f"{alpha:.4f}")
        return
    if args.n is None:
        raise SystemExit("--n is required unless --table is given")
    if args.lam is not None:
        m, lam = args.n**args.lam, args.lam
    elif args.steps is not None:
        m, lam = float(args.steps), math.log(args.steps) / math.log(args.n)
    else:
        raise SystemExit("one of --lambda or --steps is required")
    fn = analytics.lower_bound_main if args.formula == "main" else analytics.lower_bound_improved
    if args.alpha is not None:
        res = fn(analytics.BoundQuery(args.n, m, args.alpha))
    else:
        best = analytics.maximize_bound(args.n, lam)
        res = fn(analytics.BoundQuery(args.n, args.n**lam, best.alpha_star))
    _row(_fmt(res.value), _fmt(res.alpha_star), _fmt(res.q_term), _fmt(res.tail_term))


def cmd_simulate(args) -> None:
    steps = _steps(args)
    variant = simlab.SimVariant(args.variant)
    alice_steps = 0 if variant is simlab.SimVariant.NOWALK else steps
    plan = simlab.SimPlan(args.n, alice_steps, steps, args.trials, args.seed, variant, args.stepwise)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            s = simlab.write_trials_csv(plan, fh)
    else:
        s = simlab.run_simulation(plan)
    print(f"trials={s.trials_total} A_lt_B={s.trials_A_lt_B} ties={s.equality_count} "
          f"estimate={s.estimate:.6f} stderr={s.stderr:.6f} guess_rate={s.guess_rate:.6f}")


def cmd_tables(args) -> None:
    sys.stdout.write(simlab.reproduce_tables(args.mc_trials, args.seed))


def _parse_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    return host or "127.0.0.1", int(port)


def _open_channel(args) -> tuple[SocketChannel, socket.socket | None]:
    if args.listen:
        srv = socket.create_server(_parse_addr(args.listen))
        host, port = srv.getsockname()[:2]
        print(f"listening={host}:{port}", file=sys.stderr, flush=True)
        srv.settimeout(args.timeout)
        conn, _ = srv.accept()
        conn.settimeout(args.timeout)
        return SocketChannel(conn), srv
    deadline = time.monotonic() + args.timeout
    while True:
        try:
            conn = socket.create_connection(_parse_addr(args.connect), timeout=args.timeout)
            return SocketChannel(conn), None
        except OSError:
            if time.monotonic() > deadline:
                raise
            time.sleep(0.05)


def _print_verdict(v: Verdict | None, variant: Variant, verbose: bool) -> None:
    if v is None:
        print("verdict=unknown")
    else:
        print("verdict=a<b" if v.a_less_than_b else "verdict=a>=b")
    if verbose and v is not None:
        if v.B is not None:
            print(f"B={v.B}")
        if variant is Variant.SYMMETRIC and v.A is not None:
            print(f"A={v.A}")


def cmd_compare(args) -> None:
    role = Role(args.role)
    variant = VARIANTS[args.variant]
    if args.share and role is not Role.ALICE:
        raise SystemExit("--share is only meaningful for Alice")
    alice_steps = 0 if variant is Variant.NOWALK else args.steps
    config = ProtocolConfig(args.n, alice_steps, args.steps, variant)
    rng = RngStream(args.seed, ALICE if role is Role.ALICE else BOB)
    channel, server = _open_channel(args)
    try:
        v = run_session(role, channel, PartyInput(args.value, role), config, rng, share=args.share)
    finally:
        channel.sock.close()
        if server is not None:
            server.close()
    _print_verdict(v, variant, args.verbose)


def cmd_compare_local(args) -> None:
    variant = VARIANTS[args.variant]
    alice_steps = 0 if variant is Variant.NOWALK else args.steps
    config = ProtocolConfig(args.n, alice_steps, args.steps, variant)
    alice, bob = run_loopback(args.a, args.b, config, RngStream(args.seed, ALICE), RngStream(args.seed, BOB),
                              share=args.share)
    print("alice:", end=" ")
    _print_verdict(alice, variant, args.verbose)
    print("bob:", end=" ")
    _print_verdict(bob, variant, args.verbose)


def cmd_baseline(args) -> None:
    if args.guess_prob is not None:
        exact, stirling = baselines.guess_probability(args.guess_prob)
        _row("guess_prob", args.guess_prob, f"{exact:.8g}", f"{stirling:.8g}")
    if args.apriori is not None:
        p = baselines.apriori_guess_probability(args.apriori)
        _row("apriori", args.apriori, f"{p:.8g}", f"{math.log(args.apriori) / args.apriori:.8g}")
    if args.subinterval is not None:
        a, b, n = (int(x) for x in args.subinterval.split(","))
        res = baselines.subinterval_protocol(a, b, n)
        _row("subinterval", a, b, n, int(res.a_le_b), len(res.scheme.endpoints),
             f"{res.scheme.guess_probability():.8g}")
    if args.guess_prob is None and args.apriori is None and args.subinterval is None:
        raise SystemExit("choose at least one of --guess-prob, --apriori, --subinterval")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="yaowalk", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate or maximise the lower bound on P(a<b | A<B)")
    b.add_argument("--n", type=int)
    g = b.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--steps", type=int)
    b.add_argument("--alpha", type=float, help="evaluate at this alpha instead of maximising")
    b.add_argument("--formula", choices=["main", "improved"], default="improved")
    b.add_argument("--table", type=int, choices=[1, 2], help="emit a full bound table")
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("simulate", help="Monte Carlo estimate of P(a<b | A<B)")
    s.add_argument("--n", type=int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--steps", type=int)
    g.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--trials", type=int, default=10**5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--variant", choices=["both", "nowalk"], default="both")
    s.add_argument("--stepwise", action="store_true", help="simulate every step instead of sampling endpoints")
    s.add_argument("--csv", metavar="PATH")
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("tables", help="reproduce both bound tables as CSV")
    t.add_argument("--mc-trials", type=int, default=10**4)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_tables)

    c = sub.add_parser("compare", help="run one party of a session over TCP")
    c.add_argument("--role", choices=["alice", "bob"], required=True)
    c.add_argument("--value", type=int, required=True)
    c.add_argument("--n", type=int, default=8000)
    c.add_argument("--steps", type=int, default=160_000)
    c.add_argument("--variant", choices=list(VARIANTS), default="asym")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--listen", metavar="HOST:PORT")
    g.add_argument("--connect", metavar="HOST:PORT")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--share", action="store_true")
    c.add_argument("--verbose", action="store_true")
    c.add_argument("--timeout", type=float, default=30.0)
    c.set_defaults(func=cmd_compare)

    cl = sub.add_parser("compare-local", help="run both parties in one process")
    cl.add_argument("--a", type=int, required=True)
    cl.add_argument("--b", type=int, required=True)
    cl.add_argument("--n", type=int, default=8000)
    cl.add_argument("--steps", type=int, default=160_000)
    cl.add_argument("--variant", choices=list(VARIANTS), default="asym")
    cl.add_argument("--seed", type=int, default=0)
    cl.add_argument("--share", action="store_true")
    cl.add_argument("--verbose", action="store_true")
    cl.set_defaults(func=cmd_compare_local)

    bl = sub.add_parser("baseline", help="guess probabilities and the subinterval baseline")
    bl.add_argument("--guess-prob", type=int, metavar="M")
    bl.add_argument("--apriori", type=int, metavar="N")
    bl.add_argument("--subinterval", metavar="A,B,N")
    bl.set_defaults(func=cmd_baseline)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except YaoWalkError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
