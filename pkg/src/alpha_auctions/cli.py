"""Command-line entry points: solve, sweep, enumerate, check, simulate,
analyze, serve, replay.

Every command is a pure function of its flags, input files, and seed; runs
with the same inputs produce byte-identical outputs.  Exit codes: 0 success,
2 usage error (argparse), 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys

import numpy as np

from .game import spec_for
from .monotonicity import (
    bias_window,
    evaluate_statements,
    nash_distance,
    t_value,
)
from .nash import enumerate_pure_nash, strictness
from .qre import (
    QreConvergenceError,
    SWEEP_CSV_HEADER,
    efficiency,
    solve_qre,
    standardized_bid_means,
    standardized_payoffs,
    sweep,
    write_sweep_csv,
)
from .session import BotPolicy, SessionConfig, run_session, session_csv_lines, write_event_log

EXIT_CONVERGENCE = 3

# Table-1 valuation structures, reduced: label -> (v_l, v_h, p_max)
STRUCTURES = {
    "1A": (20, 60, 160),
    "1B": (20, 220, 320),
    "2A": (200, 240, 290),
    "2B": (200, 400, 450),
    "3": (200, 400, 450),
    "4": (200, 240, 290),
}


def _spec_from_args(args):
    if args.structure:
        v_l, v_h, p_max = STRUCTURES[args.structure]
    else:
        if args.vl is None or args.vh is None or args.pmax is None:
            raise SystemExit("need --structure or all of --vl/--vh/--pmax")
        v_l, v_h, p_max = args.vl, args.vh, args.pmax
    return spec_for(args.auction, v_l, v_h, p_max)


def _lambda_grid(text: str):
    """Parse start:step:end into an inclusive ascending grid."""
    try:
        start, step, end = (float(x) for x in text.split(":"))
    except ValueError:
        raise SystemExit(f"bad lambda grid {text!r}; expected start:step:end") from None
    if step <= 0 or end < start:
        raise SystemExit(f"bad lambda grid {text!r}")
    count = int(round((end - start) / step))
    grid = [round(start + k * step, 12) for k in range(count + 1)]
    if grid[-1] < end - 1e-12:
        grid.append(end)
    return grid


def cmd_solve_qre(args) -> int:
    spec = _spec_from_args(args)
    try:
        prev = None
        steps = max(1, int(round(args.lam / 0.05))) if args.continuation and args.lam > 0 else 1
        for k in range(1, steps + 1):
            point = solve_qre(spec, args.lam * k / steps, init=prev,
                              damping=args.damping, tol=args.tol, max_iter=args.max_iter)
            prev = point.profile
    except QreConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    bid_l, bid_h = standardized_bid_means(spec, point.profile)
    pay_l, pay_h = standardized_payoffs(spec, point.profile)
    print(f"auction={spec.label} v=({spec.valuations.v_l},{spec.valuations.v_h}) p_max={spec.p_max}")
    print(f"lambda={point.lam:g} iterations={point.iterations} residual={point.residual:.3e}")
    print(f"efficiency_pct={efficiency(spec, point.profile):.4f}")
    print(f"mean_std_bid_lv={bid_l:.6f} mean_std_bid_hv={bid_h:.6f}")
    print(f"std_payoff_lv={pay_l:.6f} std_payoff_hv={pay_h:.6f}")
    if args.out:
        s_l, s_h = point.profile.arrays()
        with open(args.out, "w") as fh:
            fh.write("bid,sigma_l,sigma_h\n")
            for b in spec.bids.bids():
                fh.write(f"{b},{s_l[b]:.17g},{s_h[b]:.17g}\n")
        print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    spec = _spec_from_args(args)
    grid = _lambda_grid(args.lam)
    try:
        curve = sweep(spec, grid, continuation=not args.no_continuation,
                      damping=args.damping, tol=args.tol, max_iter=args.max_iter)
    except QreConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if args.out:
        write_sweep_csv(curve, args.out)
        print(f"wrote {args.out}")
    else:
        print(",".join(SWEEP_CSV_HEADER))
        for row in curve.rows:
            print(f"{spec.label},{spec.alpha},{spec.gamma},{spec.valuations.v_l},"
                  f"{spec.valuations.v_h},{spec.p_max},{row.lam:.6g},{row.efficiency_pct:.10g},"
                  f"{row.mean_std_bid_lv:.10g},{row.mean_std_bid_hv:.10g},"
                  f"{row.std_payoff_lv:.10g},{row.std_payoff_hv:.10g},"
                  f"{row.iterations},{row.residual:.6g}")
    return 0


def cmd_nash(args) -> int:
    spec = _spec_from_args(args)
    cap = args.cap if args.cap else max(64, spec.p_max)
    pure = enumerate_pure_nash(spec, cap=cap)
    print(f"auction={spec.label} v=({spec.valuations.v_l},{spec.valuations.v_h}) p_max={spec.p_max}")
    print(f"pure_nash_count={len(pure)}")
    for b_l, b_h in pure:
        print(f"pure_nash bid_l={b_l} bid_h={b_h} strictness={strictness(spec, b_l, b_h)}")
    return 0


def cmd_ee_check(args) -> int:
    spec = _spec_from_args(args)
    kind = spec.label
    if kind not in ("WB", "LB"):
        print("error: bias windows exist for extreme-price auctions only", file=sys.stderr)
        return 2
    window = bias_window(kind, spec, mirror=args.mirror)
    print(f"auction={kind} t_value={t_value(kind, spec, mirror=args.mirror)}")
    print(f"bid_window_lv={window.bid_window_lv} bid_window_hv={window.bid_window_hv}")
    print(f"payoff_cap={window.payoff_cap} payoff_floor={window.payoff_floor}")
    print(f"admissible_segment={list(window.admissible_segment)}")
    grid = _lambda_grid(args.lam)
    lam = grid[-1]
    extended = list(grid)
    while extended[-1] < args.lambda_max:
        extended.append(round(extended[-1] * 1.25, 9))
    prev = None
    tail_started = False
    pure = enumerate_pure_nash(spec, cap=max(64, spec.p_max))
    p_values = sorted({p for p, _ in pure})
    ok = True
    for lam in extended:
        try:
            point = solve_qre(spec, lam, init=prev)
        except QreConvergenceError as exc:
            print(f"record lambda={lam:g} error=non-convergence residual={exc.residual:.3e}")
            ok = False
            break
        prev = point.profile
        dist, best_p = nash_distance(spec, point.profile, p_values)
        statements = evaluate_statements(spec, point.profile, mirror=args.mirror)
        in_tail = dist < args.tail_threshold
        tail_started = tail_started or in_tail
        verdicts = " ".join(
            f"s{k}={'n/a' if v is None else ('pass' if v else 'FAIL')}"
            for k, v in sorted(statements.items())
        )
        print(f"record lambda={lam:g} nash_distance={dist:.4f} nearest_p={best_p} "
              f"tail={int(in_tail)} {verdicts}")
        if tail_started and not all(v for v in statements.values() if v is not None):
            ok = False
    print(f"tail_reached={tail_started} all_tail_statements_hold={ok and tail_started}")
    return 0 if (tail_started and ok) else 1


def cmd_simulate(args) -> int:
    cfg = SessionConfig(
        auction=args.auction,
        session_type=args.type,
        n_subjects=args.subjects,
        rng_seed=args.seed,
        periods=args.periods,
        session_id=args.session_id,
    )
    policy = BotPolicy.parse(args.bots)
    seats = {s: policy for s in range(1, args.subjects + 1)}
    session = run_session(cfg, seats)
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, f"{cfg.session_id}.csv")
    events_path = os.path.join(args.out_dir, f"{cfg.session_id}.events.jsonl")
    with open(csv_path, "w") as fh:
        fh.write("\n".join(session_csv_lines(session)) + "\n")
    write_event_log(session, events_path)
    print(f"wrote {csv_path}")
    print(f"wrote {events_path}")
    print(f"paid_period={session.paid_period}")
    return 0


def _analysis_artifacts(log_path: str, seed: int):
    """Deterministic analysis outputs for a session log, as named byte blobs."""
    from .analytics import (
        conditional_logit,
        fit_report_lines,
        parse_session_csv,
        played_vs_unplayed,
        standardize,
        summary_table,
        ventile_histogram,
    )
    import csv as _csv
    import io

    rows = parse_session_csv(log_path)
    artifacts = {}

    buf = io.StringIO()
    writer = _csv.writer(buf)
    writer.writerow(["auction", "structure", "role", "n", "mean_std_payoff", "sd_std_payoff",
                     "mean_std_bid", "sd_std_bid", "efficiency_rate", "equilibrium_rate"])
    for s in summary_table(rows):
        writer.writerow([s.auction, s.structure, s.role, s.n,
                         f"{s.mean_std_payoff:.6f}",
                         "" if s.sd_std_payoff is None else f"{s.sd_std_payoff:.6f}",
                         f"{s.mean_std_bid:.6f}",
                         "" if s.sd_std_bid is None else f"{s.sd_std_bid:.6f}",
                         f"{s.efficiency_rate:.6f}", f"{s.equilibrium_rate:.6f}"])
    artifacts["summary.csv"] = buf.getvalue().encode()

    buf = io.StringIO()
    writer = _csv.writer(buf)
    writer.writerow(["auction", "role", "ventile", "frequency"])
    for (auction, role), freqs in ventile_histogram(rows).items():
        for k, f in enumerate(freqs, start=1):
            writer.writerow([auction, role, k, f"{f:.6f}"])
    artifacts["ventiles.csv"] = buf.getvalue().encode()

    fit = conditional_logit(rows)
    artifacts["clogit.txt"] = ("\n".join(fit_report_lines(fit)) + "\n").encode()

    pvu = played_vs_unplayed(rows)
    lines = [f"unit={u} diff={d:.6f}" for u, d in pvu.units]
    lines.append(f"n_positive={pvu.n_positive} n_effective={pvu.n_effective} "
                 f"p_value={pvu.p_value:.8g}")
    artifacts["played_vs_unplayed.txt"] = ("\n".join(lines) + "\n").encode()
    return artifacts


def cmd_analyze(args) -> int:
    artifacts = _analysis_artifacts(args.log, args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    for name, blob in sorted(artifacts.items()):
        path = os.path.join(args.out_dir, name)
        with open(path, "wb") as fh:
            fh.write(blob)
        print(f"wrote {path}")
    return 0


def cmd_replay(args) -> int:
    artifacts = _analysis_artifacts(args.log, args.seed)
    mismatched = []
    for name, blob in sorted(artifacts.items()):
        digest = hashlib.sha256(blob).hexdigest()
        print(f"{name} sha256={digest}")
        if args.check_dir:
            path = os.path.join(args.check_dir, name)
            with open(path, "rb") as fh:
                if fh.read() != blob:
                    mismatched.append(name)
    if mismatched:
        print(f"MISMATCH: {', '.join(mismatched)}", file=sys.stderr)
        return 1
    if args.check_dir:
        print("byte-identical")
    return 0


def cmd_serve(args) -> int:
    from .service import serve
    addr = args.listen or os.environ.get("ALPHA_AUCTIONS_ADDR", "127.0.0.1:8080")
    host_addr, _, port = addr.partition(":")
    serve(host_addr or "127.0.0.1", int(port or 8080), static_dir=args.frontend)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alpha-auctions",
        description="Solvers, simulators, and a live-session service for "
                    "partnership-dissolution auctions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec_flags(p):
        p.add_argument("--auction", required=True, choices=["wb", "ab", "lb"])
        p.add_argument("--structure", choices=sorted(STRUCTURES), default=None,
                       help="Table-1 valuation structure label")
        p.add_argument("--vl", type=int, default=None)
        p.add_argument("--vh", type=int, default=None)
        p.add_argument("--pmax", type=int, default=None)

    def add_solver_flags(p):
        p.add_argument("--damping", type=float, default=0.5)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--max-iter", type=int, default=100_000)

    p = sub.add_parser("solve-qre", help="solve one logit equilibrium")
    add_spec_flags(p)
    add_solver_flags(p)
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    p.add_argument("--no-continuation", dest="continuation", action="store_false")
    p.add_argument("--out", default=None, help="write the profile as CSV")
    p.set_defaults(func=cmd_solve_qre)

    p = sub.add_parser("sweep", help="efficiency curve along a lambda grid")
    add_spec_flags(p)
    add_solver_flags(p)
    p.add_argument("--lam", "--lambda", dest="lam", required=True,
                   help="grid as start:step:end, e.g. 0:0.01:0.30")
    p.add_argument("--no-continuation", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("nash", help="enumerate pure equilibria")
    add_spec_flags(p)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_nash)

    p = sub.add_parser("ee-check", help="bias windows and QRE-tail statement checks")
    add_spec_flags(p)
    p.add_argument("--lam", "--lambda", dest="lam", default="0:0.01:0.30")
    p.add_argument("--lambda-max", type=float, default=40.0)
    p.add_argument("--tail-threshold", type=float, default=0.05)
    p.add_argument("--mirror", action="store_true",
                   help="use the reflection-consistent loser-bid t formula")
    p.set_defaults(func=cmd_ee_check)

    p = sub.add_parser("simulate", help="run a bot session and write its logs")
    p.add_argument("--auction", required=True, choices=["wb", "ab", "lb"])
    p.add_argument("--type", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--subjects", type=int, default=20)
    p.add_argument("--periods", type=int, default=40)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bots", default="uniform",
                   help="uniform | qre:LAM | ebr | fixed:BID")
    p.add_argument("--session-id", default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="summaries, ventiles, fits from a session CSV")
    p.add_argument("--log", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("replay", help="re-derive summaries and verify byte-identity")
    p.add_argument("--log", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-dir", default=None,
                   help="directory of previously written artifacts to compare against")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="host live sessions over HTTP/websocket")
    p.add_argument("--listen", default=None, help="host:port (or ALPHA_AUCTIONS_ADDR)")
    p.add_argument("--frontend", default=None,
                   help="directory of browser-client files to serve at /app")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
