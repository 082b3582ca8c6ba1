"""Command-line entry point: `darpline <command> ...` (or `python -m darpline`)."""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import analysis
from .adversary import (
    AdversaryConfig,
    AdversaryError,
    ParameterError,
    gen_luring,
    gen_nowaiting_lb,
    gen_theta_gt2,
    gen_waiting_lb,
    run_general_lower_bound,
)
from .model import (
    InstanceError,
    ParseError,
    fmt12,
    parse_instance,
    serialize_instance,
    validate_instance,
)
from .offline import OfflineQuery, SearchLimitExceeded, opt, optimal_schedule
from .online import (
    GreedyReplan,
    Ignore,
    OnlineAlgorithm,
    SimulationError,
    SmarterStart,
    Smartstart,
    eagerize,
    simulate,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- helpers


@dataclass(frozen=True)
class AlgorithmChoice:
    kind: str
    theta: float | None

    @property
    def label(self) -> str:
        return self.kind if self.theta is None else f"{self.kind}:{fmt12(self.theta)}"

    def build(self) -> OnlineAlgorithm:
        if self.kind == "ignore":
            return Ignore()
        if self.kind == "replan":
            return GreedyReplan()
        if self.kind == "smartstart":
            return Smartstart(self.theta)
        return SmarterStart(self.theta)


def parse_algorithm(text: str) -> AlgorithmChoice:
    kind, _, arg = text.partition(":")
    if kind in ("ignore", "replan"):
        if arg:
            raise UsageError(f"{kind} takes no parameter")
        return AlgorithmChoice(kind, None)
    if kind not in ("smartstart", "smarterstart"):
        raise UsageError(f"unknown algorithm {kind!r}; choose ignore, smartstart:T, smarterstart[:T], replan")
    if not arg:
        if kind == "smartstart":
            raise UsageError("smartstart needs a parameter, e.g. smartstart:2")
        return AlgorithmChoice(kind, analysis.theta_star())
    try:
        theta = float(arg)
    except ValueError:
        raise UsageError(f"bad theta {arg!r}") from None
    if not theta > 1:
        raise DomainError(f"theta must exceed 1, got {arg}")
    return AlgorithmChoice(kind, theta)


def read_instance(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)
        print(f"wrote {out}")


# ---------------------------------------------------------------- commands


def cmd_opt(args) -> int:
    inst = validate_instance(read_instance(args.file))
    sol = optimal_schedule(OfflineQuery(0.0, 0.0, inst.requests, inst.capacity))
    print(f"OPT {fmt12(sol.makespan)}")
    for ev in sol.schedule.events:
        print(f"t={fmt12(ev.time)} {ev.kind} {ev.request} at {fmt12(ev.position)}")
    return EXIT_OK


def cmd_run(args) -> int:
    choice = parse_algorithm(args.algorithm)
    inst = read_instance(args.file)
    alg = choice.build()
    if args.eager:
        alg = eagerize(alg)
    res = simulate(alg, inst)
    best = opt(inst)
    print(f"algorithm {alg.name}")
    print(f"ALG {fmt12(res.completion_time)}")
    print(f"OPT {fmt12(best)}")
    print(f"ratio {fmt12(analysis.ratio(res.completion_time, best))}")
    for rec in res.schedule_records:
        print(f"schedule {rec.index} t={fmt12(rec.start_time)} p={fmt12(rec.start_position)}")
    right = max([0.0] + [p for r in inst.requests for p in (r.origin, r.destination)])
    if right > 0:
        hit = res.trajectory.first_reach(right)
        shown = "never" if hit is None else f"t={fmt12(hit)}"
        print(f"reaches x+={fmt12(right)} at {shown}")
    status = EXIT_OK
    if choice.theta is not None and choice.kind == "smarterstart" and not args.eager:
        report = analysis.audit_simulation(res, inst, choice.theta)
        print(f"audit {'pass' if report.passed else 'FAIL'}")
        print(report.summary())
        if not report.passed:
            status = EXIT_INTERNAL
    return status


def cmd_adversary(args) -> int:
    choice = parse_algorithm(args.algorithm)
    try:
        cfg = AdversaryConfig(
            **({} if args.rho is None else {"rho": args.rho}), capacity=args.capacity
        )
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    tr = run_general_lower_bound(eagerize(choice.build()), cfg)
    if args.out:
        base = Path(args.out)
        write_atomic(base.with_suffix(".log"), tr.log_text())
        write_atomic(base.with_suffix(".instance"), serialize_instance(tr.instance()))
        print(f"wrote {base.with_suffix('.log')} and {base.with_suffix('.instance')}")
    else:
        sys.stdout.write(tr.log_text())
    print(f"outcome {tr.outcome}")
    print(f"ALG {fmt12(tr.alg_completion)}")
    print(f"OPT {fmt12(tr.opt_value)}")
    print(f"ratio {fmt12(tr.ratio)}")
    if abs(tr.claimed_opt - tr.opt_value) > 1e-6:
        print(f"claimed OPT {fmt12(tr.claimed_opt)} disagrees with solver", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if tr.ratio >= cfg.rho - 1e-6 else EXIT_INTERNAL


GENERATORS: dict[str, Callable] = {
    "waiting": gen_waiting_lb,
    "nowaiting": gen_nowaiting_lb,
    "gt2": gen_theta_gt2,
}


def cmd_gen(args) -> int:
    if args.family == "luring":
        inst = gen_luring(args.q, args.eps, args.theta, capacity=args.capacity)
    elif args.family == "gt2":
        inst = gen_theta_gt2(args.theta, args.eps, capacity=args.capacity, defer_final=args.defer_final)
    else:
        inst = GENERATORS[args.family](args.theta, args.eps, capacity=args.capacity)
    emit(serialize_instance(inst), args.out)
    return EXIT_OK


def parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must look like lo:hi:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    return analysis.theta_grid(lo, hi, step)


def cmd_sweep(args) -> int:
    try:
        grid = parse_grid(args.grid)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    rows = analysis.sweep_theta(grid, args.eps, workers=args.workers)
    emit(analysis.sweep_csv_text(rows), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    c = analysis.solve_constants()
    lo, hi = c.rho_lb.bracket
    print(f"rho_lb={fmt12(c.rho_lb.value)} bracket=[{fmt12(lo)}, {fmt12(hi)}]")
    lo, hi = c.theta_star.bracket
    print(f"theta_star={fmt12(c.theta_star.value)} bracket=[{fmt12(lo)}, {fmt12(hi)}]")
    print(f"rho_star={fmt12(c.rho_star)}")
    return EXIT_OK


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="darpline", description="Online dial-a-ride on the line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("opt", help="solve an instance offline")
    p.add_argument("file")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("run", help="simulate an online algorithm")
    p.add_argument("algorithm", help="ignore | smartstart:T | smarterstart[:T] | replan")
    p.add_argument("file")
    p.add_argument("--eager", action="store_true", help="wrap the algorithm to deliver full loads directly")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("adversary", help="play the lower-bound construction")
    p.add_argument("algorithm")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--capacity", type=int, default=1)
    p.add_argument("--out", help="write <out>.log and <out>.instance")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("gen", help="write a generator instance")
    p.add_argument("family", choices=["waiting", "nowaiting", "gt2", "luring"])
    p.add_argument("theta", type=float)
    p.add_argument("eps", type=float)
    p.add_argument("--q", type=float, default=1.0, help="luring target")
    p.add_argument("--capacity", type=int, default=1)
    p.add_argument("--defer-final", action="store_true", help="gt2: release the last request after the first schedule")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sweep", help="bound curves and simulated ratios over a theta grid (CSV)")
    p.add_argument("grid", help="lo:hi:step")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="print the certified constants")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ParseError, InstanceError, ParameterError, SearchLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (AdversaryError, SimulationError, ArithmeticError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
