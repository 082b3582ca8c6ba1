"""Bound curves, certified constants, Θ-sweeps, ratios and trace audits."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.optimize import bisect

from .adversary.generators import (
    GOLDEN,
    ParameterError,
    gen_nowaiting_lb,
    gen_theta_gt2,
    gen_waiting_lb,
    gt2_eps_prime,
    nowaiting_eps_prime,
)
from .model import TOL, Instance, fmt12
from .offline import makespan_profile, opt
from .online.algorithms import SmarterStart
from .online.kernel import OnlineAlgorithm, SimulationResult, simulate

SILVER = 1 + math.sqrt(2)

# Coefficients, highest degree first.
RHO_CUBIC = (4.0, -26.0, 39.0, -5.0)
THETA_QUARTIC = (3.0, -4.0, 0.0, -1.0, -4.0)  # f1 = f2 with denominators cleared


# ---------------------------------------------------------------- bound curves


def _need_theta(theta: float) -> None:
    if not theta > 1:
        raise ValueError(f"theta must exceed 1, got {theta}")


def f1(theta: float) -> float:
    _need_theta(theta)
    return (2 * theta**2 - theta + 1) / (theta**2 - 1)


def f2(theta: float) -> float:
    _need_theta(theta)
    return (3 * theta**2 + 3) / (2 * theta + 1)


def g1(theta: float) -> float:
    _need_theta(theta)
    return (3 * theta**2 - 2 * theta + 1) / (theta**2 - 1)


def g2(theta: float) -> float:
    _need_theta(theta)
    return 4 * theta / (theta + 1)


BOUNDS = {"f1": f1, "f2": f2, "g1": g1, "g2": g2}


def bound_value(kind: str, theta: float) -> float:
    try:
        fn = BOUNDS[kind]
    except KeyError:
        raise ValueError(f"unknown bound {kind!r}; choose from {sorted(BOUNDS)}") from None
    return fn(theta)


def upper_bound(theta: float) -> float:
    return max(f1(theta), f2(theta))


def gt2_bound(theta: float) -> float:
    """The lower-bound curve for theta > 2: g1 up to 1 + sqrt 2, g2 beyond."""
    if not theta > 2:
        raise ValueError(f"theta must exceed 2, got {theta}")
    return g1(theta) if theta <= SILVER else g2(theta)


def expected_ratio_nowaiting(theta: float, eps: float) -> float:
    """Exact SmarterStart ratio on the four-visit chaining instance."""
    e = nowaiting_eps_prime(theta, eps)
    return f2(theta) - eps - e * (theta - 1) / (2 * theta + 1)


def expected_ratio_gt2(theta: float, eps: float, *, defer_final: bool = False) -> float:
    """Exact SmarterStart ratio on the theta > 2 instance."""
    if theta < SILVER:
        return g1(theta) - eps * (theta - 1) * (4 * theta - 2) / (4 * (theta + 1) ** 2)
    if theta == SILVER or defer_final:
        return g2(theta) - eps * (theta - 1) ** 2 / (theta + 1) ** 2
    # the last request is absorbed into the second schedule
    e = gt2_eps_prime(theta, eps)
    return (3 * theta - 3 * e * (theta - 1)) / (theta + 1)


# ---------------------------------------------------------------- constants


@dataclass(frozen=True)
class Root:
    value: float
    bracket: tuple[float, float]


@dataclass(frozen=True)
class BoundConstants:
    rho_lb: Root
    theta_star: Root
    rho_star: float

    def __post_init__(self) -> None:
        if abs(np.polyval(RHO_CUBIC, self.rho_lb.value)) > 1e-9:
            raise ArithmeticError("rho_lb residual too large")
        if abs(f1(self.theta_star.value) - f2(self.theta_star.value)) > 1e-9:
            raise ArithmeticError("f1 and f2 differ at theta_star")


def real_roots(coeffs: Sequence[float], lo: float = 0.0, hi: float = 10.0, step: float = 0.01) -> list[Root]:
    """Roots in [lo, hi] found by a sign scan, each refined by bisection to 1e-12."""
    grid = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    vals = np.polyval(coeffs, grid)
    roots = []
    for a, b, va, vb in zip(grid, grid[1:], vals, vals[1:]):
        if va == 0:
            roots.append(Root(float(a), (float(a), float(a))))
        elif va * vb < 0:
            x = bisect(lambda z: np.polyval(coeffs, z), a, b, xtol=1e-12, rtol=4 * np.finfo(float).eps)
            roots.append(Root(float(x), (float(a), float(b))))
    return roots


@lru_cache(maxsize=1)
def solve_constants() -> BoundConstants:
    cubic = real_roots(RHO_CUBIC)
    if len(cubic) != 3:
        raise ArithmeticError(f"expected three real roots of the cubic, found {len(cubic)}")
    quartic = [r for r in real_roots(THETA_QUARTIC) if r.value > 1]
    if not quartic:
        raise ArithmeticError("no root above 1 for f1 = f2")
    theta = quartic[-1]
    return BoundConstants(rho_lb=cubic[1], theta_star=theta, rho_star=f1(theta.value))


def rho_lower_bound() -> float:
    return solve_constants().rho_lb.value


def theta_star() -> float:
    return solve_constants().theta_star.value


# ---------------------------------------------------------------- ratios


def ratio(alg_value: float, opt_value: float) -> float:
    if opt_value <= TOL:
        if alg_value <= TOL:
            return 1.0
        raise ZeroDivisionError("positive completion time against zero optimum")
    return alg_value / opt_value


@dataclass(frozen=True)
class RatioReport:
    ratios: tuple[float, ...]
    results: tuple[SimulationResult, ...]
    optima: tuple[float, ...]

    @property
    def supremum(self) -> float:
        return max(self.ratios, default=1.0)


def competitive_ratio(alg: OnlineAlgorithm, instances: Iterable[Instance]) -> RatioReport:
    ratios, results, optima = [], [], []
    for inst in instances:
        res = simulate(alg, inst)
        best = opt(inst)
        ratios.append(ratio(res.completion_time, best))
        results.append(res)
        optima.append(best)
    return RatioReport(tuple(ratios), tuple(results), tuple(optima))


# ---------------------------------------------------------------- sweeps

SWEEP_HEADER = ("theta", "f1", "f2", "g1", "g2", "sim_ratio_waiting", "sim_ratio_nowaiting", "sim_ratio_gt2")


@dataclass(frozen=True)
class SweepRow:
    theta: float
    f1: float
    f2: float
    g1: float | None
    g2: float | None
    sim_ratio_waiting: float | None
    sim_ratio_nowaiting: float | None
    sim_ratio_gt2: float | None

    def cells(self) -> list[str]:
        return ["" if v is None else fmt12(v) for v in (getattr(self, k) for k in SWEEP_HEADER)]


def _simulated(gen, theta: float, eps: float, **kw) -> float | None:
    try:
        inst = gen(theta, eps, **kw)
    except ParameterError:
        return None
    return ratio(simulate(SmarterStart(theta), inst).completion_time, opt(inst))


def sweep_row(theta: float, eps: float) -> SweepRow:
    return SweepRow(
        theta=theta,
        f1=f1(theta),
        f2=f2(theta),
        g1=g1(theta) if 2 < theta <= SILVER else None,
        g2=g2(theta) if theta >= SILVER else None,
        sim_ratio_waiting=_simulated(gen_waiting_lb, theta, eps) if theta < 2 else None,
        sim_ratio_nowaiting=_simulated(gen_nowaiting_lb, theta, eps) if GOLDEN <= theta <= 2 else None,
        sim_ratio_gt2=_simulated(gen_theta_gt2, theta, eps, defer_final=True) if theta > 2 else None,
    )


def theta_grid(lo: float, hi: float, step: float) -> list[float]:
    if not (lo > 1 and hi >= lo and step > 0):
        raise ValueError("grid needs 1 < lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def _row_args(args: tuple[float, float]) -> SweepRow:
    return sweep_row(*args)


def sweep_theta(grid: Sequence[float], eps: float = 1e-3, workers: int = 1) -> list[SweepRow]:
    """One row per grid value, in grid order, optionally computed in parallel."""
    for theta in grid:
        _need_theta(theta)
    jobs = [(float(t), eps) for t in grid]
    if workers <= 1:
        return [sweep_row(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_args, jobs))


def write_sweep_csv(rows: Sequence[SweepRow], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(row.cells())


def sweep_csv_text(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


# ---------------------------------------------------------------- audits


@dataclass(frozen=True)
class ScheduleExtremes:
    x_minus: float
    x_plus: float
    y: float
    y_minus: tuple[float, ...]
    y_plus: tuple[float, ...]


def schedule_extremes(result: SimulationResult, inst: Instance, optimum: float | None = None) -> ScheduleExtremes:
    points = [p for r in inst.requests for p in (r.origin, r.destination)]
    x_minus = min([0.0, *points])
    x_plus = max([0.0, *points])
    optimum = opt(inst) if optimum is None else optimum
    y = optimum - abs(x_minus) - x_plus
    y_minus, y_plus = [], []
    for rec in result.schedule_records:
        pts = [p for i in rec.requests for p in (result.requests[i].origin, result.requests[i].destination)]
        y_minus.append(min(pts))
        y_plus.append(max(pts))
    return ScheduleExtremes(x_minus, x_plus, y, tuple(y_minus), tuple(y_plus))


@dataclass(frozen=True)
class AuditCheck:
    name: str
    schedule: int
    margin: float  # bound minus observed value; negative means violated
    skipped: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.skipped or self.margin >= -TOL


@dataclass(frozen=True)
class AuditReport:
    theta: float
    checks: tuple[AuditCheck, ...]

    @property
    def failures(self) -> list[AuditCheck]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        names = sorted({c.name for c in self.checks})
        parts = []
        for name in names:
            mine = [c for c in self.checks if c.name == name]
            bad = sum(not c.passed for c in mine)
            low = min((c.margin for c in mine if not c.skipped), default=math.inf)
            parts.append(f"{name}: {'FAIL' if bad else 'pass'} (min margin {fmt12(low)})")
        return "\n".join(parts)


def _visited_range(result: SimulationResult, start: float, end: float) -> tuple[float, float]:
    traj = result.trajectory
    xs = [traj.position_at(start), traj.position_at(end)]
    xs += [x for t, x in traj.breakpoints if start <= t <= end]
    return min(xs), max(xs)


def audit_simulation(result: SimulationResult, inst: Instance, theta: float) -> AuditReport:
    """Check the per-schedule inequalities SmarterStart(theta) must satisfy."""
    _need_theta(theta)
    optimum = opt(inst)
    ext = schedule_extremes(result, inst, optimum)
    checks: list[AuditCheck] = []
    cap = inst.capacity
    for k, rec in enumerate(result.schedule_records):
        j = rec.index
        t_j, p_j, p_next = rec.start_time, rec.start_position, rec.end_position
        served = tuple(result.requests[i] for i in rec.requests)
        known = tuple(r for r in result.requests if r.release <= t_j + TOL)
        checks.append(AuditCheck("start-time", j, t_j - abs(p_next) / (theta - 1)))
        waiting_bound = makespan_profile(0.0, known, cap)(t_j) / (theta - 1)
        checks.append(AuditCheck("waiting-rule", j, t_j - waiting_bound))
        # a start that was actually delayed must sit exactly on the threshold
        idle_from = max([result.schedule_records[k - 1].end_time if k else 0.0] + [r.release for r in known])
        waited = t_j > idle_from + TOL
        checks.append(AuditCheck("waiting-tight", j, min(0.0, -abs(t_j - waiting_bound)), skipped=not waited))
        length = makespan_profile(float(p_j), served, cap)(t_j)
        checks.append(AuditCheck("schedule-length", j, (1 + (theta - 1) / (theta + 1)) * optimum - length))
        from_zero = makespan_profile(0.0, served, cap)(t_j)
        y_lo, y_hi = ext.y_minus[k], ext.y_plus[k]
        bound = abs(min(0.0, y_lo)) + max(0.0, y_hi) + ext.y
        checks.append(AuditCheck("from-origin", j, bound - from_zero))
        lo, hi = _visited_range(result, t_j, rec.end_time)
        if abs(ext.x_minus) <= ext.x_plus:
            reach = abs(p_j) + abs(p_j - p_next) + ext.y - abs(min(0.0, y_lo))
            checks.append(AuditCheck("rightmost", j, reach - hi))
        else:
            reach = abs(p_j) + abs(p_j - p_next) + ext.y - abs(min(0.0, -y_hi))
            checks.append(AuditCheck("rightmost", j, reach + lo, note="mirrored"))
    return AuditReport(theta, tuple(checks))
