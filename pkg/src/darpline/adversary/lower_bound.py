"""Reactive lower-bound adversary for eager deterministic algorithms.

The adversary co-simulates the algorithm and, because algorithms publish
their committed motion, computes each trigger time (loading time, line
crossing, fixpoint, midpoint meeting) exactly on the extrapolated
trajectory before releasing the next request at that instant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ..model import TOL, Instance, Line, Request, Trajectory, first_crossing, fmt12
from ..offline import opt as offline_opt
from ..online.algorithms import Mirrored
from ..online.kernel import Kernel, OnlineAlgorithm

RHO_INTERVAL = (2.056, 2.06)
HORIZON = 1e6


class AdversaryError(RuntimeError):
    """The run reached a state the construction rules out (signals a bug)."""


class EagernessViolation(AdversaryError):
    """The algorithm did not deliver the full initial load directly."""


def _default_rho() -> float:
    from ..analysis import rho_lower_bound

    return rho_lower_bound()


def check_rho(rho: float) -> float:
    lo, hi = RHO_INTERVAL
    if not lo < rho < hi:
        raise ValueError(f"rho outside validated interval ({lo}, {hi})")
    return rho


@dataclass(frozen=True)
class AdversaryConfig:
    rho: float = field(default_factory=_default_rho)
    capacity: int = 1
    epsilon: float = 1e-3

    def __post_init__(self) -> None:
        check_rho(self.rho)
        if isinstance(self.capacity, bool) or not isinstance(self.capacity, int):
            raise ValueError("capacity must be a finite positive integer")
        if self.capacity < 1:
            raise ValueError("capacity ≥ 1 violated")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


# ---------------------------------------------------------------- formulas


def delta(rho: float) -> float:
    """Destination of the initial requests."""
    check_rho(rho)
    return (3 * rho**2 - 11) / (-3 * rho**3 + 15 * rho - 4)


def late_load_threshold(rho: float) -> float:
    """Loading at or after this time already costs ratio rho."""
    d = delta(rho)
    return rho * d - (d - 1)


def line_ell(t_l: float, rho: float) -> Line:
    if not t_l > 0:
        raise ValueError("t_L must be positive")
    return Line(4 - rho, -(2 * rho - 2) * t_l)


def critical_thresholds(t_l: float, t_r: float, rho: float) -> tuple[float, float]:
    """(t_R*, t_L*): earliest admissible service times of the right/left request."""
    if not 0 < t_l <= t_r:
        raise ValueError("need 0 < t_L <= t_R")
    return (2 * rho - 2) * t_l + (rho - 2) * t_r, (2 * rho - 2) * t_r + (rho - 2) * t_l


def critical_ratio_bound(rho: float) -> float:
    """Largest t_R / t_L for which the second stage still works."""
    return (4 * rho**2 - 30 * rho + 50) / (-8 * rho**2 + 50 * rho - 66)


def crossing_ratio_cap(rho: float) -> float:
    """Largest t_R / t_L any algorithm can produce (attained with t_L = 2)."""
    return (4 * rho - 5) / (6 - 2 * rho)


def too_late_line_coefficient(rho: float) -> float:
    return (3 * rho - 5) / (7 - 3 * rho)


def delay(
    t: float,
    position: float,
    first_served: bool,
    p0: float,
    p1: float,
    rho: float,
) -> float:
    """How far the server is behind the fastest completion of both critical requests."""
    if not first_served:
        return t + abs(position - p0) - (rho - 2) * abs(p0) - (2 * rho - 2) * abs(p1)
    return t + abs(position - p1) - (rho - 1) * abs(p0) - (2 * rho - 1) * abs(p1)


# ---------------------------------------------------------------- criticality


def tour_serves(
    waypoints: Sequence[float], requests: Sequence[Request], capacity: float
) -> bool:
    """Does the unit-speed tour from the origin through `waypoints` serve everything?

    The server greedily drops at destinations and picks up released requests
    whenever it passes their points.
    """
    waiting = set(range(len(requests)))
    carried: set[int] = set()
    t, x = 0.0, 0.0
    points = sorted({p for r in requests for p in (r.origin, r.destination)})

    def visit(p: float, now: float) -> None:
        for i in [i for i in carried if requests[i].destination == p]:
            carried.discard(i)
        for i in sorted(waiting):
            req = requests[i]
            if req.origin == p and req.release <= now + TOL and len(carried) < capacity:
                waiting.discard(i)
                if req.destination != p:
                    carried.add(i)

    visit(x, t)
    for target in waypoints:
        lo, hi = min(x, target), max(x, target)
        passed = [p for p in points if lo <= p <= hi]
        passed.sort(reverse=target < x)
        for p in passed:
            visit(p, t + abs(p - x))
        t, x = t + abs(target - x), target
    return not waiting and not carried


@dataclass(frozen=True)
class CriticalReport:
    t_l: float
    t_r: float
    tours_serve_all: bool
    unserved_at_t_r: bool
    position_between: bool
    right_late_enough: bool
    left_late_enough: bool
    ratio_within_bound: bool

    @property
    def passed(self) -> bool:
        return all(
            (
                self.tours_serve_all,
                self.unserved_at_t_r,
                self.position_between,
                self.right_late_enough,
                self.left_late_enough,
                self.ratio_within_bound,
            )
        )

    def failures(self) -> list[str]:
        names = {
            "tours_serve_all": "sweep tours",
            "unserved_at_t_r": "unserved at t_R",
            "position_between": "position at t_R",
            "right_late_enough": "right request timing",
            "left_late_enough": "left request timing",
            "ratio_within_bound": "t_R/t_L bound",
        }
        return [label for attr, label in names.items() if not getattr(self, attr)]


@dataclass(frozen=True)
class CriticalHistory:
    """What the criticality check needs to know about a run."""

    requests: tuple[Request, ...]  # everything released up to and including t_R
    trajectory: Trajectory
    service_times: dict[int, float]
    capacity: float


def check_critical(sigma_r: int, sigma_l: int, history: CriticalHistory, rho: float) -> CriticalReport:
    """Evaluate the five criticality properties for requests at indices sigma_r / sigma_l."""
    right, left = history.requests[sigma_r], history.requests[sigma_l]
    t_r, t_l = right.release, left.release
    if not 0 < t_l <= t_r:
        raise ValueError("need 0 < t_L <= t_R")
    known = [r for r in history.requests if r.release <= t_r + TOL]
    tours = tour_serves([-t_l, t_r], known, history.capacity) and tour_serves(
        [t_r, -t_l], known, history.capacity
    )
    served_r = history.service_times.get(sigma_r, math.inf)
    served_l = history.service_times.get(sigma_l, math.inf)
    pos = history.trajectory.position_at(t_r)
    t_r_star, t_l_star = critical_thresholds(t_l, t_r, rho)
    return CriticalReport(
        t_l=t_l,
        t_r=t_r,
        tours_serve_all=tours,
        unserved_at_t_r=served_r > t_r and served_l > t_r,
        position_between=-t_l - TOL <= pos <= t_r + TOL,
        right_late_enough=not served_r < served_l or served_r >= t_r_star - TOL,
        left_late_enough=not served_l < served_r or served_l >= t_l_star - TOL,
        ratio_within_bound=t_r / t_l <= critical_ratio_bound(rho) + TOL,
    )


# ---------------------------------------------------------------- transcript


@dataclass(frozen=True)
class StageTwoState:
    p0: float
    p1: float
    W: float
    t0_plus: float
    t_mid: float | None = None


@dataclass(frozen=True)
class AdversaryTranscript:
    rho: float
    capacity: int
    mirrored: bool
    released: tuple[tuple[Request, str], ...]
    trigger_times: dict[str, float]
    outcome: str
    alg_completion: float
    claimed_opt: float
    opt_value: float
    trajectory: Trajectory
    service_times: dict[int, float]
    log: tuple[str, ...]
    critical: CriticalReport | None = None
    stage_two: StageTwoState | None = None

    @property
    def ratio(self) -> float:
        return self.alg_completion / self.opt_value

    def instance(self) -> Instance:
        return Instance(self.capacity, tuple(r for r, _ in self.released))

    def log_text(self) -> str:
        return "".join(line + "\n" for line in self.log)


# ---------------------------------------------------------------- the game


class _Game:
    """One run of the construction in the frame where pos(1) <= 0."""

    def __init__(self, alg: OnlineAlgorithm, cfg: AdversaryConfig, mirrored: bool):
        self.cfg = cfg
        self.rho = cfg.rho
        self.mirrored = mirrored
        self.kernel = Kernel(Mirrored(alg) if mirrored else alg, cfg.capacity, HORIZON)
        self.released: list[tuple[Request, str]] = []
        self.triggers: dict[str, float] = {}
        self.log: list[str] = []

    def note(self, t: float, text: str) -> None:
        self.log.append(f"t={fmt12(t)} {text}")

    def release(self, reqs: list[Request], label: str) -> list[int]:
        t = reqs[0].release
        self.kernel.advance(t)
        ids = self.kernel.release_batch(reqs)
        for r in reqs:
            self.released.append((r, label))
            shown = r.mirrored() if self.mirrored else r
            self.note(t, f"release {label} {shown}")
        return ids

    def future(self) -> Kernel:
        return self.kernel.extrapolate()

    # -------------------------------------------------------- stage one

    def stage_one(self):
        rho, c = self.rho, self.cfg.capacity
        d = delta(rho)
        initial = self.release([Request(1.0, d, 1.0)] * c, "initial")
        fut = self.future()
        missing = [i for i in initial if i not in fut.pickups]
        if missing:
            raise AdversaryError("algorithm never loads the initial requests")
        t_l = max(fut.pickups[i] for i in initial)
        self.triggers["t_L"] = t_l
        self.note(t_l, f"all {c} initial requests loaded (t_L)")
        if any(fut.dropoffs[i] < t_l - TOL for i in initial):
            self.note(t_l, "initial requests delivered in parts: stage one ends")
            return "stage1-split", d
        if t_l >= late_load_threshold(rho) - TOL:
            self.note(t_l, "initial requests loaded late: stage one ends")
            return "stage1-late", d
        self.kernel.advance(t_l)
        left = self.release([Request(-t_l, -t_l, t_l)], "sigma_L")[0]
        fut = self.future()
        self._check_eager(fut, initial, t_l, d)
        t_r = first_crossing(fut.trajectory(), line_ell(t_l, rho), t_l, hold=True)
        if t_r is None:
            raise AdversaryError("no crossing with the line")
        t_r = max(t_r, t_l)
        self.triggers["t_R"] = t_r
        right = self.release([Request(t_r, t_r, t_r)], "sigma_R")[0]
        return "critical", (initial, left, right, t_l, t_r)

    def _check_eager(self, fut: Kernel, initial: list[int], t_l: float, d: float) -> None:
        done = t_l + (d - 1)
        traj = fut.trajectory()
        for i in initial:
            if abs(fut.dropoffs.get(i, math.inf) - done) > 1e-9:
                raise EagernessViolation(
                    f"initial request {i} delivered at {fut.dropoffs.get(i)} instead of {done}"
                )
        checkpoints = [t for t, _ in traj.breakpoints if t_l <= t <= done] + [t_l, done]
        for t in checkpoints:
            if abs(traj.position_at(t) - (1 + t - t_l)) > 1e-9:
                raise EagernessViolation(f"detour while delivering the full load at time {t}")

    # -------------------------------------------------------- stage two

    def stage_two(self, left: int, right: int, t_l: float, t_r: float):
        rho = self.rho
        fut = self.future()
        served = fut.dropoffs
        if left not in served or right not in served:
            raise AdversaryError("critical requests never served in extrapolation")
        first, second = (right, left) if served[right] < served[left] else (left, right)
        req = self.kernel.requests
        p0, p1 = req[first].origin, req[second].origin
        s = math.copysign(1.0, p0)
        t0 = 2 * abs(p1) + abs(p0)
        traj = fut.trajectory()
        tau0, tau1 = served[first], served[second]
        if tau1 <= t0 - TOL:
            raise AdversaryError("second critical request served before 2|p1|+|p0|")
        t_plus = self._fixpoint(traj, tau0, tau1, p0, p1, t0)
        W = max((rho - 1) * (t_plus - t0), 0.0)
        if tau0 > t_plus + TOL:
            raise AdversaryError("first critical request not served by the fixpoint time")
        self.triggers["W"] = W
        self.triggers["t0_plus"] = t_plus
        p_plus = p0 + s * W / (rho - 1)
        plus = self.release([Request(p_plus, p_plus, t_plus)], "sigma0_plus")[0]
        here = self.kernel.position
        fut = self.future()
        served = fut.dropoffs
        if abs(here - p1) <= abs(here - p_plus) or served[second] < served[plus]:
            self.note(t_plus, "case 1: no further requests")
            return "case1", t_plus, StageTwoState(p0, p1, W, t_plus)
        tau_plus = served[plus]
        deadline = abs(2 * p_plus - 3 * p1)
        if tau_plus >= deadline - TOL:
            self.note(t_plus, "case 2.1: no further requests")
            return "case2.1", t_plus, StageTwoState(p0, p1, W, t_plus)
        mid = Line(s / 2, 3 * p1 / 2)
        t_mid = first_crossing(fut.trajectory(), mid, tau_plus, hold=True)
        if t_mid is None:
            raise AdversaryError("server never meets the midpoint")
        self.triggers["t_mid"] = t_mid
        p_pp = s * t_mid + 2 * p1
        self.release([Request(p_pp, p_pp, t_mid)], "sigma0_plusplus")
        self.note(t_mid, "case 2.2")
        return "case2.2", t_mid, StageTwoState(p0, p1, W, t_plus, t_mid)

    def _fixpoint(self, traj: Trajectory, tau0: float, tau1: float, p0: float, p1: float, t0: float) -> float:
        """First t >= t0 with delay(t) = (rho - 1)(t - t0), on [t0, tau1]."""
        rho = self.rho

        def h(t: float) -> float:
            pos = traj.position_at(t)
            return delay(t, pos, t >= tau0, p0, p1, rho) - (rho - 1) * (t - t0)

        cands = {t0, tau1}
        cands.update(t for t, _ in traj.breakpoints if t0 < t < tau1)
        if t0 < tau0 < tau1:
            cands.add(tau0)
        for x in (p0, p1):
            t = t0
            while True:
                hit = first_crossing(traj, Line(0.0, x), t)
                if hit is None or hit >= tau1:
                    break
                if hit > t0:
                    cands.add(hit)
                nxt = [bt for bt, _ in traj.breakpoints if bt > hit]
                if not nxt:
                    break
                t = nxt[0]
        times = sorted(cands)
        h_prev = h(times[0])
        if h_prev < -1e-9:
            raise AdversaryError(f"delay negative at 2|p1|+|p0| ({h_prev})")
        if h_prev <= 0:
            return times[0]
        for t_prev, t in zip(times, times[1:]):
            h_cur = h(t) if t < tau1 else _limit_left(h, t_prev, t)
            if h_cur <= 0:
                return t_prev + (t - t_prev) * h_prev / (h_prev - h_cur)
            t_prev, h_prev = t, h_cur
        raise AdversaryError("no fixpoint before the second critical request is served")


def _limit_left(h, a: float, b: float) -> float:
    """Value at b of the linear piece through a and the midpoint of [a, b]."""
    mid = 0.5 * (a + b)
    return h(a) + 2 * (h(mid) - h(a))


def _probe_position(alg: OnlineAlgorithm, capacity: int) -> float:
    probe = Kernel(alg, capacity, HORIZON)
    probe.advance(1.0)
    return probe.position


def run_general_lower_bound(alg: OnlineAlgorithm, cfg: AdversaryConfig | None = None) -> AdversaryTranscript:
    cfg = AdversaryConfig() if cfg is None else cfg
    mirrored = _probe_position(alg, cfg.capacity) > 0
    game = _Game(alg, cfg, mirrored)
    if mirrored:
        game.note(1.0, "server right of the origin at time 1: playing mirrored")
    outcome, payload = game.stage_one()
    critical = None
    state = None
    if outcome == "critical":
        initial, left, right, t_l, t_r = payload
        outcome, claimed, state = game.stage_two(left, right, t_l, t_r)
    else:
        claimed = payload
    game.kernel.run_to_idle()
    kernel = game.kernel
    if kernel.unserved:
        raise AdversaryError(f"algorithm left requests unserved: {kernel.unserved}")
    completion = max(kernel.dropoffs.values())
    traj = kernel.trajectory()
    if "t_R" in game.triggers:
        history = CriticalHistory(
            tuple(kernel.requests), traj, dict(kernel.dropoffs), cfg.capacity
        )
        ids = [i for i, (_, label) in enumerate(game.released) if label in ("sigma_R", "sigma_L")]
        right_id = next(i for i in ids if game.released[i][1] == "sigma_R")
        left_id = next(i for i in ids if game.released[i][1] == "sigma_L")
        critical = check_critical(right_id, left_id, history, cfg.rho)
        initial = [i for i, (_, label) in enumerate(game.released) if label == "initial"]
        game._check_eager(kernel, initial, game.triggers["t_L"], delta(cfg.rho))
    released = tuple(game.released)
    if mirrored:
        released = tuple((r.mirrored(), label) for r, label in released)
        traj = traj.mirrored()
        if state is not None:
            state = StageTwoState(-state.p0, -state.p1, state.W, state.t0_plus, state.t_mid)
    inst = Instance(cfg.capacity, tuple(r for r, _ in released))
    verified = offline_opt(inst)
    game.note(completion, f"done: {outcome}, ALG={fmt12(completion)}, OPT={fmt12(verified)}")
    return AdversaryTranscript(
        rho=cfg.rho,
        capacity=cfg.capacity,
        mirrored=mirrored,
        released=released,
        trigger_times=dict(game.triggers),
        outcome=outcome,
        alg_completion=completion,
        claimed_opt=claimed,
        opt_value=verified,
        trajectory=traj,
        service_times=dict(kernel.dropoffs),
        log=tuple(game.log),
        critical=critical,
        stage_two=state,
    )
