"""Event-driven simulation of a single unit-speed server on the line.

Algorithms publish a `Plan`: a queue of legs, each "drive to x, wait until
not_before, then perform these pickups/dropoffs".  The kernel executes the
plan until the next release, lets the algorithm revise it, and records the
trajectory.  Because plans are committed motion, a copy of the kernel can be
run forward to see where the server will be (`extrapolate`).
"""

from __future__ import annotations

import copy
import math
from collections import deque
from dataclasses import dataclass
from itertools import groupby
from typing import Sequence

from ..model import (
    DROPOFF,
    PICKUP,
    TOL,
    Capacity,
    Instance,
    Request,
    Trajectory,
    validate_instance,
)

SNAP = 1e-9


class SimulationError(RuntimeError):
    pass


class InfeasiblePlan(SimulationError):
    pass


class HorizonExceeded(SimulationError):
    pass


class AlgorithmStalled(SimulationError):
    """The server went idle while requests were still unserved."""


@dataclass(frozen=True)
class Leg:
    position: float
    not_before: float = -math.inf
    events: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class Plan:
    legs: tuple[Leg, ...] = ()
    schedule: tuple[int, ...] | None = None  # request ids, when the plan is a schedule


IDLE = Plan()


@dataclass(frozen=True)
class ServerView:
    """What an online algorithm may observe at a decision point."""

    time: float
    position: float
    capacity: Capacity
    requests: tuple[Request, ...]
    carried: frozenset[int]
    served: frozenset[int]

    @property
    def unserved(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.requests)) if i not in self.served)

    @property
    def waiting(self) -> tuple[int, ...]:
        """Released, not yet picked up."""
        return tuple(i for i in self.unserved if i not in self.carried)


class OnlineAlgorithm:
    name = "algorithm"

    def reset(self) -> None:
        pass

    def decide(self, view: ServerView, new: tuple[int, ...], plan_done: bool) -> Plan | None:
        """Return a replacement plan, or None to keep the current one."""
        raise NotImplementedError


@dataclass(frozen=True)
class ScheduleRecord:
    index: int
    start_time: float
    start_position: float
    requests: tuple[int, ...]
    end_time: float
    end_position: float


@dataclass(frozen=True)
class LegRecord:
    depart_time: float
    depart_position: float
    arrive_time: float
    position: float
    finish_time: float
    events: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class SimulationResult:
    completion_time: float
    trajectory: Trajectory
    schedule_records: tuple[ScheduleRecord, ...]
    served_log: dict[int, tuple[float, float]]  # id -> (pickup time, dropoff time)
    requests: tuple[Request, ...]

    @property
    def instance_order(self) -> tuple[Request, ...]:
        return self.requests


@dataclass
class _OpenRecord:
    start_time: float
    start_position: float
    requests: tuple[int, ...]


class Kernel:
    def __init__(self, algorithm: OnlineAlgorithm, capacity: Capacity, horizon: float = math.inf):
        self.algorithm = algorithm
        self.capacity = capacity
        self.horizon = horizon
        algorithm.reset()
        self.time = 0.0
        self.position = 0.0
        self.requests: list[Request] = []
        self.carried: set[int] = set()
        self.pickups: dict[int, float] = {}
        self.dropoffs: dict[int, float] = {}
        self.records: list[ScheduleRecord] = []
        self.executed: list[LegRecord] = []
        self._points: list[tuple[float, float]] = [(0.0, 0.0)]
        self._legs: deque[Leg] = deque()
        self._origin: tuple[float, float] | None = None
        self._open: _OpenRecord | None = None
        self._pending = True  # a decision is owed at the current time

    # ------------------------------------------------------------ observation

    def view(self) -> ServerView:
        return ServerView(
            self.time,
            self.position,
            self.capacity,
            tuple(self.requests),
            frozenset(self.carried),
            frozenset(self.dropoffs),
        )

    @property
    def idle(self) -> bool:
        return not self._legs and not self._pending

    @property
    def unserved(self) -> list[int]:
        return [i for i in range(len(self.requests)) if i not in self.dropoffs]

    def trajectory(self, until: float | None = None) -> Trajectory:
        pts = list(self._points)
        if self.time > pts[-1][0]:
            pts.append((self.time, self.position))
        if until is not None and until > pts[-1][0]:
            pts.append((until, pts[-1][1]))
        return Trajectory(tuple(pts))

    # ------------------------------------------------------------ mechanics

    def _mark(self, t: float, x: float) -> None:
        last_t, last_x = self._points[-1]
        if t > last_t:
            if len(self._points) > 1:
                prev_t, prev_x = self._points[-2]
                slope = (last_x - prev_x) / (last_t - prev_t)
                if abs(last_x + slope * (t - last_t) - x) <= TOL:
                    self._points[-1] = (t, x)  # same velocity: extend the segment
                    return
            self._points.append((t, x))
        elif abs(x - last_x) > TOL:
            raise SimulationError(f"position jump at time {t}")

    def _leg_times(self, leg: Leg) -> tuple[float, float, float, float]:
        if self._origin is None:
            self._origin = (self.time, self.position)
        t0, x0 = self._origin
        arrive = t0 + abs(leg.position - x0)
        return t0, x0, arrive, max(arrive, leg.not_before)

    def _decide(self, new: Sequence[int]) -> None:
        plan_done = not self._legs
        self._pending = False
        plan = self.algorithm.decide(self.view(), tuple(new), plan_done)
        if plan is None:
            if plan_done:
                self._close_record()
            return
        self._install(plan)

    def _install(self, plan: Plan) -> None:
        self._close_record()
        self._mark(self.time, self.position)
        self._legs = deque(plan.legs)
        self._origin = None
        if plan.schedule is not None and plan.legs:
            self._open = _OpenRecord(self.time, self.position, tuple(plan.schedule))

    def _close_record(self) -> None:
        if self._open is not None:
            rec = self._open
            self.records.append(
                ScheduleRecord(
                    len(self.records) + 1,
                    rec.start_time,
                    rec.start_position,
                    rec.requests,
                    self.time,
                    self.position,
                )
            )
            self._open = None

    def _perform(self, events: tuple[tuple[str, int], ...]) -> None:
        for kind, i in events:
            if not 0 <= i < len(self.requests):
                raise InfeasiblePlan(f"unknown request {i}")
            req = self.requests[i]
            if kind == PICKUP:
                if i in self.pickups:
                    raise InfeasiblePlan(f"request {i} picked up twice")
                if abs(self.position - req.origin) > TOL:
                    raise InfeasiblePlan(f"pickup of {i} away from its origin")
                if self.time < req.release - TOL:
                    raise InfeasiblePlan(f"pickup of {i} before release")
                if len(self.carried) >= self.capacity:
                    raise InfeasiblePlan(f"pickup of {i} exceeds capacity")
                self.carried.add(i)
                self.pickups[i] = self.time
            elif kind == DROPOFF:
                if i not in self.carried:
                    raise InfeasiblePlan(f"dropoff of {i} which is not carried")
                if abs(self.position - req.destination) > TOL:
                    raise InfeasiblePlan(f"dropoff of {i} away from its destination")
                self.carried.discard(i)
                self.dropoffs[i] = self.time
            else:
                raise InfeasiblePlan(f"unknown event kind {kind!r}")

    def _complete_leg(self, leg: Leg, t0: float, x0: float, arrive: float, finish: float) -> None:
        if finish > self.horizon:
            raise HorizonExceeded(f"simulation passed horizon {self.horizon}")
        self._mark(arrive, leg.position)
        self._mark(finish, leg.position)
        self.time, self.position = finish, leg.position
        self._perform(leg.events)
        self.executed.append(LegRecord(t0, x0, arrive, leg.position, finish, leg.events))
        self._legs.popleft()
        self._origin = None
        if not self._legs:
            self._pending = True

    def next_event_time(self) -> float:
        """Time at which the current leg completes (inf if idle)."""
        if self._pending:
            return self.time
        if not self._legs:
            return math.inf
        return self._leg_times(self._legs[0])[3]

    def advance(self, t: float) -> None:
        """Run the current plan up to time t (decisions owed before t are made)."""
        if t < self.time - TOL:
            raise SimulationError(f"cannot advance backwards to {t} from {self.time}")
        t = max(t, self.time)
        while True:
            if self._pending and self.time < t:
                self._decide(())
            if not self._legs:
                if t > self.horizon:
                    raise HorizonExceeded(f"simulation passed horizon {self.horizon}")
                self.time = t
                return
            leg = self._legs[0]
            t0, x0, arrive, finish = self._leg_times(leg)
            if 0.0 < finish - t <= SNAP:
                finish, arrive = t, min(arrive, t)
            if finish > t:
                if t >= arrive:
                    self._mark(arrive, leg.position)
                    self.position = leg.position
                else:
                    step = t - t0
                    self.position = x0 + math.copysign(step, leg.position - x0)
                self.time = t
                return
            self._complete_leg(leg, t0, x0, min(arrive, finish), finish)

    def release_batch(self, requests: Sequence[Request]) -> list[int]:
        for req in requests:
            if abs(req.release - self.time) > TOL:
                raise SimulationError(f"release at {req.release} injected at time {self.time}")
        ids = list(range(len(self.requests), len(self.requests) + len(requests)))
        self.requests.extend(requests)
        self._decide(ids)
        return ids

    def run_to_idle(self) -> None:
        while True:
            if self._pending:
                self._decide(())
            if not self._legs:
                return
            self.advance(self._leg_times(self._legs[0])[3])

    def copy(self) -> Kernel:
        return copy.deepcopy(self)

    def catch_up(self, t: float) -> None:
        """Advance to t, but treat a plan end within SNAP of t as t itself.

        Unlike `advance`, a decision owed at that plan end is not made here,
        so a mirror of this kernel sees it at the same instant.
        """
        while self._legs and (finish := self._leg_times(self._legs[0])[3]) <= t + SNAP:
            self.advance(max(finish, self.time))
        if not self._pending:
            self.advance(max(t, self.time))

    def settle(self) -> None:
        """Make a decision owed at the current time, if any."""
        if self._pending:
            self._decide(())

    def drain(self) -> Kernel:
        """A copy run to the end of the current plan, stopping before the next decision."""
        future = self.copy()
        while future._legs:
            future.advance(future._leg_times(future._legs[0])[3])
        return future

    def extrapolate(self) -> Kernel:
        """A copy run until the plan is exhausted with no further releases."""
        future = self.copy()
        future.run_to_idle()
        return future

    def result(self) -> SimulationResult:
        completion = max(self.dropoffs.values(), default=0.0)
        log = {i: (self.pickups[i], self.dropoffs[i]) for i in sorted(self.dropoffs)}
        return SimulationResult(
            completion, self.trajectory(), tuple(self.records), log, tuple(self.requests)
        )


def horizon_for(inst: Instance) -> float:
    """Generous cap on simulated time: 1000 times a cheap OPT upper bound."""
    if not inst.requests:
        return 1000.0
    last = max(r.release for r in inst.requests)
    tour = sum(abs(r.origin) + abs(r.origin - r.destination) + abs(r.destination) for r in inst.requests)
    return 1000.0 * (last + tour + 1.0)


def simulate(
    alg: OnlineAlgorithm, inst: Instance, horizon: float | None = None
) -> SimulationResult:
    validate_instance(inst)
    kernel = Kernel(alg, inst.capacity, horizon_for(inst) if horizon is None else horizon)
    ordered = sorted(inst.requests, key=lambda r: r.release)
    for release, group in groupby(ordered, key=lambda r: r.release):
        kernel.advance(release)
        kernel.release_batch(list(group))
    kernel.run_to_idle()
    if kernel.unserved:
        raise AlgorithmStalled(f"{alg.name} stopped with unserved requests {kernel.unserved}")
    return kernel.result()
