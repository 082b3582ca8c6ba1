"""Schedule-based online algorithms and the start-time rules they use."""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from ..model import PICKUP, Capacity, Request
from ..offline import OfflineQuery, makespan_profile, optimal_schedule
from .kernel import IDLE, Leg, OnlineAlgorithm, Plan, ServerView


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not theta > 1:
        raise ValueError(f"theta must exceed 1, got {theta}")
    return theta


def smartstart_start_time(
    now: float,
    position: float,
    unserved: Sequence[Request],
    theta: float,
    *,
    capacity: Capacity,
) -> float:
    """Earliest t >= now with t >= L(t, position, unserved) / (theta - 1)."""
    theta = _check_theta(theta)
    profile = makespan_profile(float(position), tuple(unserved), capacity)
    return profile.earliest_start(theta, now)


def smarterstart_start_time(
    now: float, known: Sequence[Request], theta: float, *, capacity: Capacity
) -> float:
    """Earliest t >= now with t >= L(t, 0, known) / (theta - 1)."""
    return smartstart_start_time(now, 0.0, known, theta, capacity=capacity)


def schedule_plan(view: ServerView, ids: Sequence[int]) -> Plan:
    """Optimal offline schedule for `ids` from the current state, as a plan.

    Carried requests among `ids` are treated as already on board.
    """
    ids = tuple(ids)
    reqs = tuple(view.requests[i] for i in ids)
    onboard = frozenset(k for k, i in enumerate(ids) if i in view.carried)
    sol = optimal_schedule(OfflineQuery(view.time, view.position, reqs, view.capacity, onboard))
    legs: list[Leg] = []
    last = None
    for ev in sol.schedule.events:
        rid = ids[ev.request]
        not_before = view.requests[rid].release if ev.kind == PICKUP else float("-inf")
        if last is not None and last.position == ev.position and last_time == ev.time:
            legs[-1] = replace(last, events=last.events + ((ev.kind, rid),))
        else:
            legs.append(Leg(ev.position, not_before, ((ev.kind, rid),)))
        last, last_time = legs[-1], ev.time
    return Plan(tuple(legs), schedule=ids)


class Ignore(OnlineAlgorithm):
    """Start a schedule for everything known as soon as idle; defer new requests."""

    name = "ignore"

    def decide(self, view, new, plan_done):
        if not plan_done:
            return None
        pending = view.unserved
        return schedule_plan(view, pending) if pending else IDLE


class _Waiting(OnlineAlgorithm):
    """Between schedules, wait until a start-time rule allows the next one."""

    def __init__(self, theta: float):
        self.theta = _check_theta(theta)
        self.name = f"{self.kind}:{theta:g}"
        self._busy = False

    def reset(self) -> None:
        self._busy = False

    def start_time(self, view: ServerView) -> float:
        raise NotImplementedError

    def decide(self, view, new, plan_done):
        if self._busy and not plan_done:
            return None
        self._busy = False
        pending = view.unserved
        if not pending:
            return IDLE
        start = self.start_time(view)
        if start > view.time:
            return Plan((Leg(view.position, start),))
        self._busy = True
        return schedule_plan(view, pending)


class Smartstart(_Waiting):
    kind = "smartstart"

    def start_time(self, view):
        reqs = [view.requests[i] for i in view.unserved]
        return smartstart_start_time(view.time, view.position, reqs, self.theta, capacity=view.capacity)


class SmarterStart(_Waiting):
    kind = "smarterstart"

    def start_time(self, view):
        return smarterstart_start_time(view.time, view.requests, self.theta, capacity=view.capacity)


class GreedyReplan(OnlineAlgorithm):
    """Baseline: re-solve the offline problem from the current state on every release."""

    name = "replan"

    def decide(self, view, new, plan_done):
        if not new and not plan_done:
            return None
        pending = view.unserved
        return schedule_plan(view, pending) if pending else IDLE


class Mirrored(OnlineAlgorithm):
    """Run `inner` in the reflected world x -> -x."""

    def __init__(self, inner: OnlineAlgorithm):
        self.inner = inner
        self.name = f"mirrored({inner.name})"

    def reset(self) -> None:
        self.inner.reset()

    def decide(self, view, new, plan_done):
        flipped = replace(
            view,
            position=-view.position,
            requests=tuple(r.mirrored() for r in view.requests),
        )
        plan = self.inner.decide(flipped, new, plan_done)
        if plan is None:
            return None
        legs = tuple(replace(leg, position=-leg.position) for leg in plan.legs)
        return Plan(legs, plan.schedule)


def make_ignore() -> Ignore:
    return Ignore()


def make_smartstart(theta: float) -> Smartstart:
    return Smartstart(theta)


def make_smarterstart(theta: float) -> SmarterStart:
    return SmarterStart(theta)


def make_replan() -> GreedyReplan:
    return GreedyReplan()


__all__ = [
    "GreedyReplan",
    "Ignore",
    "Mirrored",
    "SmarterStart",
    "Smartstart",
    "make_ignore",
    "make_replan",
    "make_smarterstart",
    "make_smartstart",
    "schedule_plan",
    "smarterstart_start_time",
    "smartstart_start_time",
]
