"""Exact offline pickup-and-delivery on the line.

`optimal_schedule` is a depth-first branch-and-bound over event orders with
greedy timing (drive to the next event point, wait there for the release).
`makespan_profile` computes L(t, p, R) for all start times at once, and
`brute_force_makespan` is an unpruned enumeration used as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numba
import numpy as np

from .model import DROPOFF, PICKUP, Capacity, Event, Instance, Request, Schedule, validate_instance

DEFAULT_LIMIT = 10
BRUTE_FORCE_LIMIT = 6


class SearchLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OfflineQuery:
    start_time: float
    start_position: float
    requests: tuple[Request, ...]
    capacity: Capacity
    onboard: frozenset[int] = field(default_factory=frozenset)  # indices already carried

    def __post_init__(self) -> None:
        object.__setattr__(self, "requests", tuple(self.requests))
        object.__setattr__(self, "onboard", frozenset(self.onboard))
        if self.start_time < 0:
            raise ValueError("start_time must be non-negative")
        if len(self.onboard) > self.capacity:
            raise ValueError("more requests on board than capacity allows")


@dataclass(frozen=True)
class OfflineSolution:
    makespan: float
    schedule: Schedule


def _moves(n, reqs, capacity, picked, dropped, load, time, pos):
    """Successor states (new_time, new_pos, picked, dropped, load, events)."""
    out = []
    for i in range(n):
        bit = 1 << i
        if dropped & bit:
            continue
        a, b, r = reqs[i]
        if picked & bit:
            out.append((time + abs(pos - b), b, picked, dropped | bit, load - 1, ((DROPOFF, i),)))
        elif load < capacity:
            t = max(time + abs(pos - a), r)
            if a == b:
                out.append((t, a, picked | bit, dropped | bit, load, ((PICKUP, i), (DROPOFF, i))))
            else:
                out.append((t, a, picked | bit, dropped, load + 1, ((PICKUP, i),)))
    return out


def optimal_schedule(q: OfflineQuery, limit: int = DEFAULT_LIMIT) -> OfflineSolution:
    n = len(q.requests)
    if n > limit:
        raise SearchLimitExceeded(f"search limit exceeded ({n} > {limit} requests)")
    reqs = [(r.origin, r.destination, r.release) for r in q.requests]
    full = (1 << n) - 1
    picked0 = sum(1 << i for i in q.onboard)
    t0, p0, cap = q.start_time, q.start_position, q.capacity

    best_time = math.inf
    best_path: list = []
    path: list = []
    seen: dict[tuple[int, int, float], float] = {}

    def bound(time, pos, picked, dropped):
        lo = hi = pos
        rel = time
        for i in range(n):
            bit = 1 << i
            if dropped & bit:
                continue
            a, b, r = reqs[i]
            if b < lo:
                lo = b
            elif b > hi:
                hi = b
            if not picked & bit:
                if a < lo:
                    lo = a
                elif a > hi:
                    hi = a
                rel = max(rel, max(time + abs(pos - a), r) + abs(a - b))
        return max(time + (hi - lo) + min(pos - lo, hi - pos), rel)

    def dfs(time, pos, picked, dropped, load):
        nonlocal best_time, best_path
        if dropped == full:
            if time < best_time:
                best_time, best_path = time, list(path)
            return
        if bound(time, pos, picked, dropped) >= best_time:
            return
        key = (picked, dropped, pos)
        prev = seen.get(key)
        if prev is not None and prev <= time:
            return
        seen[key] = time
        for nt, npos, npk, ndr, nl, evs in sorted(
            _moves(n, reqs, cap, picked, dropped, load, time, pos), key=lambda m: m[0]
        ):
            path.append((nt, npos, evs))
            dfs(nt, npos, npk, ndr, nl)
            path.pop()

    dfs(t0, p0, picked0, 0, len(q.onboard))
    events = tuple(
        Event(t, kind, i, pos) for t, pos, evs in best_path for kind, i in evs
    )
    return OfflineSolution(best_time - t0, Schedule(t0, p0, events))


def makespan(
    t: float,
    p: float,
    requests: Sequence[Request],
    capacity: Capacity,
    onboard: frozenset[int] = frozenset(),
) -> float:
    """L(t, p, R)."""
    return optimal_schedule(OfflineQuery(t, p, tuple(requests), capacity, onboard)).makespan


def opt(inst: Instance, limit: int = DEFAULT_LIMIT) -> float:
    validate_instance(inst)
    return makespan_for(inst, limit)


def makespan_for(inst: Instance, limit: int = DEFAULT_LIMIT) -> float:
    """Optimal makespan from the origin at time 0.

    Instances made only of visits are solved exactly by the interval DP,
    whatever their size.
    """
    if inst.requests and all(r.is_visit for r in inst.requests):
        return _visit_profile(0.0, inst.requests)(0.0)
    return optimal_schedule(OfflineQuery(0.0, 0.0, inst.requests, inst.capacity), limit).makespan


# ---------------------------------------------------------------- profile


@dataclass(frozen=True)
class MakespanProfile:
    """L(t, p, R) as a function of the start time t.

    For a fixed event order the completion time is max(t + D, K), with D the
    travel length and K the latest release-forced completion.  Each label is
    a Pareto-optimal (D, K) pair, so L(t) = min over labels of max(D, K - t).
    """

    start_position: float
    labels: tuple[tuple[float, float], ...]

    def __call__(self, t: float) -> float:
        return min(max(d, k - t) for d, k in self.labels)

    def earliest_start(self, theta: float, now: float) -> float:
        """min{t >= now : t >= L(t) / (theta - 1)}."""
        if theta <= 1:
            raise ValueError("theta must exceed 1")
        best = min(max(d / (theta - 1), k / theta) for d, k in self.labels)
        return max(now, best)


def _pareto_insert(labels: list[tuple[float, float]], d: float, k: float) -> None:
    for d2, k2 in labels:
        if d2 <= d and k2 <= k:
            return
    labels[:] = [(d2, k2) for d2, k2 in labels if not (d <= d2 and k <= k2)]
    labels.append((d, k))


@lru_cache(maxsize=65536)
def makespan_profile(
    p: float,
    requests: tuple[Request, ...],
    capacity: Capacity,
    onboard: frozenset[int] = frozenset(),
) -> MakespanProfile:
    n = len(requests)
    if n == 0:
        return MakespanProfile(p, ((0.0, -math.inf),))
    if not onboard and all(r.is_visit for r in requests):
        return _visit_profile(p, requests)
    return _general_profile(p, requests, capacity, onboard)


def _general_profile(p, requests, capacity, onboard) -> MakespanProfile:
    n = len(requests)
    reqs = [(r.origin, r.destination, r.release) for r in requests]
    full = (1 << n) - 1
    picked0 = sum(1 << i for i in onboard)
    # A label (D, K) at a state means: arriving there at t + D if started at
    # time t, except that release waits force arrival no earlier than K.
    levels: list[dict] = [dict() for _ in range(2 * n + 1)]
    start_level = len(onboard)
    levels[start_level][(picked0, 0, p)] = [(0.0, -math.inf)]
    finals: list[tuple[float, float]] = []
    for level in range(start_level, 2 * n + 1):
        for (picked, dropped, pos), labels in levels[level].items():
            if dropped == full:
                for d, k in labels:
                    _pareto_insert(finals, d, k)
                continue
            load = bin(picked).count("1") - bin(dropped).count("1")
            for i in range(n):
                bit = 1 << i
                if dropped & bit:
                    continue
                a, b, r = reqs[i]
                if picked & bit:
                    key, step, nxt = (picked, dropped | bit, b), abs(pos - b), level + 1
                    release = -math.inf
                elif load < capacity:
                    step, release = abs(pos - a), r
                    if a == b:
                        key, nxt = (picked | bit, dropped | bit, a), level + 2
                    else:
                        key, nxt = (picked | bit, dropped, a), level + 1
                else:
                    continue
                bucket = levels[nxt].setdefault(key, [])
                for d, k in labels:
                    nd = d + step
                    nk = max(k + step, release)
                    _pareto_insert(bucket, nd, nk)
    finals.sort()
    return MakespanProfile(p, tuple(finals))


def _visit_profile(p: float, requests: Sequence[Request]) -> MakespanProfile:
    """Profile for requests that only need a visit (origin == destination).

    A visit is served iff the server's last passage through its point comes
    after the release.  Read backwards from the end, the set of points whose
    last passage has happened is an interval that only grows, so an interval
    DP over (covered range, current end) enumerates every relevant route.
    Labels are (reverse distance, max of release + reverse distance).
    """
    latest: dict[float, float] = {}
    for r in requests:
        latest[r.origin] = max(latest.get(r.origin, -math.inf), r.release)
    xs = sorted(latest)
    rel = [latest[x] for x in xs]
    m = len(xs)
    # states[(i, j, side)] -> labels; side 0 = at xs[i], side 1 = at xs[j]
    layer: dict[tuple[int, int, int], list[tuple[float, float]]] = {
        (k, k, 0): [(0.0, rel[k])] for k in range(m)
    }
    finals: list[tuple[float, float]] = []
    for _ in range(m):
        nxt: dict[tuple[int, int, int], list[tuple[float, float]]] = {}
        for (i, j, side), labels in layer.items():
            here = xs[i] if side == 0 else xs[j]
            if i == 0 and j == m - 1:
                tail = abs(here - p)
                for d, k in labels:
                    _pareto_insert(finals, d + tail, k)
                continue
            for ni, nj, nside, target in ((i - 1, j, 0, i - 1), (i, j + 1, 1, j + 1)):
                if ni < 0 or nj >= m:
                    continue
                step = abs(here - xs[target])
                bucket = nxt.setdefault((ni, nj, nside), [])
                for d, k in labels:
                    nd = d + step
                    _pareto_insert(bucket, nd, max(k, rel[target] + nd))
        layer = nxt
    finals.sort()
    return MakespanProfile(p, tuple(finals))


# ---------------------------------------------------------------- brute force


@numba.njit(cache=True)
def _enumerate_orders(a, b, r, t0, p0, cap, status0):  # pragma: no cover - compiled
    n = a.shape[0]
    m = 2 * n
    status = status0.copy()
    remaining = 0
    load0 = 0
    for i in range(n):
        if status[i] == 0:
            remaining += 2
        elif status[i] == 1:
            remaining += 1
            load0 += 1
    times = np.empty(m + 1)
    pos = np.empty(m + 1)
    loads = np.empty(m + 1, dtype=np.int64)
    tried = np.full(m + 1, -1, dtype=np.int64)
    applied = np.full(m + 1, -1, dtype=np.int64)
    times[0] = t0
    pos[0] = p0
    loads[0] = load0
    best = np.inf
    depth = 0
    while True:
        if remaining == 0:
            if times[depth] < best:
                best = times[depth]
            if depth == 0:
                break
            depth -= 1
            e = applied[depth]
            i = e // 2
            status[i] = 0 if e % 2 == 0 else 1
            remaining += 1
            continue
        e = tried[depth] + 1
        while e < m:
            i = e // 2
            if e % 2 == 0:
                if status[i] == 0 and loads[depth] < cap:
                    break
            elif status[i] == 1:
                break
            e += 1
        if e == m:
            if depth == 0:
                break
            tried[depth] = -1
            depth -= 1
            e = applied[depth]
            i = e // 2
            status[i] = 0 if e % 2 == 0 else 1
            remaining += 1
            continue
        tried[depth] = e
        i = e // 2
        if e % 2 == 0:
            nt = max(times[depth] + abs(pos[depth] - a[i]), r[i])
            np_ = a[i]
            nl = loads[depth] + 1
            status[i] = 1
        else:
            nt = times[depth] + abs(pos[depth] - b[i])
            np_ = b[i]
            nl = loads[depth] - 1
            status[i] = 2
        remaining -= 1
        applied[depth] = e
        depth += 1
        times[depth] = nt
        pos[depth] = np_
        loads[depth] = nl
        tried[depth] = -1
    return best


def brute_force_makespan(q: OfflineQuery) -> float:
    """Minimum makespan over every capacity-feasible event order, no pruning."""
    n = len(q.requests)
    if n > BRUTE_FORCE_LIMIT:
        raise SearchLimitExceeded(f"brute force limited to {BRUTE_FORCE_LIMIT} requests")
    if n == 0:
        return 0.0
    a = np.array([r.origin for r in q.requests], dtype=np.float64)
    b = np.array([r.destination for r in q.requests], dtype=np.float64)
    r = np.array([r.release for r in q.requests], dtype=np.float64)
    status = np.zeros(n, dtype=np.int64)
    for i in q.onboard:
        status[i] = 1
    best = _enumerate_orders(a, b, r, float(q.start_time), float(q.start_position), float(q.capacity), status)
    return float(best) - q.start_time
