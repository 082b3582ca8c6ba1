"""Core types for dial-a-ride on the real line.

Requests, instances, piecewise-linear server trajectories, schedules with
their feasibility checker, and the line-based instance file format.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9

Capacity = int | float  # math.inf for unbounded capacity


class InstanceError(ValueError):
    """An instance violates a structural invariant."""


class ParseError(ValueError):
    """Malformed instance text."""


@dataclass(frozen=True)
class Request:
    origin: float
    destination: float
    release: float

    def __post_init__(self) -> None:
        for name in ("origin", "destination", "release"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)

    @property
    def is_visit(self) -> bool:
        return self.origin == self.destination

    def mirrored(self) -> Request:
        return Request(-self.origin, -self.destination, self.release)

    def __str__(self) -> str:
        return f"({fmt(self.origin)},{fmt(self.destination)};{fmt(self.release)})"


@dataclass(frozen=True)
class Instance:
    capacity: Capacity
    requests: tuple[Request, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "requests", tuple(self.requests))

    def __len__(self) -> int:
        return len(self.requests)

    def sorted(self) -> Instance:
        """Same instance with requests in release order (stable)."""
        order = sorted(range(len(self.requests)), key=lambda i: self.requests[i].release)
        return Instance(self.capacity, tuple(self.requests[i] for i in order))


def validate_capacity(capacity: Capacity) -> Capacity:
    if isinstance(capacity, bool):
        raise InstanceError("capacity must be an integer or inf")
    if isinstance(capacity, float):
        if capacity == math.inf:
            return capacity
        if not capacity.is_integer():
            raise InstanceError("capacity must be an integer or inf")
        capacity = int(capacity)
    if not isinstance(capacity, (int, np.integer)):
        raise InstanceError("capacity must be an integer or inf")
    if capacity < 1:
        raise InstanceError("capacity ≥ 1 violated")
    return int(capacity)


def validate_instance(inst: Instance) -> Instance:
    """Return `inst` unchanged if every invariant holds, else raise InstanceError."""
    validate_capacity(inst.capacity)
    for i, req in enumerate(inst.requests):
        for name in ("origin", "destination", "release"):
            if not math.isfinite(getattr(req, name)):
                raise InstanceError(f"finite {name} violated at index {i}")
        if req.release < 0:
            raise InstanceError(f"release ≥ 0 violated at index {i}")
    return inst


def mirror_instance(inst: Instance) -> Instance:
    return Instance(inst.capacity, tuple(r.mirrored() for r in inst.requests))


# ---------------------------------------------------------------- geometry


@dataclass(frozen=True)
class Line:
    slope: float
    intercept: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise ValueError("line coefficients must be finite")

    def value(self, t: float) -> float:
        return self.slope * t + self.intercept

    def mirrored(self) -> Line:
        return Line(-self.slope, -self.intercept)


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear path through (time, position) breakpoints."""

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        pts = tuple((float(t), float(x)) for t, x in self.breakpoints)
        if not pts:
            raise ValueError("a trajectory needs at least one breakpoint")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if not t1 > t0:
                raise ValueError("breakpoint times must be strictly increasing")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "_times", [t for t, _ in pts])

    @property
    def start(self) -> float:
        return self.breakpoints[0][0]

    @property
    def end(self) -> float:
        return self.breakpoints[-1][0]

    def speed_violations(self, tol: float = TOL) -> list[int]:
        """Indices k where segment k -> k+1 moves faster than unit speed."""
        pts = self.breakpoints
        return [
            k
            for k in range(len(pts) - 1)
            if abs(pts[k + 1][1] - pts[k][1]) > pts[k + 1][0] - pts[k][0] + tol
        ]

    def position_at(self, t: float) -> float:
        return position_at(self, t)

    def mirrored(self) -> Trajectory:
        return Trajectory(tuple((t, -x) for t, x in self.breakpoints))

    def extended(self, until: float) -> Trajectory:
        """Hold the final position up to time `until`."""
        if until <= self.end:
            return self
        return Trajectory(self.breakpoints + ((until, self.breakpoints[-1][1]),))

    def first_reach(self, x: float, after: float | None = None) -> float | None:
        """Earliest time at or after `after` at which the server is at x."""
        return first_crossing(self, Line(0.0, x), self.start if after is None else after)


def position_at(traj: Trajectory, t: float) -> float:
    pts = traj.breakpoints
    if t < pts[0][0] - TOL or t > pts[-1][0] + TOL:
        raise ValueError(f"time {t} outside trajectory span [{pts[0][0]}, {pts[-1][0]}]")
    if t <= pts[0][0]:
        return pts[0][1]
    if t >= pts[-1][0]:
        return pts[-1][1]
    k = bisect.bisect_right(traj._times, t) - 1
    (t0, x0), (t1, x1) = pts[k], pts[k + 1]
    return x0 + (x1 - x0) * (t - t0) / (t1 - t0)


def first_crossing(
    traj: Trajectory, line: Line, start: float, *, hold: bool = False
) -> float | None:
    """Smallest t >= start with pos(t) = line(t), or None.

    With ``hold`` the trajectory is treated as resting at its last position
    forever after its final breakpoint.
    """
    pts = traj.breakpoints
    if start > pts[-1][0] and not hold:
        return None
    if start <= pts[-1][0]:
        t_prev = max(start, pts[0][0])
        f_prev = position_at(traj, t_prev) - line.value(t_prev)
        if f_prev == 0.0:
            return t_prev
        k = max(bisect.bisect_right(traj._times, t_prev) - 1, 0)
        for t1, x1 in pts[k + 1 :]:
            f1 = x1 - line.value(t1)
            if f1 == 0.0:
                return t1
            if (f_prev > 0) != (f1 > 0):
                root = t_prev + (t1 - t_prev) * f_prev / (f_prev - f1)
                return min(max(root, t_prev), t1)
            t_prev, f_prev = t1, f1
    if not hold:
        return None
    t_end, x_end = pts[-1]
    lo = max(start, t_end)
    if line.slope == 0.0:
        return lo if x_end == line.intercept else None
    root = (x_end - line.intercept) / line.slope
    return root if root >= lo else None


# ---------------------------------------------------------------- schedules

PICKUP = "pickup"
DROPOFF = "dropoff"


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    request: int
    position: float


@dataclass(frozen=True)
class Schedule:
    start_time: float
    start_position: float
    events: tuple[Event, ...] = ()

    @property
    def end_position(self) -> float:
        return self.events[-1].position if self.events else self.start_position

    @property
    def end_time(self) -> float:
        return self.events[-1].time if self.events else self.start_time


def schedule_violations(
    schedule: Schedule,
    requests: Sequence[Request],
    capacity: Capacity,
    onboard: Iterable[int] = (),
    *,
    complete: bool = True,
    tol: float = TOL,
) -> list[str]:
    """List every feasibility problem of `schedule` (empty list = feasible).

    `onboard` are indices already carried at the start; they must not be
    picked up again. With `complete`, every request must end up delivered.
    """
    problems: list[str] = []
    carried = set(onboard)
    picked = set(carried)
    dropped: set[int] = set()
    t, x = schedule.start_time, schedule.start_position
    for n, ev in enumerate(schedule.events):
        tag = f"event {n} ({ev.kind} {ev.request})"
        if not 0 <= ev.request < len(requests):
            problems.append(f"{tag}: unknown request")
            continue
        req = requests[ev.request]
        if ev.time < t - tol:
            problems.append(f"{tag}: time goes backwards")
        if abs(ev.position - x) > ev.time - t + tol:
            problems.append(f"{tag}: unreachable at unit speed")
        if ev.kind == PICKUP:
            if ev.request in picked:
                problems.append(f"{tag}: picked up twice")
            if abs(ev.position - req.origin) > tol:
                problems.append(f"{tag}: pickup away from origin")
            if ev.time < req.release - tol:
                problems.append(f"{tag}: pickup before release")
            if len(carried) + 1 > capacity:
                problems.append(f"{tag}: capacity exceeded")
            picked.add(ev.request)
            carried.add(ev.request)
        elif ev.kind == DROPOFF:
            if ev.request not in carried:
                problems.append(f"{tag}: dropoff without pickup")
            if abs(ev.position - req.destination) > tol:
                problems.append(f"{tag}: dropoff away from destination")
            carried.discard(ev.request)
            dropped.add(ev.request)
        else:
            problems.append(f"{tag}: unknown event kind")
        t, x = max(t, ev.time), ev.position
    if complete:
        missing = sorted(set(range(len(requests))) - dropped)
        if missing:
            problems.append(f"requests never delivered: {missing}")
    return problems


# ---------------------------------------------------------------- file format


def fmt(x: float) -> str:
    """Shortest text that parses back to exactly `x`."""
    if x == math.inf:
        return "inf"
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def fmt12(x: float) -> str:
    """Human-facing number: 12 significant digits."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = f"{x:.12g}"
    return text if any(ch in text for ch in ".en") else text + ".0"


def _parse_number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"line {lineno}: not a number: {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"line {lineno}: number must be finite: {token!r}")
    return value


def parse_instance(text: str) -> Instance:
    capacity: Capacity | None = None
    requests: list[Request] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *args = line.split()
        if keyword == "capacity":
            if capacity is not None:
                raise ParseError(f"line {lineno}: duplicate capacity line")
            if requests:
                raise ParseError(f"line {lineno}: capacity must precede requests")
            if len(args) != 1:
                raise ParseError(f"line {lineno}: expected 'capacity <int|inf>'")
            if args[0] == "inf":
                capacity = math.inf
            else:
                try:
                    capacity = int(args[0])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad capacity {args[0]!r}") from None
                if capacity < 1:
                    raise ParseError(f"line {lineno}: capacity ≥ 1 violated")
        elif keyword == "request":
            if capacity is None:
                raise ParseError(f"line {lineno}: request before capacity line")
            if len(args) != 3:
                raise ParseError(f"line {lineno}: expected 'request <a> <b> <r>'")
            a, b, r = (_parse_number(tok, lineno) for tok in args)
            if r < 0:
                raise ParseError(f"line {lineno}: release ≥ 0 violated")
            requests.append(Request(a, b, r))
        else:
            raise ParseError(f"line {lineno}: unknown keyword {keyword!r}")
    if capacity is None:
        raise ParseError("missing capacity line")
    return Instance(capacity, tuple(requests)).sorted()


def serialize_instance(inst: Instance) -> str:
    lines = [f"capacity {fmt(inst.capacity) if inst.capacity == math.inf else int(inst.capacity)}"]
    lines += [
        f"request {fmt(r.origin)} {fmt(r.destination)} {fmt(r.release)}" for r in inst.requests
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- random instances


@dataclass(frozen=True)
class RandomInstanceConfig:
    n: int = 4
    radius: float = 5.0
    capacity: Capacity = 1
    visit_fraction: float = 0.0  # share of requests with origin == destination


def random_instance(rng: np.random.Generator, cfg: RandomInstanceConfig = RandomInstanceConfig()) -> Instance:
    """Positions uniform in [-R, R], releases uniform in [0, 2R]."""
    reqs = []
    for _ in range(cfg.n):
        a = float(rng.uniform(-cfg.radius, cfg.radius))
        b = a if rng.random() < cfg.visit_fraction else float(rng.uniform(-cfg.radius, cfg.radius))
        r = float(rng.uniform(0.0, 2.0 * cfg.radius))
        reqs.append(Request(a, b, r))
    return Instance(cfg.capacity, tuple(reqs)).sorted()
