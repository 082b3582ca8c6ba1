"""Make any algorithm deliver a full, single-destination load without detour."""

from __future__ import annotations

import math

from ..model import DROPOFF, PICKUP
from .kernel import Kernel, Leg, OnlineAlgorithm, Plan, ServerView


class Eagerized(OnlineAlgorithm):
    """Shadow the wrapped algorithm on a virtual server and copy its legs.

    Whenever the virtual server is fully loaded with requests that share one
    destination d, the real server drives straight to d and delivers, then
    waits there until the virtual server's first delivery is done, after
    which both servers coincide again.
    """

    def __init__(self, inner: OnlineAlgorithm):
        self.inner = inner
        self.name = f"eager({inner.name})"
        self._virtual: Kernel | None = None

    def reset(self) -> None:
        self._virtual = None

    def decide(self, view: ServerView, new, plan_done):
        if self._virtual is None:
            self._virtual = Kernel(self.inner, view.capacity)
        virtual = self._virtual
        virtual.catch_up(view.time)
        if new:
            virtual.release_batch([view.requests[i] for i in new])
        virtual.settle()
        # Copy only the committed plan: a release at its end may change what follows.
        future = virtual.drain()
        legs = self._legs(view, virtual, future)
        if future.executed[len(virtual.executed) :]:
            here = legs[-1].position if legs else view.position
            legs.append(Leg(here, future.time))
        return Plan(tuple(legs))

    def _full_destination(self, carried: set[int], view: ServerView) -> float | None:
        if not carried or len(carried) < view.capacity:
            return None
        dests = {view.requests[i].destination for i in carried}
        return dests.pop() if len(dests) == 1 else None

    def _legs(self, view: ServerView, virtual: Kernel, future: Kernel) -> list[Leg]:
        real = set(view.carried)
        shadow = set(virtual.carried)
        legs: list[Leg] = []

        def deliver(dest: float) -> None:
            legs.append(Leg(dest, -math.inf, tuple((DROPOFF, i) for i in sorted(real))))
            real.clear()

        delivering = self._full_destination(shadow, view)
        if delivering is not None and real:
            deliver(delivering)
        for rec in future.executed[len(virtual.executed) :]:
            drops = any(kind == DROPOFF for kind, _ in rec.events)
            if delivering is not None and not drops:
                continue
            events = []
            for kind, i in rec.events:
                if kind == PICKUP:
                    shadow.add(i)
                    real.add(i)
                    events.append((kind, i))
                else:
                    shadow.discard(i)
                    if i in real:
                        real.discard(i)
                        events.append((kind, i))
            legs.append(Leg(rec.position, rec.finish_time, tuple(events)))
            delivering = self._full_destination(shadow, view)
            if delivering is not None and real:
                deliver(delivering)
        return legs


def eagerize(alg: OnlineAlgorithm) -> Eagerized:
    return Eagerized(alg)
