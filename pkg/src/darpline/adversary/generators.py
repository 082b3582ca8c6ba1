"""Fixed request families on which SmarterStart's bounds are (nearly) attained."""

from __future__ import annotations

import math

from ..model import Instance, Request

GOLDEN = (1 + math.sqrt(5)) / 2


class ParameterError(ValueError):
    """A generator parameter lies outside its admissible range."""


def _need(ok: bool, message: str) -> None:
    if not ok:
        raise ParameterError(message)


def waiting_eps_prime(theta: float, eps: float) -> float:
    return (theta + 1) / (2 * theta) * eps


def gen_waiting_lb(theta: float, eps: float, capacity: int | float = 1) -> Instance:
    """Two requests that make SmarterStart wait before a long final schedule."""
    _need(1 < theta < 2, f"theta must lie in (1, 2), got {theta}")
    _need(0 < eps < theta / (theta + 1), f"eps must lie in (0, {theta / (theta + 1):.12g})")
    e = waiting_eps_prime(theta, eps)
    u = 1 / (theta - 1)
    return Instance(capacity, (Request(1, 1, 0), Request(-u + e, 1, u + e)))


def nowaiting_eps_prime(theta: float, eps: float) -> float:
    return (2 * theta + 1) / (5 * theta**2 - 9 * theta + 4) * eps


def gen_nowaiting_lb(theta: float, eps: float, capacity: int | float = 1) -> Instance:
    """Four visits that make SmarterStart chain its last two schedules."""
    _need(GOLDEN <= theta <= 2, f"theta must lie in [(1+sqrt5)/2, 2] = [{GOLDEN:.12g}, 2], got {theta}")
    cap = (5 * theta**2 - 9 * theta + 4) / (4 * (2 * theta + 1))
    _need(0 < eps < cap, f"eps must lie in (0, {cap:.12g})")
    e = nowaiting_eps_prime(theta, eps)
    u = 1 / (theta - 1)
    far = 2 + u - 2 * e
    last = 3 * u * u - e
    return Instance(
        capacity,
        (
            Request(1, 1, 0),
            Request(far, far, u + e),
            Request(-u, -u, u + e),
            Request(last, last, 3 * u * u + 2 * u),
        ),
    )


def gt2_eps_prime(theta: float, eps: float) -> float:
    return (theta - 1) / (4 * theta + 4) * eps


def gen_theta_gt2(
    theta: float, eps: float, capacity: int | float = 1, *, defer_final: bool = False
) -> Instance:
    """Four requests penalising SmarterStart for a start parameter above 2.

    With ``defer_final`` the last request is released only once the first
    schedule is over, so it cannot be absorbed into the second schedule when
    theta exceeds 1 + sqrt(2).
    """
    _need(theta > 2, f"theta must exceed 2, got {theta}")
    cap = (4 * theta + 4) / (theta - 1) * min(
        theta / (2 * theta - 2), (theta**2 - theta - 2) / (theta - 1) ** 2, 1 / (theta - 1)
    )
    _need(0 < eps < cap, f"eps must lie in (0, {cap:.12g})")
    e = gt2_eps_prime(theta, eps)
    u = 1 / (theta - 1)
    last = (theta + 1) * u * u
    if defer_final:
        last = max(last, theta * u)
    return Instance(
        capacity,
        (
            Request(1, 1, 0),
            Request((theta - 2) / (2 * theta - 2) + e, 1, u + e),
            Request(-u + e, -u + e, u + e),
            Request(1, 1, last + e),
        ),
    )


def gen_luring(q: float, eps: float, theta: float, capacity: int | float = 1) -> Instance:
    """A chain of visits creeping right that drags a position-based waiter along."""
    _need(q > 0 and eps > 0, "q and eps must be positive")
    _need(theta > 1, f"theta must exceed 1, got {theta}")
    steps = q / eps
    count = round(steps) if abs(steps - round(steps)) < 1e-9 else math.ceil(steps)
    first = (theta - 1) * eps
    reqs = [Request(first, first, first)]
    reqs += [Request(i * eps, i * eps, i * eps) for i in range(2, count + 1)]
    return Instance(capacity, tuple(reqs))
