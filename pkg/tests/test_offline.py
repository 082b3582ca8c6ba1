import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import capacities, coords, instances, releases, requests
from darpline.adversary import gen_nowaiting_lb, gen_waiting_lb
from darpline.model import Instance, Request, schedule_violations
from darpline.offline import (
    OfflineQuery,
    SearchLimitExceeded,
    brute_force_makespan,
    makespan,
    makespan_profile,
    opt,
    optimal_schedule,
)
from darpline.offline import _general_profile


class TestExamples:
    @pytest.mark.parametrize("t", [0, 0.5, 1, 7.25, 100])
    def test_single_visit_from_origin(self, t):
        assert makespan(t, 0, [Request(1, 1, 0)], 1) == 1

    def test_empty(self):
        assert makespan(0, 0, [], 1) == 0
        assert opt(Instance(1)) == 0
        assert brute_force_makespan(OfflineQuery(0, 0, (), 1)) == 0

    def test_capacity_changes_the_route(self):
        reqs = [Request(0, 2, 0), Request(1, 1, 0)]
        assert makespan(0, 0, reqs, 1) == 3
        assert makespan(0, 0, reqs, 2) == 2
        assert brute_force_makespan(OfflineQuery(0, 0, tuple(reqs), 1)) == 3

    def test_generator_optima(self):
        assert opt(gen_waiting_lb(1.5, 0.01)) == pytest.approx(5, abs=1e-12)
        assert opt(gen_nowaiting_lb(1.8, 0.01)) == pytest.approx(7.1875, abs=1e-12)

    def test_wait_for_release(self):
        assert opt(Instance(1, (Request(5, 5, 9),))) == 9

    def test_onboard_request_is_delivered(self):
        q = OfflineQuery(2, 1, (Request(1, 4, 0), Request(0, 0, 0)), 1, frozenset({0}))
        sol = optimal_schedule(q)
        assert sol.makespan == pytest.approx(3 + 4)
        assert brute_force_makespan(q) == pytest.approx(sol.makespan)

    def test_search_limit(self):
        reqs = tuple(Request(i, i + 1, 0) for i in range(11))
        with pytest.raises(SearchLimitExceeded, match="search limit exceeded"):
            opt(Instance(1, reqs))

    def test_large_visit_instances_use_the_interval_dp(self):
        reqs = tuple(Request(0.1 * i, 0.1 * i, 0.1 * i) for i in range(1, 31))
        assert opt(Instance(1, reqs)) == pytest.approx(3.0)


@given(instances(max_size=5))
def test_witness_replays(inst):
    sol = optimal_schedule(OfflineQuery(0, 0, inst.requests, inst.capacity))
    assert schedule_violations(sol.schedule, inst.requests, inst.capacity) == []
    assert sol.schedule.end_time == sol.makespan


@given(instances(max_size=4), st.floats(0, 10), coords)
def test_matches_brute_force(inst, t, p):
    q = OfflineQuery(t, p, inst.requests, inst.capacity)
    assert optimal_schedule(q).makespan == pytest.approx(brute_force_makespan(q), abs=1e-9)


@given(instances(max_size=4, min_size=1), st.floats(0, 12), coords)
def test_profile_matches_search(inst, t, p):
    prof = makespan_profile(p, inst.requests, inst.capacity)
    assert prof(t) == pytest.approx(makespan(t, p, inst.requests, inst.capacity), abs=1e-9)


@given(
    st.lists(st.tuples(coords, releases), min_size=1, max_size=6),
    coords,
    st.floats(0, 12),
)
def test_visit_dp_matches_general_dp(points, p, t):
    reqs = tuple(Request(x, x, r) for x, r in points)
    fast = makespan_profile(p, reqs, 1)
    slow = _general_profile(p, reqs, 1, frozenset())
    assert fast(t) == pytest.approx(slow(t), abs=1e-9)


@given(instances(max_size=4, min_size=1), coords, st.floats(1.05, 4), st.floats(0, 5))
def test_earliest_start_is_the_first_admissible_time(inst, p, theta, now):
    prof = makespan_profile(p, inst.requests, inst.capacity)
    t = prof.earliest_start(theta, now)
    assert t >= now
    assert t >= prof(t) / (theta - 1) - 1e-9
    if t > now + 1e-6:
        s = t - 1e-6
        assert s < prof(s) / (theta - 1)


class TestLaws:
    @given(instances(max_size=4, min_size=1), coords, st.floats(0, 10), st.floats(0, 10))
    def test_monotone_in_start_time(self, inst, p, t, dt):
        prof = makespan_profile(p, inst.requests, inst.capacity)
        assert prof(t) >= prof(t + dt) - 1e-9

    @given(instances(max_size=4, min_size=1), coords, coords, st.floats(0, 10))
    def test_triangle(self, inst, p, q, t):
        lp = makespan(t, p, inst.requests, inst.capacity)
        lq = makespan(t, q, inst.requests, inst.capacity)
        assert lp <= abs(p - q) + lq + 1e-9

    @given(instances(max_size=5, min_size=1), st.floats(0, 12))
    def test_prefix_bound(self, inst, t):
        known = [r for r in inst.requests if r.release <= t]
        assume(known)
        assert makespan(t, 0, known, inst.capacity) <= opt(inst) + 1e-9

    @given(instances(max_size=4, min_size=1))
    def test_start_at_zero_is_opt(self, inst):
        assert makespan(0, 0, inst.requests, inst.capacity) == pytest.approx(opt(inst))


@given(st.lists(requests(), min_size=1, max_size=4), capacities)
def test_more_capacity_never_hurts(reqs, cap):
    tight = makespan(0, 0, reqs, 1)
    loose = makespan(0, 0, reqs, cap)
    assert loose <= tight + 1e-9
    assert makespan(0, 0, reqs, math.inf) <= loose + 1e-9
