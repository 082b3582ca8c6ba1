import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import instances
from darpline.model import (
    DROPOFF,
    PICKUP,
    Event,
    Instance,
    InstanceError,
    Line,
    ParseError,
    RandomInstanceConfig,
    Request,
    Schedule,
    Trajectory,
    first_crossing,
    fmt12,
    mirror_instance,
    parse_instance,
    random_instance,
    schedule_violations,
    serialize_instance,
    validate_instance,
)


class TestValidation:
    def test_minimal_instance_is_valid(self):
        inst = Instance(1, (Request(1, 1, 0),))
        assert validate_instance(inst) is inst

    def test_zero_capacity(self):
        with pytest.raises(InstanceError, match="capacity ≥ 1 violated"):
            validate_instance(Instance(0, (Request(1, 1, 0),)))

    def test_negative_release_names_index(self):
        with pytest.raises(InstanceError, match="release ≥ 0 violated at index 0"):
            validate_instance(Instance(2, (Request(1, 2, -0.5),)))

    def test_non_finite_field(self):
        with pytest.raises(InstanceError, match="finite destination violated at index 1"):
            validate_instance(Instance(1, (Request(0, 0, 0), Request(0, math.inf, 1))))

    @pytest.mark.parametrize("cap", [1.5, True, "2"])
    def test_bad_capacity_types(self, cap):
        with pytest.raises(InstanceError):
            validate_instance(Instance(cap))

    def test_unbounded_capacity_and_empty_instance(self):
        validate_instance(Instance(math.inf))


class TestMirror:
    def test_sign_flip(self):
        d = 2.41
        assert mirror_instance(Instance(1, (Request(1, d, 1),))).requests == (Request(-1, -d, 1),)

    def test_origin_is_fixed(self):
        assert mirror_instance(Instance(1, (Request(0, 0, 5),))).requests[0] == Request(0, 0, 5)

    @given(instances(max_size=6))
    def test_involution(self, inst):
        assert mirror_instance(mirror_instance(inst)) == inst


class TestTrajectory:
    @pytest.mark.parametrize(
        "points, t, expected",
        [
            (((0, 0), (2, 2)), 1, 1),
            (((0, 0), (3, 0)), 2, 0),
            (((0, 0), (2, 2), (5, -1)), 4, 0),
        ],
    )
    def test_position_at(self, points, t, expected):
        assert Trajectory(points).position_at(t) == pytest.approx(expected, abs=1e-12)

    def test_outside_span(self):
        with pytest.raises(ValueError, match="outside trajectory span"):
            Trajectory(((0, 0), (1, 1))).position_at(2)

    def test_times_must_increase(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            Trajectory(((0, 0), (0, 1)))

    def test_speed_violations(self):
        assert Trajectory(((0, 0), (1, 1), (2, 3))).speed_violations() == [1]
        assert Trajectory(((0, 0), (1, 1), (3, 0))).speed_violations() == []


class TestFirstCrossing:
    def test_waiting_server_meets_rising_line(self):
        assert first_crossing(Trajectory(((0, 0), (10, 0))), Line(1, -5), 0) == pytest.approx(5)

    def test_line_ell_example(self):
        t = first_crossing(Trajectory(((0, 0), (10, 10))), Line(1.9415, -4.234), 0)
        assert t == pytest.approx(4.234 / 0.9415, abs=1e-9)
        assert t == pytest.approx(4.497, abs=1e-3)

    def test_no_crossing_in_span(self):
        assert first_crossing(Trajectory(((0, 1), (2, 1))), Line(1, 10), 0) is None

    def test_hold_extends_last_position(self):
        traj = Trajectory(((0, 0), (1, 1)))
        assert first_crossing(traj, Line(1, -3), 0) is None
        assert first_crossing(traj, Line(1, -3), 0, hold=True) == pytest.approx(4)

    def test_respects_start(self):
        traj = Trajectory(((0, 0), (2, 2), (4, 0)))
        assert first_crossing(traj, Line(0, 1), 0) == pytest.approx(1)
        assert first_crossing(traj, Line(0, 1), 1.5) == pytest.approx(3)

    @given(
        st.lists(st.floats(-1, 1), min_size=1, max_size=6),
        st.floats(-3, 3),
        st.floats(-3, 3),
        st.floats(0, 5),
    )
    def test_mirror_symmetry(self, steps, slope, intercept, start):
        pts, t, x = [(0.0, 0.0)], 0.0, 0.0
        for s in steps:
            t, x = t + 1.0, x + s
            pts.append((t, x))
        traj = Trajectory(tuple(pts))
        line = Line(slope, intercept)
        a = first_crossing(traj, line, start, hold=True)
        b = first_crossing(traj.mirrored(), line.mirrored(), start, hold=True)
        assert (a is None) == (b is None)
        if a is not None:
            assert a == pytest.approx(b, abs=1e-9)
            assert traj.extended(a + 1).position_at(a) == pytest.approx(line.value(a), abs=1e-7)


class TestScheduleChecks:
    reqs = (Request(2, 4, 3), Request(1, 1, 0))

    def test_feasible(self):
        sched = Schedule(
            0,
            0,
            (
                Event(1, PICKUP, 1, 1),
                Event(1, DROPOFF, 1, 1),
                Event(3, PICKUP, 0, 2),
                Event(5, DROPOFF, 0, 4),
            ),
        )
        assert schedule_violations(sched, self.reqs, 1) == []

    def test_pickup_before_release(self):
        sched = Schedule(0, 0, (Event(2, PICKUP, 0, 2), Event(4, DROPOFF, 0, 4)))
        assert any("before release" in p for p in schedule_violations(sched, self.reqs[:1], 1))

    def test_dropoff_away_from_destination(self):
        sched = Schedule(0, 0, (Event(3, PICKUP, 0, 2), Event(4, DROPOFF, 0, 3)))
        assert any("away from destination" in p for p in schedule_violations(sched, self.reqs[:1], 1))

    def test_capacity(self):
        reqs = (Request(1, 3, 0), Request(1, 3, 0))
        sched = Schedule(
            0,
            0,
            (
                Event(1, PICKUP, 0, 1),
                Event(1, PICKUP, 1, 1),
                Event(3, DROPOFF, 0, 3),
                Event(3, DROPOFF, 1, 3),
            ),
        )
        assert any("capacity" in p for p in schedule_violations(sched, reqs, 1))
        assert schedule_violations(sched, reqs, 2) == []

    def test_reachability(self):
        sched = Schedule(0, 0, (Event(3, PICKUP, 0, 2), Event(3.5, DROPOFF, 0, 4)))
        assert any("unreachable" in p for p in schedule_violations(sched, self.reqs[:1], 1))

    def test_incomplete(self):
        sched = Schedule(0, 0, (Event(1, PICKUP, 1, 1), Event(1, DROPOFF, 1, 1)))
        assert any("never delivered" in p for p in schedule_violations(sched, self.reqs, 1))
        assert schedule_violations(sched, self.reqs, 1, complete=False) == []


class TestFileFormat:
    def test_single_request(self):
        assert parse_instance("capacity 1\nrequest 1 1 0\n") == Instance(1, (Request(1, 1, 0),))

    def test_empty_unbounded(self):
        assert parse_instance("capacity inf\n") == Instance(math.inf, ())

    def test_round_trip_fixture(self):
        text = (
            "capacity 2\n"
            "request 1 2.5 0\n"
            "request -1 -1 0.5\n"
            "request 0 3 1\n"
            "request 2 -2 1.25\n"
            "request -3.5 4 2\n"
            "request 0.1 0.1 7\n"
        )
        assert serialize_instance(parse_instance(text)) == text

    def test_comments_and_sorting(self):
        inst = parse_instance("# header\ncapacity 1\nrequest 0 0 5  # late\nrequest 1 1 2\n")
        assert [r.release for r in inst.requests] == [2, 5]

    @pytest.mark.parametrize(
        "text, message",
        [
            ("request 1 1 0\n", "line 1: request before capacity"),
            ("capacity 1\nrequest 1 x 0\n", "line 2: not a number"),
            ("capacity 1\nrequest 1 1 -1\n", "line 2: release ≥ 0 violated"),
            ("capacity 0\n", "line 1: capacity ≥ 1 violated"),
            ("capacity 1\ncapacity 2\n", "line 2: duplicate capacity"),
            ("capacity 1\nfoo\n", "line 2: unknown keyword"),
            ("", "missing capacity"),
        ],
    )
    def test_errors(self, text, message):
        with pytest.raises(ParseError, match=message):
            parse_instance(text)

    @given(instances(max_size=6))
    def test_serialize_is_exact(self, inst):
        assert parse_instance(serialize_instance(inst)) == inst


def test_fmt12():
    assert fmt12(1.0) == "1.0"
    assert fmt12(3.19) == "3.19"
    assert fmt12(1 / 3) == "0.333333333333"
    assert fmt12(math.inf) == "inf"
    assert fmt12(1e20) == "1e+20"


def test_random_instances_are_reproducible():
    cfg = RandomInstanceConfig(n=5, radius=3.0, capacity=2, visit_fraction=0.5)
    a = random_instance(np.random.default_rng(7), cfg)
    b = random_instance(np.random.default_rng(7), cfg)
    assert a == b
    assert len(a) == 5
    assert all(-3 <= p <= 3 for r in a.requests for p in (r.origin, r.destination))
    assert all(0 <= r.release <= 6 for r in a.requests)
