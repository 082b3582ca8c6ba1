import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from darpline.model import Instance, Request

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

coords = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3))
releases = st.floats(0, 10, allow_nan=False).map(lambda v: round(v, 3))
capacities = st.sampled_from([1, 2, 3, math.inf])


@st.composite
def requests(draw, visit_share=0.3):
    a = draw(coords)
    b = a if draw(st.floats(0, 1)) < visit_share else draw(coords)
    return Request(a, b, draw(releases))


def instances(max_size=4, min_size=0):
    return st.builds(
        lambda cap, reqs: Instance(cap, tuple(reqs)).sorted(),
        capacities,
        st.lists(requests(), min_size=min_size, max_size=max_size),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
