import itertools

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hfactor.host import host_from_edges
from hfactor.pattern import pattern_from_edges

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def graph_patterns(draw, max_v=6):
    v = draw(st.integers(min_value=2, max_value=max_v))
    pool = list(itertools.combinations(range(v), 2))
    edges = draw(
        st.lists(st.sampled_from(pool), min_size=1, max_size=len(pool), unique=True)
    )
    return pattern_from_edges(2, v, edges)


@st.composite
def graph_hosts(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pool = list(itertools.combinations(range(n), 2))
    edges = draw(
        st.lists(st.sampled_from(pool), min_size=0, max_size=len(pool), unique=True)
    )
    return host_from_edges(2, n, edges)


@pytest.fixture
def strategies():
    return {"patterns": graph_patterns, "hosts": graph_hosts}
