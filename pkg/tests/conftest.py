import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jetlift.fields import Chart, TimeDepVectorField, VectorField
from jetlift.poly import Poly, Scalar

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

VARS = ("x", "y", "z", "t")

small_fraction = st.builds(
    Fraction, st.integers(-5, 5), st.integers(1, 4)
)
scalars = st.one_of(
    small_fraction.map(Scalar),
    st.builds(Scalar, small_fraction, small_fraction),
)


@st.composite
def polys(draw, variables=VARS, degree=3, max_terms=4):
    n = len(variables)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.lists(st.integers(0, degree), min_size=n, max_size=n)))
        if sum(exp) > degree:
            continue
        terms[exp] = draw(scalars)
    return Poly(variables, terms)


@st.composite
def fields(draw, chart, degree=2, t_degree=1, time_dependent=True):
    variables = chart.variables
    comps = []
    for _ in range(chart.dim):
        p = draw(polys(variables, degree=degree + t_degree, max_terms=3))
        p = p.truncate(chart.time, t_degree if time_dependent else 0)
        comps.append(p)
    cls = TimeDepVectorField if time_dependent else VectorField
    return cls(chart, comps)


PLANE = Chart(("x", "y"))


@pytest.fixture
def plane():
    return PLANE


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
