import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetlift.fields import Chart, TimeDepVectorField, VectorField
from jetlift.geometry import SubspaceY, TangentFieldOnY
from jetlift.jets import (
    JetMismatch,
    JetSection,
    difference_formula,
    flow_jet,
    jet_difference,
    jet_restrict,
    jets_agree_on,
    truncate_jet,
    velocity_series,
)
from jetlift.poly import substitute_time_curve

from conftest import PLANE, fields

C1 = Chart(("x",))
C2 = PLANE


def F(text, chart=C2):
    return TimeDepVectorField.parse(text, chart)


def curve(J):
    c = J.curve()
    return tuple(str(c[n]) for n in J.chart.coords)


class TestFlowJet:
    def test_straight_line(self):
        assert curve(flow_jet(F("(1, 0)"), 3)) == ("x + t", "y")

    def test_exponential(self):
        J = flow_jet(F("(x)", C1), 2)
        assert J.curve()["x"] == C1.poly("x + t*x + 1/2*t^2*x")

    def test_integrate_t(self):
        assert curve(flow_jet(F("(t, 0)"), 2)) == ("1/2*t^2 + x", "y")

    def test_order_zero_is_identity(self):
        J = flow_jet(F("(x^2 + t, y)"), 0)
        assert J.coeffs == ((C2.coord(0),), (C2.coord(1),))

    def test_json_round_trip(self):
        J = flow_jet(F("(x*y + t, 1/3*y^2 - 1i*x)"), 3)
        assert JetSection.from_json(J.to_json()) == J


class TestTruncateRestrict:
    A = F("(x*y + t^2, x - y*t)")

    def test_truncate_to_own_order(self):
        J = flow_jet(self.A, 3)
        assert truncate_jet(J, 3) == J

    def test_truncate_to_zero_is_identity_section(self):
        assert truncate_jet(flow_jet(self.A, 3), 0) == flow_jet(TimeDepVectorField.zero(C2), 0)

    def test_cannot_raise_order(self):
        with pytest.raises(ValueError):
            truncate_jet(flow_jet(self.A, 2), 3)

    def test_identity_restricts_to_identity(self):
        Y = SubspaceY.from_names(C2, ["y"])
        J = jet_restrict(flow_jet(TimeDepVectorField.zero(C2), 2), Y)
        assert J.coefficient(0) == [C2.coord(0), C2.zero()]
        assert all(c.is_zero() for m in (1, 2) for c in J.coefficient(m))

    def test_normal_multiple_agrees_at_order_one(self):
        Y = SubspaceY.from_names(C2, ["x"])
        B = TimeDepVectorField(C2, [a + C2.poly("x") * b for a, b in zip(self.A, F("(y, 1 + t)"))])
        assert jets_agree_on(flow_jet(self.A, 2), flow_jet(B, 2), Y, 1) is None

    def test_restriction_commutes_with_truncation(self):
        Y = SubspaceY.from_names(C2, ["y"])
        J = flow_jet(self.A, 3)
        for m in range(4):
            assert jet_restrict(truncate_jet(J, m), Y) == truncate_jet(jet_restrict(J, Y), m)


class TestDifference:
    def test_equal_jets(self):
        J = flow_jet(F("(x, y^2)"), 2)
        assert jet_difference(J, J, SubspaceY.whole(C2)).is_zero()

    def test_factorial_normalisation(self):
        # the t^2 coefficient gap is 1/2; times 2! gives (1, 0)
        Y = SubspaceY.whole(C2)
        d = jet_difference(flow_jet(F("(t, 0)"), 2), flow_jet(TimeDepVectorField.zero(C2), 2), Y)
        assert d == TangentFieldOnY(Y, [C2.one(), C2.zero()])

    def test_lower_orders_must_agree(self):
        with pytest.raises(JetMismatch) as info:
            jet_difference(flow_jet(F("(1, 0)"), 2), flow_jet(F("(0, 1)"), 2), SubspaceY.whole(C2))
        assert info.value.order == 1


class TestFormula:
    def test_all_fields_equal(self):
        A = F("(x*y + t, y - x*t)")
        assert difference_formula([A, A], A).is_zero()

    def test_time_derivative_at_zero(self):
        Z = TimeDepVectorField.zero(C2)
        assert difference_formula([Z], F("(t, 0)")) == VectorField.parse("(1, 0)", C2)


class TestVelocity:
    def test_constant_field(self):
        assert [str(v) for v in velocity_series(F("(2, -1)"), 3)] == ["2", "-1"]

    def test_exponential(self):
        (v,) = velocity_series(F("(x)", C1), 3)
        assert v == C1.poly("x + t*x + 1/2*t^2*x")


# --- invariants -----------------------------------------------------------------

td = fields(C2, degree=2, t_degree=2)


@given(td, st.integers(1, 4))
def test_flow_solves_the_ode(A, n):
    J = flow_jet(A, n)
    gamma = J.curve()
    t = C2.time
    for i, a in enumerate(A):
        lhs = gamma[C2.coords[i]].diff(t).truncate(t, n - 1)
        rhs = substitute_time_curve(a, gamma, n - 1, time=t)
        assert lhs == rhs
    vel = velocity_series(A, n)
    assert [v.truncate(t, n - 1) for v in vel] == [gamma[c].diff(t) for c in C2.coords]


@given(td, st.integers(0, 3), st.integers(0, 3))
def test_truncation_is_consistent(A, m, k):
    lo, hi = min(m, k), max(m, k)
    assert truncate_jet(flow_jet(A, hi), lo) == flow_jet(A, lo)


@given(td, td, st.integers(1, 3))
def test_formula_matches_gap(A, E, n):
    # B = A + x^n-type perturbation along Y = {x = 0} and a t^n shift keeps n-jets on Y
    Y = SubspaceY.from_names(C2, ["x"])
    x = C2.poly("x")
    B = TimeDepVectorField(C2, [a + x ** n * e + e.shift("t", n) for a, e in zip(A, E)])
    JA, JB = flow_jet(A, n + 1), flow_jet(B, n + 1)
    assert jets_agree_on(JA, JB, Y, n) is None
    assert jet_difference(JB, JA, Y) == Y.restrict_field(difference_formula([A] * n, B))
