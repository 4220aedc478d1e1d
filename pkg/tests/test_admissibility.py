import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetlift.admissibility import (
    admissibility_defect,
    admissible_difference,
    bracket_shift_residual,
    correction_field,
    extend_admissible,
    extended_field,
    extension_congruences,
    is_admissible,
    mixed_sequence_defects,
)
from jetlift.fields import TimeDepVectorField, VectorField, iterated_lie_D, lie_bracket
from jetlift.geometry import HypothesisError
from jetlift.jets import flow_jet, jet_difference, jets_agree_on
from jetlift.symplectic import DarbouxSpace, ham_field, symplectic_setup

from conftest import PLANE, fields

SPACE = DarbouxSpace(1)
C2 = SPACE.chart
SETUP = symplectic_setup(1, ["x"])
Y, G, F = SETUP.subspace, SETUP.obstruction, SETUP.sheaf


def X(H):
    return ham_field(C2.poly(H), SPACE)


def T(text):
    return TimeDepVectorField.parse(text, C2)


class TestDefects:
    def test_time_independent_vanishes(self):
        A = X("x^2*y + y^3")
        assert all(d.is_zero() for d in admissibility_defect(A, 4, Y))

    def test_first_defect_is_linear_coefficient(self):
        A0, A1 = VectorField.parse("(x*y, y)", C2), VectorField.parse("(1, x^2)", C2)
        A = A0 + A1.times_t_power(1)
        assert admissibility_defect(A, 1, Y)[0] == Y.restrict_field(A1)

    def test_against_direct_expansion(self):
        A = T("(x*y + t*y^2, t^2*x - y)")
        direct = [Y.restrict_field(iterated_lie_D(A, A, m).at_time_zero()) for m in (1, 2, 3)]
        assert admissibility_defect(A, 3, Y) == direct

    def test_symplectic_report(self):
        A = X("x*y") + X("x^2").times_t_power(1)
        rep = is_admissible(A, 2, Y, G, F)
        assert rep.admissible
        # second defect by hand: [X_xy, X_x^2] = (0, -4x), which vanishes on x = 0
        assert lie_bracket(X("x*y"), X("x^2")) == VectorField.parse("(0, -4*x)", C2)
        assert [d.is_zero() for d in rep.defects] == [True, True]

    def test_failure_is_located(self):
        A = X("x*y") + X("y").times_t_power(1)
        rep = is_admissible(A, 2, Y, G, F)
        assert not rep.admissible and rep.first_failure() == 1

    def test_outside_F_is_a_hypothesis_error(self):
        with pytest.raises(HypothesisError):
            is_admissible(T("(x, 0)"), 1, Y, G, F)


class TestExtension:
    def test_trivial_extension(self):
        A = X("x*y + y^2")
        assert extend_admissible(A, None, 2, Y, G, F) == A

    def test_hand_example(self):
        A, delta = X("x*y"), X("x")
        assert delta == VectorField.parse("(0, -1)", C2)
        E = correction_field(A, delta, 1)
        assert E == -lie_bracket(A, delta) == VectorField.parse("(0, 1)", C2)
        B = extend_admissible(A, delta, 1, Y, G, F)
        assert B == T("(x, -y - t + 1/2*t^2)")
        assert is_admissible(B, 2, Y, G, F).admissible
        JA, JB = flow_jet(A, 2), flow_jet(B, 2)
        assert jets_agree_on(JA, JB, Y, 1) is None
        assert jet_difference(JB, JA, Y) == Y.restrict_field(delta)
        assert extension_congruences(A, delta, E, 1).ok

    def test_correction_must_be_in_G(self):
        with pytest.raises(HypothesisError, match="not in G"):
            extend_admissible(X("x*y"), X("y"), 1, Y, G, F)

    def test_non_admissible_input(self):
        A = X("x*y") + X("y").times_t_power(1)
        with pytest.raises(HypothesisError, match="not 1-admissible"):
            extend_admissible(A, None, 1, Y, G, F)

    def test_time_dependent_correction_rejected(self):
        with pytest.raises(HypothesisError):
            extend_admissible(X("x*y"), T("(0, t)"), 1, Y, G, F)


class TestDifference:
    def test_same_field(self):
        A = X("x*y")
        d, cert = admissible_difference(A, A, 1, Y, G)
        assert d.is_zero() and cert.is_member

    def test_agreeing_hamiltonians(self):
        A, B = X("x*y"), X("x*y + x^2*y")
        assert B == VectorField.parse("(x + x^2, -y - 2*x*y)", C2)
        assert lie_bracket(A, B) == VectorField.parse("(x^2, -2*x*y)", C2)
        d, cert = admissible_difference(A, B, 1, Y, G)
        assert d == Y.restrict_field(lie_bracket(A, B)) and cert.is_member

    def test_extension_feeds_difference(self):
        A, delta = X("x*y"), X("x - x*y^2")
        B = extend_admissible(A, delta, 2, Y, G, F)
        d, cert = admissible_difference(A, B, 2, Y, G)
        assert d == Y.restrict_field(delta) and cert.is_member

    def test_mixed_sequences(self):
        A, B = X("x*y"), X("x*y + x^2*y")
        out = mixed_sequence_defects(A, B, 2, Y, G)
        assert [lab for lab, _, _ in out] == ["AA", "AB", "BA", "BB"]
        assert all(c.is_member for _, _, c in out)


# --- invariants -----------------------------------------------------------------

td = fields(PLANE, degree=2, t_degree=2)
tf = fields(PLANE, degree=2, time_dependent=False)


@given(td, tf, tf, st.integers(1, 3))
def test_congruences_hold_for_any_data(A, delta, E, n):
    assert extension_congruences(A, delta, E, n).ok


@given(td, tf, tf, td, st.integers(1, 3))
def test_bracket_shift_identity(A, delta, E, Fd, n):
    assert bracket_shift_residual(A, delta, E, n, Fd).is_zero()


@given(td, tf, st.integers(1, 2))
def test_extended_field_shape(A, delta, n):
    E = correction_field(A, delta, n)
    B = extended_field(A, delta, E, n)
    gap = B - A
    assert gap.truncate(n - 1).is_zero()
    assert gap.truncate(n + 1) == gap
