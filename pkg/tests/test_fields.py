from fractions import Fraction

import pytest
from hypothesis import given

from jetlift.fields import (
    D,
    DT,
    Chart,
    TimeDepVectorField,
    VectorField,
    iterated_lie_D,
    iterated_lie_on_dt,
    lie_bracket,
    lie_D,
    t_power_over_factorial,
)

from conftest import PLANE, fields

C2 = PLANE
C3 = Chart(("x", "y", "z"))


def F(text, chart=C2):
    return TimeDepVectorField.parse(text, chart)


def VF(text, chart=C2):
    return VectorField.parse(text, chart)


class TestBracket:
    def test_self_bracket(self):
        A = F("(x*y + t, y^2 - x)")
        assert lie_bracket(A, A).is_zero()

    def test_hand_example(self):
        assert lie_bracket(VF("(y, 0)"), VF("(0, x)")) == VF("(-x, y)")

    def test_t_power_commutes(self):
        A, B = F("(x*t, y)"), VF("(x^2, 1)")
        for n in range(4):
            assert lie_bracket(A, B.times_t_power(n)) == lie_bracket(A, B).times_t_power(n)

    def test_t_power_over_factorial(self):
        assert t_power_over_factorial(C2, 3) == C2.t() ** 3 * Fraction(1, 6)

    def test_vector_fields_stay_time_free(self):
        assert isinstance(lie_bracket(VF("(x, y)"), VF("(y, 0)")), VectorField)

    def test_time_in_vector_field_rejected(self):
        with pytest.raises(ValueError):
            VF("(t, 0)")


class TestLieD:
    def test_pure_time_derivative(self):
        assert lie_D(TimeDepVectorField.zero(C2), F("(t, 0)")) == F("(1, 0)")

    def test_time_free_self_derivative(self):
        A = F("(x^2 - y, 3*x*y)")
        assert lie_D(A, A).is_zero()
        for m in range(1, 4):
            assert iterated_lie_D(A, A, m).is_zero()

    def test_shift_formula_n2(self):
        A, B = VF("(x, 0)"), VF("(0, y)")
        lhs = lie_D(A, B.times_t_power(2, Fraction(1, 2)))
        rhs = lie_bracket(A, B).times_t_power(2, Fraction(1, 2)) + B.times_t_power(1)
        assert lhs == rhs

    def test_two_time_derivatives(self):
        Z = TimeDepVectorField.zero(C2)
        C = VF("(3, -1/2)")
        assert iterated_lie_D(Z, C.times_t_power(2), 2) == C.scale(2)


class TestAtTimeZero:
    def test_constant_term(self):
        assert F("(x + t^2, y*t)").at_time_zero() == VF("(x, 0)")

    def test_pure_t_multiple(self):
        assert F("(t*x, t*y)").at_time_zero().is_zero()

    def test_series(self):
        A = F("(x + t*y, 1 + t^2)")
        assert A.time_coefficients() == [VF("(x, 1)"), VF("(y, 0)"), VF("(0, 1)")]


class TestDtSequences:
    def test_single_time_free(self):
        assert iterated_lie_on_dt([F("(x*y, x)")]).is_zero()

    def test_against_product_bracket(self):
        A, B = F("(t, 0)"), TimeDepVectorField.zero(C2)
        got = iterated_lie_on_dt([B, A])
        brute = D(B).bracket(D(A).bracket(DT(C2)))
        assert brute.dtcoeff.is_zero()
        assert got == brute.xpart

    def test_empty_sequence(self):
        with pytest.raises(ValueError):
            iterated_lie_on_dt([])


# --- invariants -----------------------------------------------------------------

td = fields(C3, degree=2, t_degree=2)


@given(td, td, td)
def test_jacobi(A, B, C):
    total = (lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A))
             + lie_bracket(C, lie_bracket(A, B)))
    assert total.is_zero()


@given(td, td)
def test_antisymmetry(A, B):
    assert lie_bracket(A, B) == -lie_bracket(B, A)


@given(td, td)
def test_lie_D_is_product_bracket(A, B):
    # D(A) applied to B on the product equals d/dt B + [A, B]
    prod = D(A).bracket(DDt_free(B))
    assert prod.dtcoeff.is_zero()
    assert prod.xpart == lie_D(A, B)


def DDt_free(B):
    from jetlift.fields import DtTaggedField

    return DtTaggedField(B, 0)


@given(td, td, td)
def test_dt_sequence_matches_brute_force(A, B, C):
    seq = [A, B, C]
    brute = DT(C3)
    for X in reversed(seq):
        brute = D(X).bracket(brute)
    assert brute.dtcoeff.is_zero()
    assert iterated_lie_on_dt(seq) == brute.xpart
