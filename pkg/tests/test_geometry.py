import pytest
from hypothesis import given

from jetlift.fields import TimeDepVectorField, VectorField, lie_bracket
from jetlift.geometry import (
    INCONCLUSIVE,
    NON_MEMBER,
    ConstantSpan,
    ExplicitModule,
    FoliationSpan,
    FullRestriction,
    FullTangent,
    SubspaceY,
    TangentFieldOnY,
    check_bracket_closed,
    f_membership,
    g_membership,
    solve_module_membership,
)
from jetlift.symplectic import DarbouxSpace, Perp

from conftest import PLANE, polys, scalars

C2 = PLANE


def VF(text):
    return VectorField.parse(text, C2)


def on(Y, text):
    return Y.restrict_field(VF(text))


class TestSubspace:
    def test_names(self):
        Y = SubspaceY.from_names(C2, ["y"])
        assert Y.free_names == ("x",) and Y.vanishing_names == ("y",)

    def test_unknown_coordinate(self):
        with pytest.raises(ValueError):
            SubspaceY.from_names(C2, ["z"])

    def test_tangent_field_must_live_on_Y(self):
        Y = SubspaceY.from_names(C2, ["y"])
        with pytest.raises(ValueError):
            TangentFieldOnY(Y, [C2.poly("y"), C2.zero()])


class TestBracketClosed:
    def test_rank_one(self):
        assert check_bracket_closed(ConstantSpan(C2, [VF("(1, 0)")]))["closed"]

    def test_not_closed(self):
        rep = check_bracket_closed(ConstantSpan(C2, [VF("(y, 0)"), VF("(0, x)")]))
        assert not rep["closed"]
        assert rep["pairs"][0]["verdict"] == NON_MEMBER

    def test_foliation_rank_one(self):
        assert check_bracket_closed(FoliationSpan(C2, [VF("(1, x)")]))["closed"]


class TestFMembership:
    F = FoliationSpan(C2, [VF("(1, 0)")])

    def test_generator_has_unit_witness(self):
        cert = self.F.contains(VF("(1, 0)"))
        assert cert.is_member and cert.witness == [C2.one()]

    def test_function_multiple(self):
        cert = self.F.contains(VF("(y, 0)"))
        assert cert.is_member and cert.witness == [C2.poly("y")]

    def test_component_obstruction(self):
        assert self.F.contains(VF("(0, 1)")).verdict == NON_MEMBER

    def test_time_coefficients(self):
        A = TimeDepVectorField.parse("(y + t*x, 0)", C2)
        assert f_membership(A, self.F).is_member
        B = TimeDepVectorField.parse("(y, t)", C2)
        cert = f_membership(B, self.F)
        assert cert.verdict == NON_MEMBER and "t^1" in cert.reason


class TestGMembership:
    space = DarbouxSpace(1)
    Y = SubspaceY.from_names(space.chart, ["x"])

    def test_zero_always_member(self):
        for G in (Perp(self.space), ExplicitModule([], None), FullRestriction(FullTangent(C2))):
            assert g_membership(TangentFieldOnY.zero_on(self.Y), G).is_member

    def test_perp_member(self):
        assert g_membership(on(self.Y, "(0, -y)"), Perp(self.space)).is_member

    def test_perp_non_member(self):
        assert g_membership(on(self.Y, "(1, 0)"), Perp(self.space)).verdict == NON_MEMBER


class TestSolve:
    Y = SubspaceY.from_names(C2, ["y"])
    G1 = [C2.poly("1"), C2.poly("x")]

    def test_ideal_multiple(self):
        target = [C2.poly("x"), C2.poly("x^2")]
        cert = solve_module_membership(target, [self.G1], [C2.poly("x")], free_names=("x",))
        assert cert.is_member and cert.witness == [C2.poly("x")]

    def test_evaluation_obstruction(self):
        cert = solve_module_membership(self.G1, [self.G1], [C2.poly("x")], free_names=("x",))
        assert cert.verdict == NON_MEMBER
        assert "does not vanish" in cert.reason

    def test_zero_target(self):
        cert = solve_module_membership([C2.zero(), C2.zero()], [self.G1])
        assert cert.is_member and all(w.is_zero() for w in cert.witness)

    def test_zero_ideal(self):
        cert = solve_module_membership(self.G1, [self.G1], [C2.zero()])
        assert cert.verdict == NON_MEMBER

    def test_inconclusive_is_distinct(self):
        # x^5 is in (x) but not reachable at degree bound 2; no point obstructs it
        cert = solve_module_membership([C2.poly("x^5")], [[C2.one()]], [C2.poly("x")],
                                       bound=2, free_names=("x",))
        assert cert.verdict == INCONCLUSIVE

    def test_truncated_solve(self):
        target = [C2.poly("t*x + t^3")]
        cert = solve_module_membership(target, [[C2.one()]], truncate=("t", 1), free_names=("x",))
        assert cert.is_member and cert.witness == [C2.poly("t*x")]


# --- invariants -----------------------------------------------------------------

F_fol = FoliationSpan(C2, [VF("(1, x)")])
Yfol = SubspaceY.from_names(C2, ["y"])
G_expl = ExplicitModule([[C2.poly("1"), C2.poly("x")]], [C2.poly("x")])
xpolys = polys(("x", "y", "t"), degree=2, max_terms=3).map(lambda p: p.set_zero(["y", "t"]))


@given(xpolys, xpolys, scalars)
def test_G_is_a_module(f, g, c):
    x = C2.poly("x")
    v1 = TangentFieldOnY(Yfol, [x * f, x * x * f])
    v2 = TangentFieldOnY(Yfol, [x * g, x * x * g])
    assert g_membership(v1, G_expl).is_member
    assert g_membership(v1 + v2.scale(c), G_expl).is_member


@given(polys(("x", "y", "t"), degree=2).map(lambda p: p.set_zero(["t"])))
def test_certificates_reproduce(f):
    A = VF("(1, x)").scale(f)
    cert = F_fol.contains(A)
    assert cert.is_member
    assert F_fol.combine(cert.witness) == A


@given(polys(("x", "y", "t"), degree=2).map(lambda p: p.set_zero(["t"])),
       polys(("x", "y", "t"), degree=1).map(lambda p: p.set_zero(["t"])))
def test_obstruction_axiom_full(f, q):
    # fields of F agreeing on Y bracket into the full restriction
    A = VF("(1, x)").scale(f)
    B = VF("(1, x)").scale(f + C2.poly("y") * q)
    r = Yfol.restrict_field(lie_bracket(A, B))
    assert g_membership(r, FullRestriction(F_fol)).is_member
