"""Randomized property checks over the bundled geometries.

Every case draws from its own ``random.Random`` seeded by
``(seed, check name, case index)``, so results do not depend on the order
in which cases run or on how many worker processes are used.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable

from .admissibility import (
    admissible_difference,
    bracket_shift_residual,
    correction_field,
    extend_admissible,
    extension_congruences,
    is_admissible,
    mixed_sequence_defects,
)
from .fields import (
    D,
    Chart,
    DtTaggedField,
    TimeDepVectorField,
    VectorField,
    iterated_lie_D,
    iterated_lie_on_dt,
    lie_bracket,
    lie_D,
)
from .foliation import (
    TangencyTwist,
    check_foliation_bracket,
    tangency_ideal,
    velocity_in_foliation,
)
from .geometry import (
    INCONCLUSIVE,
    DeformationSetup,
    ExplicitModule,
    FoliationSpan,
    FullRestriction,
    FullTangent,
    SubspaceY,
    TangentFieldOnY,
    g_membership,
    solve_module_membership,
)
from .jets import (
    difference_formula,
    flow_jet,
    jet_difference,
    jet_restrict,
    jets_agree_on,
    truncate_jet,
    velocity_series,
)
from .lifting import DeformationProblem, cech_cocycle, cech_glue, coherent_truncations, lift_to_order
from .poly import Poly, Scalar, monomials_up_to, substitute_time_curve
from .symplectic import (
    DarbouxSpace,
    check_bracket_perp,
    contraction_forms,
    ham_field,
    hamiltonian_extension,
    is_hamiltonian,
    poisson_bracket,
    pullback_form_along_flow,
    symplectic_setup,
)

__all__ = [
    "PASS",
    "FAIL",
    "CaseOutcome",
    "CheckResult",
    "CHECKS",
    "CRITERIA",
    "case_rng",
    "run_check",
    "run_suite",
    "random_poly",
    "random_field",
    "SymplecticGeometry",
    "FoliationGeometry",
    "FullGeometry",
    "random_geometry",
]

PASS = "pass"
FAIL = "fail"


# --- random data -----------------------------------------------------------


def case_rng(seed: int, name: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{name}:{index}")


def random_scalar(rng: random.Random, gaussian: float = 0.1) -> Scalar:
    re = rng.choice([1, -1, 2, -2, 3, -3, Fraction(1, 2), Fraction(-2, 3)])
    if rng.random() < gaussian:
        return Scalar(re, rng.choice([1, -1, 2]))
    return Scalar(re)


def random_poly(rng: random.Random, variables, names, degree: int, terms: int = 3,
                min_degree: int = 0, gaussian: float = 0.1) -> Poly:
    names = list(names)
    if not names or degree < 0:
        return Poly.zero(variables)
    pos = [variables.index(n) for n in names]
    monos = [e for e in monomials_up_to(len(names), degree) if sum(e) >= min_degree]
    if not monos:
        return Poly.zero(variables)
    out = {}
    for e in rng.sample(monos, min(terms, len(monos))):
        full = [0] * len(variables)
        for p, k in zip(pos, e):
            full[p] = k
        out[tuple(full)] = random_scalar(rng, gaussian)
    return Poly(variables, out)


def random_field(rng: random.Random, chart: Chart, degree: int, t_degree: int = 0,
                 terms: int = 3) -> TimeDepVectorField:
    comps = []
    for _ in range(chart.dim):
        p = chart.zero()
        for k in range(t_degree + 1):
            p = p + random_poly(rng, chart.variables, chart.coords, degree, terms).shift(chart.time, k)
        comps.append(p)
    return TimeDepVectorField(chart, comps)


def ideal_power_element(rng: random.Random, Y: SubspaceY, k: int, degree: int, terms: int = 2) -> Poly:
    """A random element of ``I_Y^k``."""
    chart = Y.chart
    out = chart.zero()
    van = Y.vanishing_names
    if not van:
        return out
    for _ in range(terms):
        m = chart.one()
        for _ in range(k):
            m = m * Poly.var(rng.choice(van), chart.variables)
        out = out + m * random_poly(rng, chart.variables, chart.coords, max(degree - k, 0), 2)
    return out


def _random_vanishing(rng: random.Random, n: int, allow=None) -> list:
    pool = list(range(n)) if allow is None else list(allow)
    k = rng.randint(1, max(1, len(pool) - (0 if allow is not None else 1)))
    return sorted(rng.sample(pool, k))


class Geometry:
    """A bundled (F, G) pair with random generators of fields and corrections."""

    kind = "abstract"
    setup: DeformationSetup

    @property
    def chart(self) -> Chart:
        return self.setup.chart

    @property
    def Y(self) -> SubspaceY:
        return self.setup.subspace

    def field(self, rng) -> VectorField:
        raise NotImplementedError

    def correction(self, rng) -> VectorField:
        """A field in F whose restriction lies in G."""
        raise NotImplementedError

    def agreeing(self, rng, n: int):
        """Time-independent fields of F with equal ``n``-jets on Y."""
        raise NotImplementedError

    def time_dependent_field(self, rng, t_degree: int = 2) -> TimeDepVectorField:
        out = TimeDepVectorField.zero(self.chart)
        for k in range(t_degree + 1):
            out = out + self.field(rng).times_t_power(k)
        return out

    def admissible(self, rng, n: int) -> TimeDepVectorField:
        """An ``n``-admissible field built by lifting a random seed with random corrections."""
        A = TimeDepVectorField(self.chart, self.field(rng).components)
        for m in range(1, n):
            A = extend_admissible(A, self.correction(rng), m, self.Y, self.setup.obstruction,
                                  check_admissible=False)
        return A

    def describe(self) -> str:
        return f"{self.kind} dim={self.chart.dim} Y={{{', '.join(n + '=0' for n in self.Y.vanishing_names)}}}"


class SymplecticGeometry(Geometry):
    kind = "symplectic"

    def __init__(self, N: int, vanishing):
        self.space = DarbouxSpace(N)
        self.setup = symplectic_setup(N, vanishing)

    @classmethod
    def random(cls, rng):
        N = 1 if rng.random() < 0.7 else 2
        chart = DarbouxSpace(N).chart
        van = _random_vanishing(rng, 2 * N)
        return cls(N, [chart.coords[i] for i in van])

    def hamiltonian(self, rng, degree: int = 3) -> Poly:
        c = self.chart
        return random_poly(rng, c.variables, c.coords, degree, 3, min_degree=1)

    def field(self, rng):
        return ham_field(self.hamiltonian(rng), self.space)

    def correction(self, rng):
        H = ideal_power_element(rng, self.Y, 1, 3)
        return ham_field(H, self.space)

    def agreeing(self, rng, n: int):
        H = self.hamiltonian(rng)
        q = ideal_power_element(rng, self.Y, n + 1, n + 2, 1)
        K = random_poly(rng, self.chart.variables, self.chart.coords, 1, 2)
        return ham_field(H, self.space), ham_field(H + q * K, self.space)


def _graph_foliation(rng, dim: int):
    """Rank-1 span of ``e_1 + sum p_k e_k`` (never vanishes)."""
    chart = Chart.standard(dim)
    comps = [chart.one()]
    for _ in range(dim - 1):
        comps.append(random_poly(rng, chart.variables, chart.coords, 2, 2, gaussian=0.0))
    return chart, [VectorField(chart, comps)]


class FoliationGeometry(Geometry):
    """Regular foliations with principal or monomial tangency ideals.

    Rank 1: the span of ``e_1 + sum_k p_k e_k``.  Rank 2 in dimension 3:
    level sets of ``x3 - phi(x1, x2)`` with ``phi`` a monomial, spanned by
    the commuting fields ``e_i + d_i phi e_3``.
    """

    kind = "foliation"

    def __init__(self, chart: Chart, generators, vanishing):
        F = FoliationSpan(chart, generators)
        Y = SubspaceY.from_names(chart, vanishing)
        self.foliation = F
        self.setup = DeformationSetup(chart, Y, F, TangencyTwist(F), name="foliation")
        self.ideal = tangency_ideal(F, Y)

    @classmethod
    def random(cls, rng):
        shape = rng.choice(["plane", "plane", "graph3", "graph3-mono", "rank2"])
        if shape == "plane":
            chart, gens = _graph_foliation(rng, 2)
            van = [1] if rng.random() < 0.85 else [0]
        elif shape == "graph3":
            chart, gens = _graph_foliation(rng, 3)
            van = [rng.choice([1, 2])]
        elif shape == "graph3-mono":
            chart = Chart.standard(3)
            comps = [chart.one()]
            for _ in range(2):
                comps.append(random_poly(rng, chart.variables, chart.coords[:1], 2, 1,
                                         min_degree=1, gaussian=0.0))
            gens = [VectorField(chart, comps)]
            van = [1, 2]
        else:
            chart = Chart.standard(3)
            a, b = rng.choice([(2, 0), (1, 1), (2, 1), (1, 2), (3, 0)])
            c = rng.choice([1, -1, 2])
            phi = Poly.monomial((a, b, 0, 0), chart.variables, c)
            gens = [
                VectorField(chart, [chart.one(), chart.zero(), phi.diff("x1")]),
                VectorField(chart, [chart.zero(), chart.one(), phi.diff("x2")]),
            ]
            van = [2] if rng.random() < 0.8 else [0]
        return cls(chart, gens, [chart.coords[i] for i in van])

    def _coeff(self, rng, degree=1) -> Poly:
        c = self.chart
        return random_poly(rng, c.variables, c.coords, degree, 2, gaussian=0.05)

    def field(self, rng):
        return self.foliation.combine([self._coeff(rng) for _ in self.foliation.generators])

    def correction(self, rng):
        coeffs = []
        for _ in self.foliation.generators:
            f = ideal_power_element(rng, self.Y, 1, 2, 1)
            for q in self.ideal.generators:
                f = f + q * self._coeff(rng, 1)
            coeffs.append(f)
        return self.foliation.combine(coeffs)

    def agreeing(self, rng, n: int):
        A = self.field(rng)
        h = [ideal_power_element(rng, self.Y, n, n + 1, 1) for _ in self.foliation.generators]
        return A, A + self.foliation.combine(h)


class FullGeometry(Geometry):
    """Every field, G the whole restriction."""

    kind = "full"

    def __init__(self, dim: int, vanishing):
        chart = Chart.standard(dim)
        F = FullTangent(chart)
        Y = SubspaceY.from_names(chart, vanishing)
        self.setup = DeformationSetup(chart, Y, F, FullRestriction(F), name="full")

    @classmethod
    def random(cls, rng):
        dim = rng.choice([2, 2, 3])
        van = _random_vanishing(rng, dim)
        return cls(dim, [f"x{i + 1}" for i in van])

    def field(self, rng):
        return VectorField(self.chart, random_field(rng, self.chart, 2).components)

    def correction(self, rng):
        return self.field(rng)

    def agreeing(self, rng, n: int):
        A = self.field(rng)
        h = [ideal_power_element(rng, self.Y, n, n + 1, 1) for _ in range(self.chart.dim)]
        return A, A + VectorField(self.chart, h)


GEOMETRIES = {
    "symplectic": SymplecticGeometry,
    "foliation": FoliationGeometry,
    "full": FullGeometry,
}


def random_geometry(rng, kind: str) -> Geometry:
    return GEOMETRIES[kind].random(rng)


# --- outcomes ---------------------------------------------------------------


@dataclass
class CaseOutcome:
    status: str
    detail: str = ""
    inconclusive: int = 0


@dataclass
class CheckResult:
    name: str
    criterion: str
    cases: int
    failures: list = field(default_factory=list)
    inconclusive: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.inconclusive

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "criterion": self.criterion,
            "cases": self.cases,
            "failures": self.failures,
            "inconclusive": self.inconclusive,
            "ok": self.ok,
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _count_inconclusive(certs) -> int:
    return sum(1 for c in certs if getattr(c, "verdict", None) == INCONCLUSIVE)


def _expect(cond: bool, detail: str) -> CaseOutcome:
    return CaseOutcome(PASS if cond else FAIL, "" if cond else detail)


def _cert_outcome(certs, what: str) -> CaseOutcome:
    certs = list(certs)
    inc = _count_inconclusive(certs)
    bad = [c for c in certs if not c.is_member]
    if not bad:
        return CaseOutcome(PASS)
    return CaseOutcome(FAIL, f"{what}: {bad[0].verdict} ({bad[0].reason})", inc)


# --- case functions ---------------------------------------------------------
# Each takes (rng, index) and returns a CaseOutcome.


def case_ring_axioms(rng, i):
    nv = rng.randint(1, 4)
    names = tuple(f"v{k}" for k in range(nv))
    p, q, r = (random_poly(rng, names, names, 4, 4, gaussian=0.3) for _ in range(3))
    ok = (p * q) * r == p * (q * r) and p * (q + r) == p * q + p * r and p * q == q * p
    ok = ok and (p + q) - q == p and (p - p).is_zero()
    return _expect(ok, "ring axiom violated")


def case_leibniz(rng, i):
    names = ("x", "y", "t")
    p, q = (random_poly(rng, names, names, 4, 4, gaussian=0.3) for _ in range(2))
    v = rng.choice(names)
    return _expect((p * q).diff(v) == p * q.diff(v) + q * p.diff(v), "Leibniz rule violated")


def case_subst_homomorphism(rng, i):
    chart = Chart(("x", "y"))
    V = chart.variables
    p, q = (random_poly(rng, V, V, 3, 3) for _ in range(2))
    n = rng.randint(0, 4)
    curve = {c: random_poly(rng, V, ("t",), 3, 3) + chart.coord(k) for k, c in enumerate(chart.coords)}
    lhs = substitute_time_curve(p * q, curve, n)
    rhs = (substitute_time_curve(p, curve, n) * substitute_time_curve(q, curve, n)).truncate("t", n)
    return _expect(lhs == rhs, "substitution is not multiplicative modulo t^(n+1)")


def case_restriction_ring_map(rng, i):
    chart = Chart.standard(3)
    V = chart.variables
    Y = SubspaceY(chart, tuple(_random_vanishing(rng, 3)))
    p, q = (random_poly(rng, V, V, 3, 4) for _ in range(2))
    ok = Y.restrict(p * q) == Y.restrict(p) * Y.restrict(q)
    ok = ok and Y.restrict(p + q) == Y.restrict(p) + Y.restrict(q)
    return _expect(ok, "restriction does not commute with ring operations")


def case_jacobi(rng, i):
    chart = Chart.standard(rng.randint(1, 3))
    A, B, C = (random_field(rng, chart, 2, 1) for _ in range(3))
    s = lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A)) + lie_bracket(C, lie_bracket(A, B))
    return _expect(s.is_zero(), "Jacobi identity fails")


def case_time_calculus(rng, i):
    """``[A, t^n B] = t^n [A, B]`` and the Lie_D rule for ``t^n/n! B``."""
    chart = Chart.standard(rng.randint(1, 3))
    A = random_field(rng, chart, 3, rng.randint(0, 2))
    B = random_field(rng, chart, 3, rng.randint(0, 2))
    n = rng.randint(1, 4)
    f1 = lie_bracket(A, B.times_t_power(n)) - lie_bracket(A, B).times_t_power(n)
    c = Fraction(1, factorial(n))
    lhs = lie_D(A, B.times_t_power(n, c))
    rhs = (
        lie_bracket(A, B).times_t_power(n, c)
        + B.times_t_power(n - 1, Fraction(1, factorial(n - 1)))
        + B.dt().times_t_power(n, c)
    )
    if not f1.is_zero():
        return CaseOutcome(FAIL, f"t^n bracket rule residual {f1}")
    return _expect((lhs - rhs).is_zero(), f"Lie_D rule residual {lhs - rhs}")


def _word_apply(word, Z, fields):
    out = Z
    for c in reversed(word):
        out = fields[c].bracket(out)
    return out


def case_bracket_expansion(rng, i):
    """``Lie_{R^m} Z`` as the signed sum of words in D(A), D(B)."""
    chart = Chart.standard(rng.randint(1, 2))
    A = random_field(rng, chart, 2, 1)
    B = random_field(rng, chart, 2, 1)
    Z = DtTaggedField(random_field(rng, chart, 2, 1), random_poly(rng, chart.variables, chart.variables, 2, 2))
    m = rng.choice([2, 3])
    DA, DB = D(A), D(B)
    R = DA.bracket(DB)
    poly = {"AB": 1, "BA": -1}
    for _ in range(m - 2):
        R = DA.bracket(R)
        nxt: dict = {}
        for w, c in poly.items():
            nxt["A" + w] = nxt.get("A" + w, 0) + c
            nxt[w + "A"] = nxt.get(w + "A", 0) - c
        poly = nxt
    if R.dtcoeff:
        return CaseOutcome(FAIL, "iterated bracket of D-fields has a d/dt component")
    lhs = R.bracket(Z)
    rhs = None
    for w, c in poly.items():
        if c:
            term = _word_apply(w, Z, {"A": DA, "B": DB}).scale(c)
            rhs = term if rhs is None else rhs + term
    return _expect(lhs == rhs, "expansion of the iterated bracket fails")


def case_lie_D_oracle(rng, i):
    """``Lie_{D(A)} B`` agrees with the x-part of the bracket on the product."""
    chart = Chart.standard(rng.randint(1, 3))
    A, B = random_field(rng, chart, 2, 2), random_field(rng, chart, 2, 2)
    br = D(A).bracket(DtTaggedField(B, 0))
    ok = br.dtcoeff.is_zero() and br.xpart == lie_D(A, B)
    return _expect(ok, "Lie_D disagrees with the product bracket")


def case_dt_sequences(rng, i):
    """Iterating Lie_D(A) on d/dt is minus iterating it on A."""
    chart = Chart.standard(rng.randint(1, 3))
    A = random_field(rng, chart, 2, 2)
    m = rng.randint(1, 3)
    lhs = iterated_lie_on_dt([A] * m)
    return _expect(lhs == -iterated_lie_D(A, A, m), "d/dt sequence identity fails")


def case_flow_ode(rng, i):
    chart = Chart.standard(rng.randint(1, 3))
    A = random_field(rng, chart, rng.randint(1, 3) if chart.dim < 3 else 2, rng.randint(0, 1), terms=2)
    n = rng.randint(1, 4)
    vel = velocity_series(A, n)
    J = flow_jet(A, n - 1) if n > 1 else None
    curve = J.curve() if J else {c: chart.coord(k) for k, c in enumerate(chart.coords)}
    comp = [substitute_time_curve(a, curve, n - 1) for a in A]
    ok = all(v == c for v, c in zip(vel, comp))
    return _expect(ok, "flow jet does not solve the defining ODE")


def case_truncation(rng, i):
    chart = Chart.standard(rng.randint(1, 2))
    A = random_field(rng, chart, 2, 1)
    n = rng.randint(1, 4)
    J = flow_jet(A, n)
    ok = all(truncate_jet(J, m) == flow_jet(A, m) for m in range(n + 1))
    A1 = A.truncate(0) + random_field(rng, chart, 2, 2).times_t_power(1)
    ok = ok and flow_jet(A, 1) == flow_jet(A1, 1)
    return _expect(ok, "jet truncation or order-1 dependence fails")


def _equal_jet_pair(rng, chart, Y, n):
    A = random_field(rng, chart, 2, 1)
    x = chart.coord(rng.choice(Y.vanishing)) if Y.vanishing else None

    def perturb():
        C, E = random_field(rng, chart, 1, 1), random_field(rng, chart, 1, 1)
        out = A + E.times_t_power(n)
        if x is not None:
            out = out + C.scale(x ** n)
        return out

    return A, perturb


def case_difference_formula(rng, i, n=None):
    n = n or (i % 3) + 1
    chart = Chart.standard(2)
    Y = SubspaceY(chart, tuple(_random_vanishing(rng, 2)))
    A, perturb = _equal_jet_pair(rng, chart, Y, n)
    B = perturb()
    JA, JB = flow_jet(A, n + 1), flow_jet(B, n + 1)
    d = jet_difference(JB, JA, Y)
    f = Y.restrict_field(difference_formula([A] * n, B))
    if d != f:
        return CaseOutcome(FAIL, f"n={n}: jet gap {d} != formula {f}")
    # the formula also accepts a mixed sequence of fields with the same jets
    mixed = [perturb() for _ in range(n - 1)] + [A]
    f2 = Y.restrict_field(difference_formula(mixed, B))
    return _expect(d == f2, f"n={n}: mixed sequence gives {f2}")


def _geometry_for(rng, i, kinds=("symplectic", "foliation", "full")):
    return random_geometry(rng, kinds[i % len(kinds)])


def case_extension(rng, i, n=None):
    """The extended field is (n+1)-admissible, keeps n-jets, and adds the correction at order n+1."""
    n = n or (i % 2) + 1
    geo = _geometry_for(rng, i // 2)
    st, Y = geo.setup, geo.Y
    A = geo.admissible(rng, n)
    delta = geo.correction(rng)
    B = extend_admissible(A, delta, n, Y, st.obstruction, st.sheaf)
    rep = is_admissible(B, n + 1, Y, st.obstruction, st.sheaf)
    if not rep.admissible:
        return _cert_outcome(rep.verdicts, f"{geo.describe()} n={n}: extension not admissible")
    JA, JB = flow_jet(A, n + 1), flow_jet(B, n + 1)
    bad = jets_agree_on(JA, JB, Y, n)
    if bad is not None:
        return CaseOutcome(FAIL, f"{geo.describe()} n={n}: jets differ at order {bad}")
    d = jet_difference(JB, JA, Y)
    if d != Y.restrict_field(delta):
        return CaseOutcome(FAIL, f"{geo.describe()} n={n}: difference {d} != correction")
    E = correction_field(A, delta, n)
    cong = extension_congruences(A, delta, E, n)
    if not cong.ok:
        return CaseOutcome(FAIL, f"{geo.describe()} n={n}: congruence residuals {cong.to_json()}")
    F = geo.time_dependent_field(rng, 1)
    r = bracket_shift_residual(A, delta, E, n, F)
    return _expect(r.is_zero(), f"{geo.describe()} n={n}: bracket shift residual {r}")


def case_congruences_general(rng, i, n=None):
    """The congruences hold for arbitrary A, Delta, E."""
    n = n or (i % 2) + 1
    chart = Chart.standard(rng.randint(1, 2))
    A = random_field(rng, chart, 2, 2)
    delta = VectorField(chart, random_field(rng, chart, 2).components)
    E = VectorField(chart, random_field(rng, chart, 2).components)
    cong = extension_congruences(A, delta, E, n)
    if not cong.ok:
        return CaseOutcome(FAIL, f"n={n}: residuals {cong.to_json()}")
    F = random_field(rng, chart, 2, 1)
    r = bracket_shift_residual(A, delta, E, n, F)
    return _expect(r.is_zero(), f"n={n}: bracket shift residual {r}")


def _admissible_pair(rng, geo: Geometry, n: int, style: int):
    st = geo.setup
    if style == 0:
        A, B = geo.agreeing(rng, n)
        return TimeDepVectorField(geo.chart, A.components), TimeDepVectorField(geo.chart, B.components)
    A = geo.admissible(rng, n)
    B = extend_admissible(A, geo.correction(rng), n, geo.Y, st.obstruction, check_admissible=False)
    if style == 1:
        return A, B
    B2 = extend_admissible(A, geo.correction(rng), n, geo.Y, st.obstruction, check_admissible=False)
    return B, B2


def case_difference_in_G(rng, i, kind=None):
    kind = kind or ("symplectic", "foliation")[i % 2]
    geo = random_geometry(rng, kind)
    n = rng.choice([1, 2])
    A, B = _admissible_pair(rng, geo, n, i % 3)
    diff, cert = admissible_difference(A, B, n, geo.Y, geo.setup.obstruction)
    if not cert.is_member:
        return CaseOutcome(FAIL, f"{geo.describe()} n={n}: {cert.verdict} {diff} ({cert.reason})",
                           _count_inconclusive([cert]))
    return CaseOutcome(PASS)


def case_mixed_sequences(rng, i, kind=None, n=3):
    kind = kind or ("symplectic", "foliation")[i % 2]
    geo = random_geometry(rng, kind)
    A, B = _admissible_pair(rng, geo, n, i % 3)
    for m in range(1, n + 1):
        if jets_agree_on(flow_jet(A, m), flow_jet(B, m), geo.Y, m) is not None:
            return CaseOutcome(FAIL, "pair construction does not give equal jets")
    certs = []
    for m in range(1, n + 1):
        for labels, v, cert in mixed_sequence_defects(A, B, m, geo.Y, geo.setup.obstruction):
            certs.append(cert)
            if not cert.is_member:
                return CaseOutcome(FAIL, f"{geo.describe()} sequence {labels}: {cert.verdict} {v}",
                                   _count_inconclusive(certs))
    return CaseOutcome(PASS)


def case_lift(rng, i, kind=None, order=4):
    kind = kind or ("symplectic", "foliation")[i % 2]
    geo = random_geometry(rng, kind)
    seed = geo.field(rng)
    corrections = [geo.correction(rng) for _ in range(order - 1)]
    prob = DeformationProblem(geo.setup, seed, order, corrections)
    res = lift_to_order(prob)
    Y = geo.Y
    if not res.report.admissible:
        return _cert_outcome(res.report.verdicts, f"{geo.describe()}: lift not admissible")
    if res.jet.coefficient(1) != list(Y.restrict_field(seed).components):
        return CaseOutcome(FAIL, f"{geo.describe()}: order-1 jet is not the seed")
    for n, (d, c) in enumerate(zip(res.differences, corrections), start=1):
        if d != Y.restrict_field(c):
            return CaseOutcome(FAIL, f"{geo.describe()}: difference at order {n + 1} is {d}")
    return _expect(coherent_truncations(res, Y), f"{geo.describe()}: stages are not coherent")


def case_cech(rng, i, kind=None):
    kind = kind or ("symplectic", "foliation")[i % 2]
    geo = random_geometry(rng, kind)
    n = rng.choice([1, 2])
    st, Y = geo.setup, geo.Y
    A = geo.admissible(rng, n)
    deltas = [geo.correction(rng) for _ in range(3)]
    charts = [extend_admissible(A, d, n, Y, st.obstruction, check_admissible=False) for d in deltas]
    data = cech_cocycle(charts, n, st)
    if not data.invariants_hold():
        return CaseOutcome(FAIL, f"{geo.describe()}: cocycle invariants fail",
                           _count_inconclusive(data.certificates.values()))
    for (j, k), c in data.cocycle.items():
        if c != Y.restrict_field(deltas[j]) - Y.restrict_field(deltas[k]):
            return CaseOutcome(FAIL, f"{geo.describe()}: C_{j}{k} = {c}")
    split = [-Y.restrict_field(d) for d in deltas]
    glued = cech_glue(data, split, st)
    jets = [jet_restrict(flow_jet(B, n + 1), Y) for B in glued.glued]
    ok = all(J == jets[0] for J in jets)
    # the glued jet keeps the common n-jet
    ok = ok and truncate_jet(glued.glued_jet, n) == jet_restrict(flow_jet(A, n), Y)
    return _expect(ok, f"{geo.describe()}: glued charts disagree")


def case_ham_extension(rng, i):
    if i == 0:
        space = DarbouxSpace(1)
        Y = SubspaceY.from_names(space.chart, ["x"])
        v = TangentFieldOnY(Y, [space.chart.one(), space.chart.poly("y")])
        G = hamiltonian_extension(v, Y, space)
        return _expect(G == space.chart.poly("y - x*y"), f"worked example gives {G}")
    geo = SymplecticGeometry.random(rng)
    Y, space = geo.Y, geo.space
    if i % 3 == 1 and len(Y.free) == 1:
        # one-dimensional Y: every section extends
        v = Y.restrict_field(random_field(rng, geo.chart, 3))
    else:
        v = Y.restrict_field(geo.field(rng))
    _, xi = contraction_forms(v, Y, space)
    if not xi.is_closed():
        return CaseOutcome(FAIL, f"{geo.describe()}: contraction form of a restricted Hamiltonian field is not closed")
    G = hamiltonian_extension(v, Y, space)
    return _expect(Y.restrict_field(ham_field(G, space)) == v, f"{geo.describe()}: extension mismatch")


def case_perp_bracket(rng, i):
    geo = SymplecticGeometry.random(rng)
    F, G = geo.agreeing(rng, 1)
    rep = check_bracket_perp(F, G, geo.Y, geo.space)
    return _cert_outcome([rep.certificate], f"{geo.describe()}: bracket not perpendicular")


def case_omega_pullback(rng, i):
    N = 1 if i % 4 else 2
    space = DarbouxSpace(N)
    c = space.chart
    H = c.zero()
    for k in range(rng.randint(1, 2) + 1):
        H = H + random_poly(rng, c.variables, c.coords, 3 if N == 1 else 2, 3, min_degree=1).shift("t", k)
    n = rng.randint(1, 4) if N == 1 else rng.randint(1, 3)
    res = pullback_form_along_flow(ham_field(H, space), n, space)
    return _expect(all(p.is_zero() for row in res for p in row), f"omega not preserved mod t^{n + 1}")


def case_hamiltonian_algebra(rng, i):
    space = DarbouxSpace(rng.choice([1, 2]))
    c = space.chart
    H, K = (random_poly(rng, c.variables, c.coords, 3, 3) for _ in range(2))
    s = random_scalar(rng, 0.3)
    ok = lie_bracket(ham_field(H, space), ham_field(K, space)) == ham_field(poisson_bracket(H, K, space), space)
    ok = ok and ham_field(H + K.scale(s), space) == ham_field(H, space) + ham_field(K, space).scale(s)
    v = is_hamiltonian(ham_field(H, space), space)
    ok = ok and v.is_member and ham_field(v.primitive, space) == ham_field(H, space)
    return _expect(ok, "Hamiltonian calculus identity fails")


def case_perp_in_FY(rng, i):
    """Perp sections extend to Hamiltonian fields."""
    geo = SymplecticGeometry.random(rng)
    v = geo.Y.restrict_field(geo.correction(rng))
    if not g_membership(v, geo.setup.obstruction).is_member:
        return CaseOutcome(FAIL, "random Perp section rejected")
    G = hamiltonian_extension(v, geo.Y, geo.space)
    return _expect(geo.Y.restrict_field(ham_field(G, geo.space)) == v, "Perp section does not extend")


def case_folspace_bracket(rng, i):
    if i == 0:
        chart = Chart(("x", "y"))
        F = FoliationSpan(chart, [VectorField(chart, ["1", "x"])])
        Y = SubspaceY.from_names(chart, ["y"])
        A = F.generators[0]
        B = A.scale(chart.poly("1 + y"))
        rep = check_foliation_bracket(A, B, Y, F)
        ok = rep.bracket == A.scale(chart.poly("x")) and rep.ok
        ok = ok and [str(g) for g in tangency_ideal(F, Y).generators] == ["x"]
        return _expect(ok, "worked foliation example fails")
    geo = FoliationGeometry.random(rng)
    A, B = geo.agreeing(rng, 1)
    if i % 2:
        q = ideal_power_element(rng, geo.Y, 1, 2, 1)
        B = A.scale(geo.chart.one() + q)
    rep = check_foliation_bracket(A, B, geo.Y, geo.foliation, seed=i)
    if rep.nonvanishing_points:
        return CaseOutcome(FAIL, f"{geo.describe()}: bracket nonzero on T")
    return _cert_outcome([rep.certificate], f"{geo.describe()}: bracket not in the twisted sheaf")


def case_velocity(rng, i, n=4):
    geo = FoliationGeometry.random(rng)
    A = geo.time_dependent_field(rng, rng.randint(0, 2))
    rep = velocity_in_foliation(A, n, geo.foliation)
    return CaseOutcome(PASS if rep.ok else FAIL, "" if rep.ok else f"{geo.describe()}: {rep.reason}",
                       1 if rep.verdict == INCONCLUSIVE else 0)


def case_obstruction_axiom(rng, i):
    """Brackets of F-pairs that agree on Y restrict into G, for every bundled pair (F, G)."""
    kind = ("symplectic", "foliation", "foliation-full", "full")[i % 4]
    if kind == "foliation-full":
        base = FoliationGeometry.random(rng)
        geo = base
        G = FullRestriction(base.foliation)
    else:
        geo = random_geometry(rng, kind)
        G = geo.setup.obstruction
    A, B = geo.agreeing(rng, 1)
    v = geo.Y.restrict_field(lie_bracket(A, B))
    return _cert_outcome([g_membership(v, G)], f"{kind} {geo.describe()}: axiom fails")


def case_sandwich(rng, i):
    """A module between the twisted sheaf and the full restriction passes the axiom check."""
    geo = FoliationGeometry.random(rng)
    Y, F = geo.Y, geo.foliation
    extra = [Poly.var(rng.choice(Y.free_names), geo.chart.variables)]
    ideal = list(geo.ideal.generators) + extra
    G = ExplicitModule([g.components for g in F.restricted_generators(Y)], ideal)
    A, B = geo.agreeing(rng, 1)
    v = Y.restrict_field(lie_bracket(A, B))
    certs = [g_membership(v, G)]
    # F_Y = f^*F on generators
    certs += [F.restricted_contains(g) for g in F.restricted_generators(Y)]
    return _cert_outcome(certs, f"{geo.describe()}: sandwich check fails")


def case_G_linear(rng, i):
    kind = ("symplectic", "foliation")[i % 2]
    geo = random_geometry(rng, kind)
    v1 = geo.Y.restrict_field(geo.correction(rng))
    v2 = geo.Y.restrict_field(geo.correction(rng))
    c = random_scalar(rng, 0.3)
    G = geo.setup.obstruction
    return _cert_outcome([g_membership(v1, G), g_membership(v2, G), g_membership(v1 + v2.scale(c), G)],
                         f"{geo.describe()}: G is not closed under linear combinations")


def case_module_certificates(rng, i):
    chart = Chart.standard(2)
    V = chart.variables
    gens = [[random_poly(rng, V, chart.coords, 2, 2) for _ in range(2)] for _ in range(2)]
    f = [random_poly(rng, V, chart.coords, 2, 2) for _ in range(2)]
    target = [f[0] * gens[0][k] + f[1] * gens[1][k] for k in range(2)]
    cert = solve_module_membership(target, gens, free_names=chart.coords)
    if not cert.is_member:
        return CaseOutcome(FAIL, f"constructed member reported {cert.verdict}", _count_inconclusive([cert]))
    back = [cert.witness[0] * gens[0][k] + cert.witness[1] * gens[1][k] for k in range(2)]
    return _expect(back == target, "witness does not reproduce the target")


@dataclass
class Check:
    name: str
    criterion: str
    fn: Callable
    cases: int
    kwargs: dict = field(default_factory=dict)


CHECKS = [
    Check("ring-axioms", "invariant", case_ring_axioms, 20),
    Check("leibniz", "invariant", case_leibniz, 20),
    Check("substitution-homomorphism", "invariant", case_subst_homomorphism, 20),
    Check("restriction-ring-map", "invariant", case_restriction_ring_map, 20),
    Check("jacobi", "invariant", case_jacobi, 20),
    Check("time-calculus", "1", case_time_calculus, 100),
    Check("lie-D-product-oracle", "invariant", case_lie_D_oracle, 20),
    Check("bracket-expansion", "invariant", case_bracket_expansion, 20),
    Check("dt-sequences", "invariant", case_dt_sequences, 20),
    Check("flow-ode", "invariant", case_flow_ode, 20),
    Check("jet-truncation", "invariant", case_truncation, 20),
    Check("difference-formula-n1", "2", case_difference_formula, 30, {"n": 1}),
    Check("difference-formula-n2", "2", case_difference_formula, 30, {"n": 2}),
    Check("difference-formula-n3", "2", case_difference_formula, 30, {"n": 3}),
    Check("extension-n1", "3", case_extension, 30, {"n": 1}),
    Check("extension-n2", "3", case_extension, 30, {"n": 2}),
    Check("congruences-general", "3", case_congruences_general, 20),
    Check("difference-in-G-symplectic", "4", case_difference_in_G, 30, {"kind": "symplectic"}),
    Check("difference-in-G-foliation", "4", case_difference_in_G, 30, {"kind": "foliation"}),
    Check("mixed-sequences-symplectic", "5", case_mixed_sequences, 10, {"kind": "symplectic"}),
    Check("mixed-sequences-foliation", "5", case_mixed_sequences, 10, {"kind": "foliation"}),
    Check("lift-symplectic", "6", case_lift, 10, {"kind": "symplectic"}),
    Check("lift-foliation", "6", case_lift, 10, {"kind": "foliation"}),
    Check("cech-symplectic", "6", case_cech, 5, {"kind": "symplectic"}),
    Check("cech-foliation", "6", case_cech, 5, {"kind": "foliation"}),
    Check("hamiltonian-extension", "7", case_ham_extension, 30),
    Check("perp-bracket", "7", case_perp_bracket, 30),
    Check("omega-pullback", "7", case_omega_pullback, 20),
    Check("hamiltonian-algebra", "invariant", case_hamiltonian_algebra, 20),
    Check("perp-extends", "invariant", case_perp_in_FY, 20),
    Check("foliation-bracket", "8", case_folspace_bracket, 20),
    Check("velocity", "8", case_velocity, 20),
    Check("obstruction-axiom", "invariant", case_obstruction_axiom, 20),
    Check("sandwich", "invariant", case_sandwich, 10),
    Check("G-linear", "invariant", case_G_linear, 10),
    Check("module-certificates", "invariant", case_module_certificates, 10),
]

CRITERIA = sorted({c.criterion for c in CHECKS if c.criterion != "invariant"})


def _run_case(args):
    name, seed, index, kwargs = args
    check = _BY_NAME[name]
    rng = case_rng(seed, name, index)
    try:
        return check.fn(rng, index, **kwargs)
    except Exception as exc:  # a crash is a failed case, reported with its message
        return CaseOutcome(FAIL, f"{type(exc).__name__}: {exc}")


_BY_NAME = {c.name: c for c in CHECKS}


def run_check(check: Check | str, seed: int = 0, cases: int | None = None, jobs: int = 1,
              pool=None) -> CheckResult:
    if isinstance(check, str):
        check = _BY_NAME[check]
    count = check.cases if cases is None else cases
    args = [(check.name, seed, i, check.kwargs) for i in range(count)]
    t0 = time.perf_counter()
    if pool is not None:
        outcomes = list(pool.map(_run_case, args))
    elif jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            outcomes = list(ex.map(_run_case, args))
    else:
        outcomes = [_run_case(a) for a in args]
    res = CheckResult(check.name, check.criterion, count)
    for i, o in enumerate(outcomes):
        res.inconclusive += o.inconclusive
        if o.status != PASS:
            res.failures.append(f"case {i}: {o.detail}")
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(seed: int = 0, cases: int | None = None, jobs: int = 1, only=None) -> list:
    """Run every check (or those named in ``only``); ``cases`` overrides each default count."""
    checks = [c for c in CHECKS if only is None or c.name in only or c.criterion in only]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return [run_check(c, seed, cases, pool=pool) for c in checks]
    return [run_check(c, seed, cases) for c in checks]


