"""Ambient setup: the coordinate subspace Y, the sheaf F, and the obstruction sheaf G.

Sheaf and obstruction kinds are small classes exposing ``contains``.  The
symplectic kinds live in :mod:`jetlift.symplectic` and the foliation twist in
:mod:`jetlift.foliation`; both plug into the same interface.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .fields import Chart, TimeDepVectorField, VectorField, lie_bracket
from .linalg import solve_sparse
from .poly import Poly, monomials_up_to

__all__ = [
    "SubspaceY",
    "TangentFieldOnY",
    "MembershipCertificate",
    "MEMBER",
    "NON_MEMBER",
    "INCONCLUSIVE",
    "solve_module_membership",
    "SheafSpec",
    "FullTangent",
    "ConstantSpan",
    "FoliationSpan",
    "ObstructionSpec",
    "FullRestriction",
    "ExplicitModule",
    "DeformationSetup",
    "f_membership",
    "g_membership",
    "check_bracket_closed",
    "HypothesisError",
]

MEMBER = "member"
NON_MEMBER = "non-member"
INCONCLUSIVE = "inconclusive"


class HypothesisError(ValueError):
    """A precondition of a construction does not hold for the given input."""


@dataclass(frozen=True)
class SubspaceY:
    """The coordinate subspace ``{x_s = 0 : s in vanishing}`` of a chart."""

    chart: Chart
    vanishing: tuple

    def __post_init__(self):
        van = tuple(sorted(set(self.vanishing)))
        for s in van:
            if not 0 <= s < self.chart.dim:
                raise ValueError(f"vanishing index {s} outside 0..{self.chart.dim - 1}")
        object.__setattr__(self, "vanishing", van)

    @classmethod
    def from_names(cls, chart: Chart, names: Sequence[str]) -> "SubspaceY":
        idx = []
        for n in names:
            if n not in chart.coords:
                raise ValueError(f"{n!r} is not a coordinate of {chart.coords}")
            idx.append(chart.coords.index(n))
        return cls(chart, tuple(idx))

    @classmethod
    def whole(cls, chart: Chart) -> "SubspaceY":
        return cls(chart, ())

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def vanishing_names(self) -> tuple:
        return tuple(self.chart.coords[s] for s in self.vanishing)

    @property
    def free(self) -> tuple:
        return tuple(i for i in range(self.chart.dim) if i not in self.vanishing)

    @property
    def free_names(self) -> tuple:
        return tuple(self.chart.coords[i] for i in self.free)

    def restrict(self, p: Poly) -> Poly:
        return p.set_zero(self.vanishing_names)

    def restrict_field(self, A: TimeDepVectorField) -> "TangentFieldOnY":
        if A.chart != self.chart:
            raise ValueError("field and subspace live on different charts")
        if not A.is_time_independent():
            A = A.at_time_zero()
        return TangentFieldOnY(self, [self.restrict(a) for a in A])

    def ideal_generators(self) -> list:
        return [self.chart.coord(s) for s in self.vanishing]


class TangentFieldOnY(VectorField):
    """A section of the pulled-back tangent bundle over Y (coefficients free of vanishing coordinates)."""

    __slots__ = ("subspace",)

    def __init__(self, subspace: SubspaceY, components):
        self.subspace = subspace
        super().__init__(subspace.chart, components)

    def _validate(self) -> None:
        super()._validate()
        for a in self.components:
            for n in self.subspace.vanishing_names:
                if a.involves(n):
                    raise ValueError(f"component {a} of a field on Y involves {n!r}")

    def _like(self, comps):
        return TangentFieldOnY(self.subspace, comps)

    @classmethod
    def zero_on(cls, subspace: SubspaceY) -> "TangentFieldOnY":
        return cls(subspace, [subspace.chart.zero()] * subspace.chart.dim)

    def as_chart_field(self) -> VectorField:
        """The same polynomials viewed as a field on the whole chart (constant in the normal directions)."""
        return VectorField(self.chart, self.components)


@dataclass
class MembershipCertificate:
    verdict: str
    witness: list | None = None
    reason: str = ""

    @property
    def is_member(self) -> bool:
        return self.verdict == MEMBER

    def __bool__(self) -> bool:
        return self.is_member

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = [
                [str(p) for p in w] if isinstance(w, (list, tuple)) else str(w)
                for w in self.witness
            ]
        return out


def _vector_key(i: int, p: Poly):
    return {(i, e): c for e, c in p.terms.items()}


def _is_monomial(p: Poly) -> bool:
    return len(p.terms) == 1


def _candidate_multipliers(variables, free_names, ideal, bound, truncate=None):
    idx = [variables.index(n) for n in free_names]
    n = len(variables)
    # multiplier monomials may also involve the time variable when truncating
    if truncate is not None:
        idx = idx + [variables.index(truncate[0])]

    def mono(exp_free) -> Poly:
        e = [0] * n
        for j, k in zip(idx, exp_free):
            e[j] = k
        return Poly.monomial(e, variables)

    def monos(deg):
        for exp in monomials_up_to(len(idx), deg):
            if truncate is not None and exp[-1] > truncate[1]:
                continue
            yield mono(exp)

    if ideal is None:
        return list(monos(bound))
    ideal = [q for q in ideal if q]
    if not ideal:
        return []
    if all(_is_monomial(q) for q in ideal):
        seen, out = set(), []
        for q in ideal:
            for m in monos(bound - q.degree()):
                prod = m * q
                key = next(iter(prod.terms))
                if key not in seen:
                    seen.add(key)
                    out.append(Poly.monomial(key, variables))
        return out
    out = []
    for q in ideal:
        for m in monos(bound - q.degree()):
            out.append(m * q)
    return out


def _sample_points(rng, free_names, ideal, variables, count=24):
    """Rational points of Y, preferring zeros of ``ideal`` when one is given."""
    values = [0, 1, -1, 2, -2, 3]
    pts = []
    if ideal is None:
        for _ in range(count):
            pts.append({v: rng.choice(values) for v in free_names})
        return pts
    ideal = [q for q in ideal if q]
    if all(_is_monomial(q) for q in ideal):
        # zero out a hitting set of the monomial generators
        supports = [
            {variables[i] for i, k in enumerate(next(iter(q.terms))) if k} for q in ideal
        ]
        if any(not s for s in supports):
            return []  # unit ideal: empty zero locus
        names = sorted(set().union(*supports))
        for r in range(1, len(names) + 1):
            for hit in itertools.combinations(names, r):
                if all(s & set(hit) for s in supports):
                    for _ in range(max(1, count // 4)):
                        pt = {v: rng.choice(values) for v in free_names}
                        pt.update({v: 0 for v in hit})
                        pts.append(pt)
            if pts:
                break
        return pts
    # general ideal: grid search for common zeros
    grid = [0, 1, -1, 2, -2]
    for combo in itertools.product(grid, repeat=len(free_names)):
        pt = dict(zip(free_names, combo))
        full = {v: pt.get(v, 0) for v in variables}
        if all(not q.evaluate(full) for q in ideal):
            pts.append(pt)
        if len(pts) >= count:
            break
    return pts


def _evaluation_obstruction(target, generators, ideal, variables, free_names, seed=0):
    rng = random.Random(seed)
    for pt in _sample_points(rng, free_names, ideal, variables):
        full = {v: pt.get(v, 0) for v in variables}
        tv = [p.evaluate(full) for p in target]
        if ideal is not None:
            if any(tv):
                return f"target does not vanish at {pt}, a zero of the coefficient ideal"
            continue
        cols = [{i: g.evaluate(full) for i, g in enumerate(gen)} for gen in generators]
        if solve_sparse(cols, dict(enumerate(tv))) is None:
            return f"target value at {pt} is outside the span of the generator values"
    return None


def solve_module_membership(
    target: Sequence[Poly],
    generators: Sequence[Sequence[Poly]],
    ideal: Sequence[Poly] | None = None,
    bound: int | None = None,
    free_names: Sequence[str] | None = None,
    truncate: tuple | None = None,
) -> MembershipCertificate:
    """Decide ``target = sum_i f_i * generators[i]`` with ``f_i`` in ``ideal``.

    Coefficients ``f_i`` are searched among polynomials in ``free_names`` of
    degree at most ``bound`` (``ideal=None`` means the unit ideal).  A
    failed search is reported as non-member only when an evaluation
    obstruction proves it; otherwise the verdict is inconclusive.

    ``truncate=(t, n)`` works modulo ``t^(n+1)`` and lets coefficients
    depend on ``t``.
    """
    target = list(target)
    if not target:
        raise ValueError("empty target")
    variables = target[0].variables
    if free_names is None:
        free_names = tuple(
            v for v in variables if truncate is None or v != truncate[0]
        )
    trunc = (lambda p: p.truncate(*truncate)) if truncate else (lambda p: p)
    target = [trunc(p) for p in target]
    nz = [g for g in generators if any(g)]
    if all(not p for p in target):
        return MembershipCertificate(
            MEMBER, [Poly.zero(variables) for _ in generators], "zero target"
        )
    if ideal is not None and all(not q for q in ideal):
        return MembershipCertificate(NON_MEMBER, None, "coefficient ideal is zero")
    if bound is None:
        gdeg = max((max(p.degree() for p in g) for g in nz), default=0)
        tdeg = max(p.degree() for p in target)
        bound = tdeg + max(gdeg, 0) + 2
    if truncate is not None:
        free_names = tuple(free_names)
    mults = _candidate_multipliers(variables, tuple(free_names), ideal, bound, truncate)
    columns, labels = [], []
    for gi, gen in enumerate(generators):
        if not any(gen):
            continue
        for m in mults:
            col = {}
            for i, g in enumerate(gen):
                col.update(_vector_key(i, trunc(m * g)))
            if col:
                columns.append(col)
                labels.append((gi, m))
    rhs = {}
    for i, p in enumerate(target):
        rhs.update(_vector_key(i, p))
    sol = solve_sparse(columns, rhs) if columns else None
    if sol is not None:
        witness = [Poly.zero(variables) for _ in generators]
        for c, (gi, m) in zip(sol, labels):
            if c:
                witness[gi] = witness[gi] + m.scale(c)
        # expand and compare; a certificate must reproduce the target
        for i in range(len(target)):
            total = Poly.zero(variables)
            for f, gen in zip(witness, generators):
                total = total + f * gen[i]
            if trunc(total) != target[i]:
                raise AssertionError("membership witness does not reproduce target")
        return MembershipCertificate(MEMBER, witness, f"solved at degree bound {bound}")
    if truncate is None:
        reason = _evaluation_obstruction(target, generators, ideal, variables, tuple(free_names))
        if reason:
            return MembershipCertificate(NON_MEMBER, None, reason)
    return MembershipCertificate(
        INCONCLUSIVE, None, f"no certificate up to degree bound {bound}"
    )


# --- sheaves ---------------------------------------------------------------


class SheafSpec:
    """A bracket-closed sheaf of vector fields, closed under constant multiples."""

    kind = "abstract"

    def contains(self, A: VectorField) -> MembershipCertificate:
        raise NotImplementedError

    def restricted_contains(self, v: TangentFieldOnY) -> MembershipCertificate:
        """Membership in the image of F restricted to Y."""
        raise NotImplementedError

    def extend(self, v: TangentFieldOnY) -> VectorField:
        """A field in F whose restriction to Y is ``v``."""
        raise NotImplementedError

    def bracket_closed(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"kind": self.kind}


class FullTangent(SheafSpec):
    kind = "full"

    def __init__(self, chart: Chart):
        self.chart = chart

    def contains(self, A):
        return MembershipCertificate(MEMBER, [A], "every field is in the tangent sheaf")

    def restricted_contains(self, v):
        return MembershipCertificate(MEMBER, [v], "every section lifts")

    def extend(self, v):
        return VectorField(self.chart, v.components)

    def bracket_closed(self):
        return {"closed": True, "pairs": [], "reason": "full tangent sheaf"}


class _SpanMixin:
    def _gens_json(self):
        return [g.to_text() for g in self.generators]


class ConstantSpan(SheafSpec, _SpanMixin):
    """The C-linear span of finitely many fields."""

    kind = "constant"

    def __init__(self, chart: Chart, generators: Sequence[VectorField]):
        self.chart = chart
        self.generators = [VectorField(chart, g.components) for g in generators]

    def _solve(self, target, gens) -> MembershipCertificate:
        cols = []
        for g in gens:
            col = {}
            for i, p in enumerate(g):
                col.update(_vector_key(i, p))
            cols.append(col)
        rhs = {}
        for i, p in enumerate(target):
            rhs.update(_vector_key(i, p))
        sol = solve_sparse(cols, rhs)
        if sol is None:
            return MembershipCertificate(NON_MEMBER, None, "not a constant combination of generators")
        return MembershipCertificate(MEMBER, sol, "constant combination")

    def contains(self, A):
        return self._solve(A.components, self.generators)

    def restricted_contains(self, v):
        Y = v.subspace
        return self._solve(v.components, [Y.restrict_field(g) for g in self.generators])

    def extend(self, v):
        cert = self.restricted_contains(v)
        if not cert.is_member:
            raise HypothesisError(f"{v} is not in the restricted constant span")
        out = VectorField.zero(self.chart)
        for c, g in zip(cert.witness, self.generators):
            out = out + g.scale(c)
        return out

    def bracket_closed(self):
        pairs, closed = [], True
        for (i, a), (j, b) in itertools.combinations(enumerate(self.generators), 2):
            cert = self.contains(lie_bracket(a, b))
            pairs.append({"pair": [i, j], "verdict": cert.verdict,
                          "witness": [str(c) for c in cert.witness] if cert.witness else None})
            closed = closed and cert.is_member
        return {"closed": closed, "pairs": pairs}

    def to_json(self):
        return {"kind": self.kind, "generators": self._gens_json()}


class FoliationSpan(SheafSpec, _SpanMixin):
    """The O-module span of pointwise independent fields (a regular foliation)."""

    kind = "foliation"

    def __init__(self, chart: Chart, generators: Sequence[VectorField], degree_bound=None):
        self.chart = chart
        self.generators = [VectorField(chart, g.components) for g in generators]
        self.degree_bound = degree_bound

    @property
    def rank(self) -> int:
        return len(self.generators)

    def contains(self, A):
        return solve_module_membership(
            A.components, [g.components for g in self.generators],
            bound=self.degree_bound, free_names=self.chart.coords,
        )

    def restricted_generators(self, Y: SubspaceY) -> list:
        return [Y.restrict_field(g) for g in self.generators]

    def restricted_contains(self, v):
        Y = v.subspace
        return solve_module_membership(
            v.components, [g.components for g in self.restricted_generators(Y)],
            bound=self.degree_bound, free_names=Y.free_names,
        )

    def combine(self, coefficients) -> VectorField:
        out = VectorField.zero(self.chart)
        for f, g in zip(coefficients, self.generators):
            out = out + g.scale(f)
        return out

    def extend(self, v):
        cert = self.restricted_contains(v)
        if not cert.is_member:
            raise HypothesisError(f"{v} is not in the restricted foliation ({cert.reason})")
        return self.combine(cert.witness)

    def bracket_closed(self):
        pairs, closed = [], True
        for (i, a), (j, b) in itertools.combinations(enumerate(self.generators), 2):
            cert = self.contains(lie_bracket(a, b))
            pairs.append({"pair": [i, j], "verdict": cert.verdict,
                          "witness": [str(c) for c in cert.witness] if cert.witness else None})
            closed = closed and cert.is_member
        return {"closed": closed, "pairs": pairs}

    def independent_at(self, point: dict) -> bool:
        full = {v: point.get(v, 0) for v in self.chart.variables}
        vals = [[g[i].evaluate(full) for i in range(self.chart.dim)] for g in self.generators]
        # rank check by elimination: each generator must be outside the span of the previous ones
        for k in range(len(vals)):
            cols = [dict(enumerate(v)) for v in vals[:k]]
            if solve_sparse(cols, dict(enumerate(vals[k]))) is not None:
                return False
        return True

    def to_json(self):
        return {"kind": self.kind, "generators": self._gens_json()}


# --- obstruction sheaves -------------------------------------------------


class ObstructionSpec:
    kind = "abstract"

    def contains(self, v: TangentFieldOnY) -> MembershipCertificate:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"kind": self.kind}


class FullRestriction(ObstructionSpec):
    """G = F_Y, the whole image of F on Y."""

    kind = "full"

    def __init__(self, sheaf: SheafSpec):
        self.sheaf = sheaf

    def contains(self, v):
        return self.sheaf.restricted_contains(v)


class ExplicitModule(ObstructionSpec):
    """``ideal * span_O(generators)`` on Y, for given generators and coefficient ideal."""

    kind = "explicit"

    def __init__(self, generators: Sequence[Sequence[Poly]], ideal: Sequence[Poly] | None = None,
                 degree_bound=None):
        self.generators = [list(g) for g in generators]
        self.ideal = None if ideal is None else list(ideal)
        self.degree_bound = degree_bound

    def contains(self, v):
        gens = [[v.subspace.restrict(p) for p in g] for g in self.generators]
        ideal = None if self.ideal is None else [v.subspace.restrict(q) for q in self.ideal]
        return solve_module_membership(
            v.components, gens, ideal, bound=self.degree_bound,
            free_names=v.subspace.free_names,
        )

    def to_json(self):
        from .parsing import format_field

        return {
            "kind": self.kind,
            "generators": [format_field(g) for g in self.generators],
            "ideal": None if self.ideal is None else [str(q) for q in self.ideal],
        }


@dataclass
class DeformationSetup:
    """Everything the admissibility and lifting machinery needs about the geometry."""

    chart: Chart
    subspace: SubspaceY
    sheaf: SheafSpec
    obstruction: ObstructionSpec
    name: str = ""
    notes: dict = field(default_factory=dict)

    def restrict(self, A: TimeDepVectorField) -> TangentFieldOnY:
        return self.subspace.restrict_field(A)


def f_membership(A: TimeDepVectorField, F: SheafSpec) -> MembershipCertificate:
    """Every t-coefficient of ``A`` must lie in ``F``; the witness lists per-coefficient certificates."""
    certs = []
    for k, Ak in enumerate(A.time_coefficients()):
        cert = F.contains(Ak)
        certs.append(cert)
        if not cert.is_member:
            return MembershipCertificate(
                cert.verdict, None, f"coefficient of t^{k}: {cert.reason}"
            )
    return MembershipCertificate(MEMBER, certs, "all time coefficients in F")


def g_membership(v: TangentFieldOnY, G: ObstructionSpec, Y: SubspaceY | None = None) -> MembershipCertificate:
    if not isinstance(v, TangentFieldOnY):
        if Y is None:
            raise ValueError("a subspace is needed to interpret a plain field as a field on Y")
        v = Y.restrict_field(v)
    elif Y is not None and v.subspace != Y:
        raise ValueError("field is restricted to a different subspace")
    if v.is_zero():
        return MembershipCertificate(MEMBER, None, "zero section")
    return G.contains(v)


def check_bracket_closed(F: SheafSpec) -> dict:
    return F.bracket_closed()
