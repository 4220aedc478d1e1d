"""Regular foliations: tangency locus along Y, the twisted obstruction sheaf, velocity checks."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .fields import TimeDepVectorField, VectorField, lie_bracket
from .geometry import (
    MEMBER,
    FoliationSpan,
    HypothesisError,
    MembershipCertificate,
    ObstructionSpec,
    SubspaceY,
    TangentFieldOnY,
    f_membership,
    solve_module_membership,
)
from .jets import flow_jet, velocity_series
from .poly import substitute_time_curve

__all__ = [
    "TangencyIdeal",
    "tangency_ideal",
    "TangencyTwist",
    "jt_twist_membership",
    "check_foliation_bracket",
    "FoliationBracketReport",
    "velocity_in_foliation",
    "VelocityReport",
    "foliation_setup",
]


@dataclass(frozen=True)
class TangencyIdeal:
    """Ideal on Y cut out by the normal components of the foliation generators."""

    subspace: SubspaceY
    generators: tuple

    @property
    def is_zero(self) -> bool:
        return not self.generators

    @property
    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.generators)

    @property
    def is_monomial(self) -> bool:
        return all(len(g.terms) == 1 for g in self.generators)

    def vanishes_at(self, point: dict) -> bool:
        full = {v: point.get(v, 0) for v in self.subspace.chart.variables}
        return all(not g.evaluate(full) for g in self.generators)

    def sample_zeros(self, rng: random.Random, count: int = 8) -> list:
        """Rational points of T.  Only monomial ideals are sampled; otherwise ``[]``."""
        free = self.subspace.free_names
        values = [0, 1, -1, 2, -2, 3]
        if self.is_unit:
            return []
        if self.is_zero:
            return [{v: rng.choice(values) for v in free} for _ in range(count)]
        if not self.is_monomial:
            return []
        variables = self.subspace.chart.variables
        supports = [
            {variables[i] for i, k in enumerate(next(iter(g.terms))) if k}
            for g in self.generators
        ]
        names = sorted(set().union(*supports))
        pts = []
        for r in range(1, len(names) + 1):
            for hit in itertools.combinations(names, r):
                if all(s & set(hit) for s in supports):
                    for _ in range(max(1, count // 2)):
                        pt = {v: rng.choice(values) for v in free}
                        pt.update({v: 0 for v in hit})
                        pts.append(pt)
            if pts:
                return pts
        return pts

    def to_json(self) -> dict:
        return {"generators": [str(g) for g in self.generators]}

    def __str__(self) -> str:
        if self.is_zero:
            return "(0)"
        return "(" + ", ".join(str(g) for g in self.generators) + ")"


def tangency_ideal(F: FoliationSpan, Y: SubspaceY) -> TangencyIdeal:
    gens = []
    for G in F.generators:
        for s in Y.vanishing:
            q = Y.restrict(G[s])
            if q and q not in gens and -q not in gens:
                gens.append(q)
    if any(q.is_constant() for q in gens):
        gens = [Y.chart.one()]
    return TangencyIdeal(Y, tuple(gens))


def jt_twist_membership(v: TangentFieldOnY, F: FoliationSpan, Y: SubspaceY | None = None) -> MembershipCertificate:
    """Membership in ``J_T * F_Y``: combinations of restricted generators with coefficients in ``J_T``."""
    Y = Y or v.subspace
    if v.is_zero():
        return MembershipCertificate(MEMBER, [Y.chart.zero()] * F.rank, "zero target")
    ideal = tangency_ideal(F, Y)
    return solve_module_membership(
        v.components,
        [g.components for g in F.restricted_generators(Y)],
        list(ideal.generators),
        bound=F.degree_bound,
        free_names=Y.free_names,
    )


class TangencyTwist(ObstructionSpec):
    """``J_T`` times the restricted foliation."""

    kind = "tangency-twist"

    def __init__(self, foliation: FoliationSpan):
        self.foliation = foliation

    def contains(self, v):
        return jt_twist_membership(v, self.foliation, v.subspace)

    def to_json(self):
        return {"kind": self.kind, "foliation": self.foliation.to_json()}


@dataclass
class FoliationBracketReport:
    bracket: TimeDepVectorField
    restricted: TangentFieldOnY
    certificate: MembershipCertificate
    tangency: TangencyIdeal
    sampled_points: list
    nonvanishing_points: list

    @property
    def ok(self) -> bool:
        return self.certificate.is_member and not self.nonvanishing_points

    def to_json(self) -> dict:
        return {
            "bracket": self.bracket.to_text(),
            "restricted": self.restricted.to_text(),
            "certificate": self.certificate.to_json(),
            "tangency_ideal": [str(g) for g in self.tangency.generators],
            "sampled_points": len(self.sampled_points),
            "nonvanishing_points": [{k: str(v) for k, v in p.items()} for p in self.nonvanishing_points],
        }


def check_foliation_bracket(A: VectorField, B: VectorField, Y: SubspaceY, F: FoliationSpan,
                            seed: int = 0) -> FoliationBracketReport:
    """Bracket of two fields of the foliation that agree along Y, tested against the twisted sheaf."""
    for name, X in (("first", A), ("second", B)):
        cert = f_membership(X, F)
        if not cert.is_member:
            raise HypothesisError(f"{name} field is not in the foliation ({cert.reason})")
    if Y.restrict_field(A) != Y.restrict_field(B):
        raise HypothesisError("fields do not agree along Y")
    br = lie_bracket(A, B)
    r = Y.restrict_field(br)
    ideal = tangency_ideal(F, Y)
    cert = jt_twist_membership(r, F, Y)
    pts = ideal.sample_zeros(random.Random(seed))
    bad = []
    for pt in pts:
        full = {v: pt.get(v, 0) for v in Y.chart.variables}
        if any(c.evaluate(full) for c in r):
            bad.append(pt)
    return FoliationBracketReport(br, r, cert, ideal, pts, bad)


@dataclass
class VelocityReport:
    order: int
    witness: list | None
    verdict: str
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == MEMBER

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "verdict": self.verdict,
            "reason": self.reason,
            "witness": None if self.witness is None else [str(f) for f in self.witness],
        }


def velocity_in_foliation(A: TimeDepVectorField, n: int, F: FoliationSpan) -> VelocityReport:
    """Write the flow velocity as ``sum_i f_i(x, t) G_i(Phi_t(x))`` modulo ``t^n``.

    Solved one power of ``t`` at a time: the ``t^k`` equation only involves
    the generators at ``t = 0`` and the already known lower coefficients.
    """
    if n < 1:
        raise ValueError("velocity check needs n >= 1")
    cert = f_membership(A, F)
    if not cert.is_member:
        raise HypothesisError(f"field is not in the foliation ({cert.reason})")
    chart = A.chart
    t = chart.time
    vel = velocity_series(A, n)
    curve = flow_jet(A, n - 1).curve() if n > 1 else {
        c: chart.coord(i) for i, c in enumerate(chart.coords)
    }
    composed = [
        [substitute_time_curve(g, curve, n - 1, time=t) for g in G] for G in F.generators
    ]
    # composed[i][comp] = sum_k t^k * gk[i][k][comp]
    gk = [[[p.coefficient(t, k) for p in Gc] for k in range(n)] for Gc in composed]
    base = [gk[i][0] for i in range(F.rank)]
    fk: list = []
    for k in range(n):
        rhs = [v.coefficient(t, k) for v in vel]
        for j in range(k):
            for i in range(F.rank):
                f = fk[j][i]
                if f:
                    rhs = [r - f * g for r, g in zip(rhs, gk[i][k - j])]
        sol = solve_module_membership(rhs, base, bound=F.degree_bound, free_names=chart.coords)
        if not sol.is_member:
            return VelocityReport(n, None, sol.verdict, f"order t^{k}: {sol.reason}")
        fk.append(sol.witness)
    witness = []
    tp = chart.t()
    for i in range(F.rank):
        f = chart.zero()
        for k in range(n):
            f = f + fk[k][i] * tp ** k
        witness.append(f)
    # expand and compare modulo t^n
    for c in range(chart.dim):
        total = chart.zero()
        for i in range(F.rank):
            total = total + witness[i].mul_truncated(composed[i][c], t, n - 1)
        if total != vel[c].truncate(t, n - 1):
            raise AssertionError("velocity witness does not reproduce the velocity")
    return VelocityReport(n, witness, MEMBER, f"solved modulo {t}^{n}")


def foliation_setup(chart, generators, vanishing, twisted: bool = True, name: str = "",
                    degree_bound=None):
    """A :class:`DeformationSetup` for a regular foliation; G is the twisted sheaf unless ``twisted=False``."""
    from .geometry import DeformationSetup, FullRestriction

    F = FoliationSpan(chart, generators, degree_bound)
    Y = SubspaceY.from_names(chart, vanishing)
    G = TangencyTwist(F) if twisted else FullRestriction(F)
    return DeformationSetup(chart, Y, F, G, name=name or "foliation", notes={})
