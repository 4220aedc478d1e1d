"""Order-by-order lifting of jets, on one chart and on a formal cover.

In the formal-cover model every chart uses the same coordinates and every
overlap is all of Y, so Cech data reduce to families indexed by chart
labels.  Differences follow ``C_jk = tau_j - tau_k`` and a splitting
satisfies ``C_jk = C_k - C_j``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .admissibility import AdmissibilityReport, extend_admissible, is_admissible
from .fields import TimeDepVectorField, VectorField
from .geometry import (
    DeformationSetup,
    HypothesisError,
    SubspaceY,
    TangentFieldOnY,
    f_membership,
    g_membership,
)
from .jets import JetSection, flow_jet, jet_difference, jet_restrict, jets_agree_on, truncate_jet

__all__ = [
    "DeformationProblem",
    "LiftResult",
    "lift_once",
    "lift_to_order",
    "CechData",
    "cech_cocycle",
    "cech_glue",
    "coherent_truncations",
]


@dataclass
class DeformationProblem:
    """A seed field in F and one correction per order step, lifted up to ``order``."""

    setup: DeformationSetup
    seed: TimeDepVectorField
    order: int
    corrections: list = field(default_factory=list)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("target order must be >= 1")
        if len(self.corrections) > self.order - 1:
            raise ValueError(
                f"{len(self.corrections)} corrections for {self.order - 1} order steps"
            )

    def correction(self, n: int) -> VectorField:
        """Correction used when going from order ``n`` to ``n + 1``."""
        k = n - 1
        if k < len(self.corrections) and self.corrections[k] is not None:
            return self.corrections[k]
        return VectorField.zero(self.setup.chart)

    def validate(self) -> None:
        st = self.setup
        cert = f_membership(self.seed, st.sheaf)
        if not cert.is_member:
            raise HypothesisError(f"seed is not in F: {cert.reason}")
        for n in range(1, self.order):
            d = self.correction(n)
            cert = st.sheaf.contains(d)
            if not cert.is_member:
                raise HypothesisError(f"correction for order {n + 1} is not in F: {cert.reason}")
            cert = g_membership(st.subspace.restrict_field(d), st.obstruction)
            if not cert.is_member:
                raise HypothesisError(f"correction for order {n + 1} is not in G on Y: {cert.reason}")


@dataclass
class LiftResult:
    field: TimeDepVectorField
    jet: JetSection
    report: AdmissibilityReport
    stages: list
    differences: list

    def __iter__(self):
        yield self.field
        yield self.jet
        yield self.report

    def to_json(self) -> dict:
        return {
            "field": self.field.to_text(),
            "jet": self.jet.to_json(),
            "report": self.report.to_json(),
            "stages": [s.to_text() for s in self.stages],
            "differences": [d.to_text() for d in self.differences],
        }


def lift_once(A: TimeDepVectorField, n: int, setup: DeformationSetup,
              delta: VectorField | None = None, check_admissible: bool = True) -> TimeDepVectorField:
    """One order step on a single chart."""
    return extend_admissible(
        A, delta, n, setup.subspace, setup.obstruction, setup.sheaf,
        check_admissible=check_admissible,
    )


def lift_to_order(problem: DeformationProblem, verify: bool = True) -> LiftResult:
    """Iterate :func:`lift_once` from order 1 to ``problem.order``.

    With ``verify`` the introduced jet differences are recomputed and
    compared with the corrections, and the final field is checked for
    admissibility at the target order.
    """
    problem.validate()
    st = problem.setup
    Y = st.subspace
    A = TimeDepVectorField(st.chart, problem.seed.components)
    start = is_admissible(A, 1, Y, st.obstruction)
    if not start.admissible:
        raise HypothesisError(f"seed is not 1-admissible: {start.verdicts[0].reason}")
    stages = [A]
    diffs = []
    for n in range(1, problem.order):
        try:
            # admissibility at order n was established by the previous step
            B = lift_once(A, n, st, problem.correction(n), check_admissible=False)
        except HypothesisError as exc:
            raise HypothesisError(f"lifting to order {n + 1}: {exc}") from exc
        if verify:
            d = jet_difference(flow_jet(B, n + 1), flow_jet(A, n + 1), Y)
            want = Y.restrict_field(problem.correction(n))
            if d != want:
                raise AssertionError(f"order {n + 1}: introduced difference {d} != {want}")
            diffs.append(d)
        A = B
        stages.append(A)
    report = is_admissible(A, problem.order, Y, st.obstruction)
    if verify and not report.admissible:
        raise AssertionError(f"lift is not {problem.order}-admissible")
    jet = jet_restrict(flow_jet(A, problem.order), Y)
    return LiftResult(A, jet, report, stages, diffs)


@dataclass
class CechData:
    charts: list
    order: int
    subspace: SubspaceY
    cocycle: dict
    certificates: dict = field(default_factory=dict)
    splitting: list | None = None
    glued: list | None = None
    glued_jet: JetSection | None = None

    def labels(self) -> list:
        return list(range(len(self.charts)))

    def antisymmetry_residuals(self) -> dict:
        return {
            (j, k): self.cocycle[(j, k)] + self.cocycle[(k, j)]
            for j, k in itertools.combinations(self.labels(), 2)
        }

    def cocycle_residuals(self) -> dict:
        c = self.cocycle
        return {
            (j, k, l): c[(j, k)] + c[(k, l)] + c[(l, j)]
            for j, k, l in itertools.combinations(self.labels(), 3)
        }

    def invariants_hold(self) -> bool:
        return (
            all(r.is_zero() for r in self.antisymmetry_residuals().values())
            and all(r.is_zero() for r in self.cocycle_residuals().values())
            and all(c.is_member for c in self.certificates.values())
        )

    def to_json(self) -> dict:
        out = {
            "order": self.order,
            "charts": [c.to_text() for c in self.charts],
            "cocycle": {f"{j},{k}": v.to_text() for (j, k), v in sorted(self.cocycle.items())},
            "certificates": {f"{j},{k}": v.to_json() for (j, k), v in sorted(self.certificates.items())},
            "invariants_hold": self.invariants_hold(),
        }
        if self.splitting is not None:
            out["splitting"] = [s.to_text() for s in self.splitting]
        if self.glued is not None:
            out["glued"] = [g.to_text() for g in self.glued]
        if self.glued_jet is not None:
            out["glued_jet"] = self.glued_jet.to_json()
        return out


def cech_cocycle(charts: Sequence[TimeDepVectorField], n: int, setup: DeformationSetup,
                 check_admissible: bool = True) -> CechData:
    """Differences of the ``(n+1)``-jets of chart fields whose ``n``-jets agree on Y."""
    Y, G = setup.subspace, setup.obstruction
    charts = [TimeDepVectorField(setup.chart, c.components) for c in charts]
    if check_admissible:
        for j, A in enumerate(charts):
            rep = is_admissible(A, n, Y, G)
            if not rep.admissible:
                raise HypothesisError(f"chart {j} is not {n}-admissible")
    jets = [flow_jet(A, n + 1) for A in charts]
    for j, k in itertools.combinations(range(len(charts)), 2):
        bad = jets_agree_on(jets[j], jets[k], Y, n)
        if bad is not None:
            raise HypothesisError(f"charts {j} and {k} induce different jets at order {bad}")
    cocycle, certs = {}, {}
    for j, k in itertools.permutations(range(len(charts)), 2):
        if (k, j) in cocycle:
            cocycle[(j, k)] = -cocycle[(k, j)]
            certs[(j, k)] = certs[(k, j)]
            continue
        d = jet_difference(jets[j], jets[k], Y)
        cocycle[(j, k)] = d
        certs[(j, k)] = g_membership(d, G)
    data = CechData(charts, n, Y, cocycle, certs)
    # antisymmetry is by construction; the triple identity is an honest check
    for key, r in data.cocycle_residuals().items():
        if not r.is_zero():
            raise AssertionError(f"cocycle identity fails on {key}: {r}")
    for key, c in certs.items():
        if not c.is_member:
            raise AssertionError(f"difference {key} is not in G: {c.reason}")
    return data


def cech_glue(data: CechData, splitting: Sequence[TangentFieldOnY], setup: DeformationSetup,
              extensions: Sequence[VectorField] | None = None) -> CechData:
    """Correct every chart by an F-extension of its splitting term; the jets then agree on Y."""
    Y = data.subspace
    if len(splitting) != len(data.charts):
        raise ValueError("one splitting term per chart is required")
    split = [s if isinstance(s, TangentFieldOnY) else Y.restrict_field(s) for s in splitting]
    for (j, k), c in data.cocycle.items():
        r = c - (split[k] - split[j])
        if not r.is_zero():
            raise HypothesisError(f"splitting does not bound the cocycle at ({j},{k}); residual {r}")
    glued = []
    for j, (A, Cj) in enumerate(zip(data.charts, split)):
        cert = g_membership(Cj, setup.obstruction)
        if not cert.is_member:
            raise HypothesisError(f"splitting term {j} is not in G: {cert.reason}")
        if extensions is not None and extensions[j] is not None:
            ext = VectorField(setup.chart, extensions[j].components)
            if Y.restrict_field(ext) != Cj:
                raise HypothesisError(f"supplied extension {j} does not restrict to the splitting term")
        else:
            ext = setup.sheaf.extend(Cj)
        glued.append(lift_once(A, data.order, setup, ext, check_admissible=False))
    jets = [flow_jet(B, data.order + 1) for B in glued]
    ref = jet_restrict(jets[0], Y)
    for j, J in enumerate(jets[1:], start=1):
        if jet_restrict(J, Y) != ref:
            raise AssertionError(f"corrected chart {j} does not glue with chart 0")
    return CechData(
        data.charts, data.order, Y, data.cocycle, data.certificates,
        splitting=split, glued=glued, glued_jet=ref,
    )


def coherent_truncations(result: LiftResult, Y: SubspaceY) -> bool:
    """Each intermediate stage induces the truncation of the final jet on Y."""
    final = result.jet
    for m, A in enumerate(result.stages, start=1):
        if jet_restrict(flow_jet(A, m), Y) != truncate_jet(final, m):
            return False
    return True

