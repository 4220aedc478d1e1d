"""Admissible time-dependent fields, the order-raising extension, and jet differences in G."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .fields import TimeDepVectorField, VectorField, iterated_lie_on_dt, lie_bracket, lie_D
from .geometry import (
    HypothesisError,
    ObstructionSpec,
    SheafSpec,
    SubspaceY,
    f_membership,
    g_membership,
)
from .jets import flow_jet, jet_difference, jets_agree_on

__all__ = [
    "AdmissibilityReport",
    "admissibility_defect",
    "is_admissible",
    "correction_field",
    "extend_admissible",
    "extended_field",
    "CongruenceReport",
    "extension_congruences",
    "bracket_shift_residual",
    "admissible_difference",
    "mixed_sequence_defects",
]


def _lie_powers(A: TimeDepVectorField, B: TimeDepVectorField, n: int) -> list:
    """``Lie^m_{D(A)} B`` for m = 1..n, each reduced mod ``t^(n-m+1)``.

    Only the value at ``t = 0`` of the last power is needed downstream,
    so each stage can drop one more order of ``t`` than the previous one.
    """
    out = []
    cur = B.truncate(n)
    At = A.truncate(n)
    for m in range(1, n + 1):
        cur = lie_D(At, cur).truncate(n - m)
        out.append(cur)
    return out


def admissibility_defect(A: TimeDepVectorField, n: int, Y: SubspaceY) -> list:
    """``(Lie^m_{D(A)} A)_0`` restricted to Y, for m = 1..n."""
    if n < 1:
        raise ValueError("admissibility order must be >= 1")
    return [Y.restrict_field(L.at_time_zero()) for L in _lie_powers(A, A, n)]


@dataclass
class AdmissibilityReport:
    order: int
    defects: list
    verdicts: list

    @property
    def admissible(self) -> bool:
        return all(v.is_member for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.admissible

    def first_failure(self) -> int | None:
        for m, v in enumerate(self.verdicts, start=1):
            if not v.is_member:
                return m
        return None

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "admissible": self.admissible,
            "defects": [d.to_text() for d in self.defects],
            "verdicts": [v.to_json() for v in self.verdicts],
        }


def is_admissible(A: TimeDepVectorField, n: int, Y: SubspaceY, G: ObstructionSpec,
                  F: SheafSpec | None = None) -> AdmissibilityReport:
    """Check ``n``-admissibility of ``A`` for ``G``; with ``F`` given, ``A`` must lie in it."""
    if F is not None:
        cert = f_membership(A, F)
        if not cert.is_member:
            raise HypothesisError(f"field is not a time-dependent field in F: {cert.reason}")
    defects = admissibility_defect(A, n, Y)
    verdicts = [g_membership(d, G) for d in defects]
    return AdmissibilityReport(n, defects, verdicts)


def correction_field(A: TimeDepVectorField, delta: VectorField, n: int) -> VectorField:
    """``E = -n [A_0, Delta] - (Lie^{n+1}_{D(A)} A)_0``."""
    A0 = A.at_time_zero()
    top = _lie_powers(A, A, n + 1)[-1].at_time_zero()
    E = -(lie_bracket(A0, delta).scale(n)) - top
    return VectorField(A.chart, E.components)


def extended_field(A: TimeDepVectorField, delta: VectorField, E: VectorField, n: int) -> TimeDepVectorField:
    """``A + t^n/n! Delta + t^(n+1)/(n+1)! E``."""
    B = A + delta.times_t_power(n, Fraction(1, factorial(n)))
    B = B + E.times_t_power(n + 1, Fraction(1, factorial(n + 1)))
    return TimeDepVectorField(A.chart, B.components)


def extend_admissible(A: TimeDepVectorField, delta: VectorField | None, n: int, Y: SubspaceY,
                      G: ObstructionSpec, F: SheafSpec | None = None,
                      check_admissible: bool = True) -> TimeDepVectorField:
    """Raise an ``n``-admissible field to an ``(n+1)``-admissible one.

    The result induces the same jets as ``A`` on Y up to order ``n``, and
    its ``(n+1)``-jet differs from that of ``A`` by ``delta`` restricted to Y.
    """
    if n < 1:
        raise ValueError("extension order must be >= 1")
    if delta is None:
        delta = VectorField.zero(A.chart)
    if not delta.is_time_independent():
        raise HypothesisError("correction must be time-independent")
    delta = VectorField(A.chart, delta.components)
    if F is not None:
        cert = F.contains(delta)
        if not cert.is_member:
            raise HypothesisError(f"correction is not in F: {cert.reason}")
    cert = g_membership(Y.restrict_field(delta), G)
    if not cert.is_member:
        raise HypothesisError(f"correction restricted to Y is not in G: {cert.reason}")
    if check_admissible:
        report = is_admissible(A, n, Y, G, F)
        if not report.admissible:
            m = report.first_failure()
            raise HypothesisError(f"field is not {n}-admissible (order {m}: {report.verdicts[m - 1].reason})")
    E = correction_field(A, delta, n)
    return extended_field(A, delta, E, n)


@dataclass
class CongruenceReport:
    order: int
    residuals: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals)

    def to_json(self) -> dict:
        return {"order": self.order, "ok": self.ok, "residuals": [r.to_text() for r in self.residuals]}


def extension_congruences(A: TimeDepVectorField, delta: VectorField, E: VectorField, n: int) -> CongruenceReport:
    """Residuals of the iterated-derivative congruences for ``B = A + t^n/n! Delta + t^(n+1)/(n+1)! E``.

    Entry ``m - 1`` (m <= n) is
    ``Lie^m_B B - Lie^m_A A - t^(n-m)/(n-m)! Delta`` modulo ``t^(n-m+1)``;
    the last entry is ``Lie^(n+1)_B B - Lie^(n+1)_A A - E - n [A, Delta]`` modulo ``t``.
    All must vanish.
    """
    B = extended_field(A, delta, E, n)
    LA = _lie_powers(A, A, n + 1)
    LB = _lie_powers(B, B, n + 1)
    res = []
    for m in range(1, n + 1):
        k = n - m
        diff = LB[m - 1] - LA[m - 1] - delta.times_t_power(k, Fraction(1, factorial(k)))
        res.append(diff.truncate(k))
    top = LB[n] - LA[n] - E - lie_bracket(A, delta).scale(n)
    res.append(top.truncate(0))
    return CongruenceReport(n, res)


def bracket_shift_residual(A: TimeDepVectorField, delta: VectorField, E: VectorField, n: int,
                           F: TimeDepVectorField) -> TimeDepVectorField:
    """``Lie_B F - Lie_A F - t^n/n! [Delta, F] - t^(n+1)/(n+1)! [E, F]``; identically zero."""
    B = extended_field(A, delta, E, n)
    rhs = lie_D(A, F) + lie_bracket(delta, F).times_t_power(n, Fraction(1, factorial(n)))
    rhs = rhs + lie_bracket(E, F).times_t_power(n + 1, Fraction(1, factorial(n + 1)))
    return lie_D(B, F) - rhs


def admissible_difference(A: TimeDepVectorField, B: TimeDepVectorField, n: int, Y: SubspaceY,
                          G: ObstructionSpec, check_admissible: bool = True):
    """``tau^(n+1)_B - tau^(n+1)_A`` on Y for n-admissible fields with equal n-jets, with its G-certificate."""
    if check_admissible:
        for name, X in (("first", A), ("second", B)):
            rep = is_admissible(X, n, Y, G)
            if not rep.admissible:
                raise HypothesisError(f"{name} field is not {n}-admissible")
    JA, JB = flow_jet(A, n + 1), flow_jet(B, n + 1)
    bad = jets_agree_on(JA, JB, Y, n)
    if bad is not None:
        raise HypothesisError(f"flow jets differ on Y at order {bad}")
    diff = jet_difference(JB, JA, Y)
    return diff, g_membership(diff, G)


def mixed_sequence_defects(A: TimeDepVectorField, B: TimeDepVectorField, n: int, Y: SubspaceY,
                           G: ObstructionSpec) -> list:
    """For every sequence in ``{A, B}^n``: the restricted value at 0 of the iterated derivative of d/dt.

    Returns ``(labels, field on Y, certificate)`` triples, one per sequence.
    """
    out = []
    fields = {"A": A.truncate(n), "B": B.truncate(n)}
    for labels in itertools.product("AB", repeat=n):
        seq = [fields[c] for c in labels]
        v = Y.restrict_field(iterated_lie_on_dt(seq).at_time_zero())
        out.append(("".join(labels), v, g_membership(v, G)))
    return out
