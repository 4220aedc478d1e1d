"""Flow jets of time-dependent fields, their truncations, restrictions and affine differences.

A jet section of order n is stored as a family over the whole chart: for each
coordinate i the Taylor coefficients ``c_0..c_n`` (polynomials in x) of the
integral curve ``gamma_i(t) = sum_m c_{m,i}(x) t^m`` through x.

The affine difference of two order-(n+1) jets with equal order-n parts is
normalised as ``(n+1)! * (c_{n+1} - c'_{n+1})``: the derivation
``d^{n+1}/dt^{n+1}`` at ``t = 0``.  With this convention the difference
formula below reproduces the coefficient gap exactly.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

from .fields import Chart, TimeDepVectorField, VectorField, lie_bracket, lie_D
from .geometry import SubspaceY, TangentFieldOnY
from .poly import Poly, substitute_time_curve

__all__ = [
    "JetSection",
    "JetMismatch",
    "flow_jet",
    "truncate_jet",
    "jet_restrict",
    "jet_difference",
    "difference_formula",
    "velocity_series",
]


class JetMismatch(ValueError):
    """Lower-order parts of two jets disagree."""

    def __init__(self, message: str, order: int):
        super().__init__(message)
        self.order = order


class JetSection:
    __slots__ = ("chart", "order", "coeffs", "subspace")

    def __init__(self, chart: Chart, coeffs: Sequence[Sequence[Poly]], subspace: SubspaceY | None = None):
        self.chart = chart
        self.coeffs = tuple(tuple(c) for c in coeffs)
        if len(self.coeffs) != chart.dim:
            raise ValueError("one coefficient list per coordinate is required")
        orders = {len(c) for c in self.coeffs}
        if len(orders) != 1:
            raise ValueError("coefficient lists of unequal length")
        self.order = orders.pop() - 1
        self.subspace = subspace

    @property
    def dim(self) -> int:
        return self.chart.dim

    def coefficient(self, m: int) -> list:
        """Order-m coefficient vector."""
        return [c[m] for c in self.coeffs]

    def curve(self) -> dict:
        """Per-coordinate polynomial in (x, t)."""
        t = self.chart.t()
        out = {}
        for name, cs in zip(self.chart.coords, self.coeffs):
            p = self.chart.zero()
            for m, c in enumerate(cs):
                p = p + c * t ** m
            out[name] = p
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetSection):
            return NotImplemented
        return self.chart == other.chart and self.coeffs == other.coeffs

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "dim": self.dim,
            "coords": list(self.chart.coords),
            "time": self.chart.time,
            "coeffs": [[str(p) for p in cs] for cs in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "JetSection":
        from .parsing import parse_expression

        chart = Chart(tuple(data["coords"]), data.get("time", "t"))
        coeffs = [[parse_expression(s, chart.variables) for s in cs] for cs in data["coeffs"]]
        jet = cls(chart, coeffs)
        if jet.order != data["order"] or jet.dim != data["dim"]:
            raise ValueError("order/dim fields disagree with the coefficient table")
        return jet

    def __repr__(self) -> str:
        curve = self.curve()
        body = ", ".join(str(curve[n]) for n in self.chart.coords)
        return f"JetSection(order={self.order}, ({body}))"


def flow_jet(A: TimeDepVectorField, n: int) -> JetSection:
    """Order-n jet of the integral curves of ``A``, as a family over the chart.

    Uses ``c_{m+1} = [t^m] A(gamma_{<=m}(t), t) / (m+1)``, which is the
    Picard recursion truncated one order at a time.
    """
    if n < 0:
        raise ValueError("jet order must be >= 0")
    chart = A.chart
    t = chart.time
    coeffs = [[chart.coord(i)] for i in range(chart.dim)]
    curve = {name: chart.coord(i) for i, name in enumerate(chart.coords)}
    for m in range(n):
        new = []
        for i, a in enumerate(A):
            comp = substitute_time_curve(a, curve, m, time=t)
            new.append(comp.coefficient(t, m) * Fraction(1, m + 1))
        tm1 = chart.t() ** (m + 1)
        for i, name in enumerate(chart.coords):
            coeffs[i].append(new[i])
            curve[name] = curve[name] + new[i] * tm1
    return JetSection(chart, coeffs)


def truncate_jet(J: JetSection, m: int) -> JetSection:
    if m > J.order:
        raise ValueError(f"cannot truncate an order-{J.order} jet to order {m}")
    if m < 0:
        raise ValueError("jet order must be >= 0")
    return JetSection(J.chart, [cs[: m + 1] for cs in J.coeffs], J.subspace)


def jet_restrict(J: JetSection, Y: SubspaceY) -> JetSection:
    if Y.chart != J.chart:
        raise ValueError("jet and subspace live on different charts")
    return JetSection(J.chart, [[Y.restrict(c) for c in cs] for cs in J.coeffs], Y)


def jet_difference(J1: JetSection, J2: JetSection, Y: SubspaceY) -> TangentFieldOnY:
    """Affine difference ``J1 - J2`` on Y of two order-(n+1) jets with equal order-n parts."""
    if J1.order != J2.order:
        raise ValueError(f"jets have orders {J1.order} and {J2.order}")
    if J1.order < 1:
        raise ValueError("differences need jets of order >= 1")
    R1, R2 = jet_restrict(J1, Y), jet_restrict(J2, Y)
    top = J1.order
    for m in range(1, top):
        if R1.coefficient(m) != R2.coefficient(m):
            raise JetMismatch(f"jets already differ on Y at order {m}", m)
    scale = factorial(top)
    comps = [(a - b) * scale for a, b in zip(R1.coefficient(top), R2.coefficient(top))]
    return TangentFieldOnY(Y, comps)


def jets_agree_on(J1: JetSection, J2: JetSection, Y: SubspaceY, order: int) -> int | None:
    """First order <= ``order`` at which the restricted jets differ, or None."""
    R1, R2 = jet_restrict(J1, Y), jet_restrict(J2, Y)
    for m in range(1, order + 1):
        if R1.coefficient(m) != R2.coefficient(m):
            return m
    return None


def difference_formula(As: Sequence[TimeDepVectorField], B: TimeDepVectorField) -> VectorField:
    """``(Lie_{D(A_1)} o ... o Lie_{D(A_n)} D(B))`` at ``t = 0``."""
    if not As:
        raise ValueError("need at least one field A_i")
    *outer, last = As
    last._check(B)
    # x-part of [D(A_n), D(B)]
    inner = B.dt() - last.dt() + lie_bracket(last, B)
    out = TimeDepVectorField(B.chart, inner.components)
    for A in reversed(outer):
        out = lie_D(A, out)
    return out.at_time_zero()


def velocity_series(A: TimeDepVectorField, n: int) -> list:
    """d/dt of the order-n flow jet: per coordinate a polynomial in (x, t) of t-degree < n."""
    if n < 1:
        raise ValueError("velocity series needs n >= 1")
    J = flow_jet(A, n)
    t = J.chart.t()
    out = []
    for cs in J.coeffs:
        p = J.chart.zero()
        for m in range(1, n + 1):
            p = p + cs[m] * m * t ** (m - 1)
        out.append(p)
    return out
