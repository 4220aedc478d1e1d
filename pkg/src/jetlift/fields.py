"""Time-dependent polynomial vector fields on a coordinate chart and their Lie calculus."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .poly import Poly, Scalar, VariableMismatch

__all__ = [
    "Chart",
    "TimeDepVectorField",
    "VectorField",
    "DtTaggedField",
    "lie_bracket",
    "lie_D",
    "iterated_lie_D",
    "iterated_lie_on_dt",
    "at_time_zero",
    "D",
    "DT",
]


@dataclass(frozen=True)
class Chart:
    """Coordinate names of ``C^d`` plus the name of the time coordinate."""

    coords: tuple
    time: str = "t"

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if self.time in self.coords:
            raise ValueError(f"time variable {self.time!r} clashes with a coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"repeated coordinate names in {self.coords}")

    @classmethod
    def standard(cls, dim: int, prefix: str = "x", time: str = "t") -> "Chart":
        return cls(tuple(f"{prefix}{i}" for i in range(1, dim + 1)), time)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def variables(self) -> tuple:
        return self.coords + (self.time,)

    def poly(self, text_or_value) -> Poly:
        if isinstance(text_or_value, Poly):
            return text_or_value.with_variables(self.variables)
        if isinstance(text_or_value, str):
            from .parsing import parse_expression

            return parse_expression(text_or_value, self.variables)
        return Poly.constant(text_or_value, self.variables)

    def coord(self, i: int) -> Poly:
        return Poly.var(self.coords[i], self.variables)

    def t(self) -> Poly:
        return Poly.var(self.time, self.variables)

    def zero(self) -> Poly:
        return Poly.zero(self.variables)

    def one(self) -> Poly:
        return Poly.constant(1, self.variables)


class TimeDepVectorField:
    """``sum_i A_i(x, t) d/dx_i`` with polynomial components."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Iterable):
        comps = tuple(chart.poly(c) for c in components)
        if len(comps) != chart.dim:
            raise ValueError(f"expected {chart.dim} components, got {len(comps)}")
        self.chart = chart
        self.components = comps
        self._validate()

    def _validate(self) -> None:
        pass

    @classmethod
    def zero(cls, chart: Chart):
        return cls(chart, [chart.zero()] * chart.dim)

    @classmethod
    def parse(cls, text: str, chart: Chart):
        from .parsing import parse_field

        return cls(chart, parse_field(text, chart.variables))

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i: int) -> Poly:
        return self.components[i]

    def __len__(self) -> int:
        return len(self.components)

    def _like(self, comps) -> "TimeDepVectorField":
        return TimeDepVectorField(self.chart, comps)

    def _check(self, other: "TimeDepVectorField") -> None:
        if self.chart != other.chart:
            raise VariableMismatch(
                f"fields live on different charts: {self.chart} vs {other.chart}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeDepVectorField):
            return NotImplemented
        return self.chart == other.chart and self.components == other.components

    def __hash__(self):
        return hash((self.chart, self.components))

    def __add__(self, other: "TimeDepVectorField") -> "TimeDepVectorField":
        self._check(other)
        return self._like(a + b for a, b in zip(self, other))

    def __sub__(self, other: "TimeDepVectorField") -> "TimeDepVectorField":
        self._check(other)
        return self._like(a - b for a, b in zip(self, other))

    def __neg__(self) -> "TimeDepVectorField":
        return self._like(-a for a in self)

    def scale(self, c) -> "TimeDepVectorField":
        """Multiply by a scalar or by a function (Poly)."""
        if isinstance(c, Poly):
            c = c.with_variables(self.chart.variables)
            return self._like(c * a for a in self)
        return self._like(a.scale(c) for a in self)

    __rmul__ = scale

    def __mul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return all(not a for a in self)

    def t_degree(self) -> int:
        return max(a.degree(self.chart.time) for a in self)

    def is_time_independent(self) -> bool:
        return all(not a.involves(self.chart.time) for a in self)

    def time_coefficients(self) -> list:
        """Fields ``A_k`` with ``self = sum_k t^k A_k``."""
        d = self.t_degree()
        return [
            VectorField(self.chart, [a.coefficient(self.chart.time, k) for a in self])
            for k in range(d + 1)
        ]

    def dt(self) -> "TimeDepVectorField":
        return self._like(a.diff(self.chart.time) for a in self)

    def times_t_power(self, n: int, coeff=1) -> "TimeDepVectorField":
        """``coeff * t^n * self``."""
        c = Scalar.coerce(coeff)
        return self._like(a.shift(self.chart.time, n).scale(c) for a in self)

    def truncate(self, order: int) -> "TimeDepVectorField":
        """Reduce modulo ``t^(order+1)``."""
        return self._like(a.truncate(self.chart.time, order) for a in self)

    def restrict(self, subspace) -> "TimeDepVectorField":
        from .poly import restrict_to_subspace

        return self._like(restrict_to_subspace(a, subspace) for a in self)

    def at_time_zero(self) -> "VectorField":
        return VectorField(self.chart, [a.coefficient(self.chart.time, 0) for a in self])

    def apply(self, f: Poly) -> Poly:
        """Directional derivative ``sum_j A_j df/dx_j`` (x-directions only)."""
        f = f.with_variables(self.chart.variables)
        out = self.chart.zero()
        for name, a in zip(self.chart.coords, self):
            if a:
                out = out + a * f.diff(name)
        return out

    def __repr__(self) -> str:
        from .parsing import format_field

        return f"{type(self).__name__}{format_field(self.components)}"

    __str__ = __repr__

    def to_text(self) -> str:
        from .parsing import format_field

        return format_field(self.components)


class VectorField(TimeDepVectorField):
    """A field with no time dependence."""

    __slots__ = ()

    def _validate(self) -> None:
        t = self.chart.time
        for a in self.components:
            if a.involves(t):
                raise ValueError(f"VectorField component {a} depends on {t!r}")

    def _like(self, comps):
        comps = list(comps)
        if any(a.involves(self.chart.time) for a in comps):
            return TimeDepVectorField(self.chart, comps)
        return VectorField(self.chart, comps)

    @classmethod
    def from_time_dependent(cls, field: TimeDepVectorField) -> "VectorField":
        return cls(field.chart, field.components)


def lie_bracket(A: TimeDepVectorField, B: TimeDepVectorField) -> TimeDepVectorField:
    """``[A, B]_i = sum_j A_j dB_i/dx_j - B_j dA_i/dx_j`` (no time derivatives)."""
    A._check(B)
    comps = []
    for i in range(A.dim):
        comps.append(A.apply(B[i]) - B.apply(A[i]))
    return A._like(comps) if isinstance(A, VectorField) and isinstance(B, VectorField) \
        else TimeDepVectorField(A.chart, comps)


def lie_D(A: TimeDepVectorField, B: TimeDepVectorField) -> TimeDepVectorField:
    """Lie derivative of a pure-x field ``B`` along ``D(A) = d/dt + A``."""
    A._check(B)
    return TimeDepVectorField(A.chart, (B.dt() + lie_bracket(A, B)).components)


def iterated_lie_D(A: TimeDepVectorField, B: TimeDepVectorField, m: int) -> TimeDepVectorField:
    if m < 1:
        raise ValueError("iteration count must be >= 1")
    out = B
    for _ in range(m):
        out = lie_D(A, out)
    return out


def iterated_lie_on_dt(seq: Sequence[TimeDepVectorField]) -> TimeDepVectorField:
    """``Lie_{D(F_1)} o ... o Lie_{D(F_n)} (d/dt)``; the result has no d/dt part."""
    if not seq:
        raise ValueError("need at least one field")
    *outer, last = seq
    # [d/dt + F_n, d/dt] = -dF_n/dt
    out = -TimeDepVectorField(last.chart, last.dt().components)
    for F in reversed(outer):
        out = lie_D(F, out)
    return out


def at_time_zero(A: TimeDepVectorField) -> VectorField:
    return A.at_time_zero()


class DtTaggedField:
    """A field ``xpart + dtcoeff * d/dt`` on the product of the chart with the time line."""

    __slots__ = ("xpart", "dtcoeff")

    def __init__(self, xpart: TimeDepVectorField, dtcoeff):
        self.xpart = TimeDepVectorField(xpart.chart, xpart.components)
        self.dtcoeff = xpart.chart.poly(dtcoeff)

    @property
    def chart(self) -> Chart:
        return self.xpart.chart

    def apply(self, f: Poly) -> Poly:
        return self.xpart.apply(f) + self.dtcoeff * f.diff(self.chart.time)

    def bracket(self, other: "DtTaggedField") -> "DtTaggedField":
        """Bracket on the product manifold, all d+1 directions included."""
        self.xpart._check(other.xpart)
        comps = [self.apply(b) - other.apply(a) for a, b in zip(self.xpart, other.xpart)]
        dt = self.apply(other.dtcoeff) - other.apply(self.dtcoeff)
        return DtTaggedField(TimeDepVectorField(self.chart, comps), dt)

    def __add__(self, other: "DtTaggedField") -> "DtTaggedField":
        return DtTaggedField(self.xpart + other.xpart, self.dtcoeff + other.dtcoeff)

    def __sub__(self, other: "DtTaggedField") -> "DtTaggedField":
        return DtTaggedField(self.xpart - other.xpart, self.dtcoeff - other.dtcoeff)

    def __neg__(self) -> "DtTaggedField":
        return DtTaggedField(-self.xpart, -self.dtcoeff)

    def scale(self, c) -> "DtTaggedField":
        return DtTaggedField(self.xpart.scale(c), self.dtcoeff.scale(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DtTaggedField):
            return NotImplemented
        return self.xpart == other.xpart and self.dtcoeff == other.dtcoeff

    def __repr__(self) -> str:
        return f"DtTaggedField({self.xpart.to_text()} + ({self.dtcoeff})*d/d{self.chart.time})"


def D(A: TimeDepVectorField) -> DtTaggedField:
    """``d/dt + A``."""
    return DtTaggedField(A, 1)


def DT(chart: Chart) -> DtTaggedField:
    """The bare ``d/dt`` field."""
    return DtTaggedField(TimeDepVectorField.zero(chart), 1)


def t_power_over_factorial(chart: Chart, n: int) -> Poly:
    """``t^n / n!`` as a polynomial on ``chart``."""
    return chart.t() ** n * Fraction(1, factorial(n)) if n >= 0 else chart.zero()
