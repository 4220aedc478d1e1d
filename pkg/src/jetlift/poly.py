"""Exact sparse multivariate polynomials over the Gaussian rationals.

A :class:`Poly` carries an ordered tuple of variable names and its real and
imaginary parts as FLINT rational polynomials.  Every operation returns a
new object; nothing is mutated after construction.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import flint as _flint
from gmpy2 import mpq as _Q

__all__ = [
    "Scalar",
    "Poly",
    "VariableMismatch",
    "substitute_time_curve",
    "restrict_to_subspace",
    "evaluate",
    "partial_derivative",
]


class VariableMismatch(ValueError):
    """Raised when two polynomials live over different variable lists."""


def _frac(value):
    if type(value) is _Q:
        return value
    if isinstance(value, (int, Rational, str)):
        return _Q(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _mk(re, im):
    s = object.__new__(Scalar)
    s.re = re
    s.im = im
    return s


class Scalar:
    """Gaussian rational ``re + im*i`` with arbitrary-precision parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if type(value) is Scalar:
            return value
        if isinstance(value, complex):
            re, im = Fraction(value.real), Fraction(value.imag)
            if re.denominator > 2**20 or im.denominator > 2**20:
                raise TypeError("refusing to coerce an inexact complex float")
            return cls(re, im)
        if isinstance(value, float):
            raise TypeError("floats are not exact; pass a Fraction or int")
        return cls(value)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other) -> "Scalar":
        if type(other) is not Scalar:
            other = Scalar.coerce(other)
        return _mk(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return _mk(-self.re, -self.im)

    def __sub__(self, other) -> "Scalar":
        if type(other) is not Scalar:
            other = Scalar.coerce(other)
        return _mk(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other) -> "Scalar":
        if type(other) is not Scalar:
            other = Scalar.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return _mk(a * c, b)
        return _mk(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "Scalar":
        return _mk(self.re, -self.im)

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        if not self.im:
            return _mk(1 / self.re, self.im)
        n = self.re * self.re + self.im * self.im
        return _mk(self.re / n, -self.im / n)

    def __truediv__(self, other) -> "Scalar":
        if type(other) is not Scalar:
            other = Scalar.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = Scalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self.im:
            return _fmt_frac(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"({_fmt_frac(self.re)}{sign}{_fmt_frac(abs(self.im))}i)"


def _fmt_frac(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_SCALARLIKE = (Scalar, int, Fraction, complex, type(_Q(0)))

ZERO = Scalar(0)
_QZERO = _Q(0)
ONE = Scalar(1)


def _grlex_key(exp: tuple) -> tuple:
    return (sum(exp), exp)


def _ctx(variables: tuple):
    ctx = _CONTEXTS.get(variables)
    if ctx is None:
        ctx = _CONTEXTS[variables] = _flint.fmpq_mpoly_ctx.get(variables, "lex")
    return ctx


_CONTEXTS: dict = {}


def _to_fmpq(q):
    return _flint.fmpq(int(q.numerator), int(q.denominator))


def _to_mpq(c):
    return _Q(int(c.p), int(c.q))


class Poly:
    """Sparse polynomial ``sum c_e * v^e`` over an ordered variable list.

    Real and imaginary parts are kept as two rational polynomials; the
    ``terms`` mapping (exponent tuple -> :class:`Scalar`) is built on demand.

    Parameters
    ----------
    variables : sequence of str
        Variable names; exponent tuples are aligned with this order.
    terms : mapping, optional
        Exponent tuple -> coefficient.  Zero coefficients are dropped.
    """

    __slots__ = ("variables", "_re", "_im", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None):
        variables = tuple(variables)
        n = len(variables)
        re, im = {}, {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != n:
                    raise ValueError(
                        f"exponent {exp} has length {len(exp)}, expected {n}"
                    )
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                c = Scalar.coerce(c)
                if c.re:
                    re[exp] = re.get(exp, 0) + _to_fmpq(c.re)
                if c.im:
                    im[exp] = im.get(exp, 0) + _to_fmpq(c.im)
        ctx = _ctx(variables)
        self._set(variables, ctx.from_dict(re), ctx.from_dict(im) if im else None)

    def _set(self, variables, re, im):
        self.variables = variables
        self._re = re
        self._im = im if im is not None and not im.is_zero() else None
        self._terms = None
        self._hash = None

    @classmethod
    def _make(cls, variables: tuple, re, im=None) -> "Poly":
        obj = object.__new__(cls)
        obj._set(variables, re, im)
        return obj

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "Poly":
        return cls(variables, terms)

    # --- constructors -------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        return cls._make(variables, _ctx(variables).from_dict({}))

    @classmethod
    def constant(cls, value, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        c = Scalar.coerce(value)
        ctx = _ctx(variables)
        re = ctx.constant(_to_fmpq(c.re))
        im = ctx.constant(_to_fmpq(c.im)) if c.im else None
        return cls._make(variables, re, im)

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatch(f"unknown variable {name!r}; have {variables}")
        return cls._make(variables, _ctx(variables).gen(variables.index(name)))

    @classmethod
    def monomial(cls, exp: Sequence[int], variables: Sequence[str], coeff=1):
        return cls(variables, {tuple(exp): coeff})

    # --- queries ------------------------------------------------------
    @property
    def terms(self) -> dict:
        if self._terms is None:
            out = {
                tuple(map(int, e)): _mk(_to_mpq(c), _QZERO)
                for e, c in self._re.to_dict().items()
            }
            if self._im is not None:
                for e, c in self._im.to_dict().items():
                    e = tuple(map(int, e))
                    s = out.get(e)
                    out[e] = _mk(s.re if s else _QZERO, _to_mpq(c))
            self._terms = out
        return self._terms

    def __bool__(self) -> bool:
        return not self._re.is_zero() or self._im is not None

    def is_zero(self) -> bool:
        return not self

    def is_real(self) -> bool:
        return self._im is None

    def is_constant(self) -> bool:
        return self._re.is_constant() and (self._im is None or self._im.is_constant())

    def constant_term(self) -> Scalar:
        e = (0,) * len(self.variables)
        re = _to_mpq(self._re[e])
        im = _to_mpq(self._im[e]) if self._im is not None else _QZERO
        return _mk(re, im)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise VariableMismatch(
                f"unknown variable {name!r}; have {self.variables}"
            ) from None

    def degree(self, name: str | None = None) -> int:
        """Total degree, or degree in one variable.  The zero polynomial has degree -1."""
        if not self:
            return -1
        parts = [p for p in (self._re, self._im) if p is not None and not p.is_zero()]
        if name is None:
            return max(int(p.total_degree()) for p in parts)
        i = self.index(name)
        return max(int(p.degrees()[i]) for p in parts)

    def involves(self, name: str) -> bool:
        return self.degree(name) > 0

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    # --- equality -----------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            if self.variables != other.variables or self._re != other._re:
                return False
            if self._im is None or other._im is None:
                return self._im is None and other._im is None
            return self._im == other._im
        if isinstance(other, (int, Fraction, Scalar)):
            c = Scalar.coerce(other)
            if not c:
                return not self
            return self.is_constant() and self.constant_term() == c
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # --- ring operations ----------------------------------------------
    def _check(self, other: "Poly") -> None:
        if other.variables is not self.variables and other.variables != self.variables:
            raise VariableMismatch(
                f"variable lists differ: {self.variables} vs {other.variables}"
            )

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(other, self.variables)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, _SCALARLIKE + (Poly,)):
            return NotImplemented
        other = self._lift(other)
        im = _add_opt(self._im, other._im)
        return Poly._make(self.variables, self._re + other._re, im)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._make(self.variables, -self._re, None if self._im is None else -self._im)

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, _SCALARLIKE + (Poly,)):
            return NotImplemented
        other = self._lift(other)
        if other._im is None:
            im = self._im
        else:
            im = -other._im if self._im is None else self._im - other._im
        return Poly._make(self.variables, self._re - other._re, im)

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) + (-self)

    def scale(self, c) -> "Poly":
        c = Scalar.coerce(c)
        a = _to_fmpq(c.re)
        if not c.im:
            return Poly._make(self.variables, self._re * a, None if self._im is None else self._im * a)
        b = _to_fmpq(c.im)
        if self._im is None:
            return Poly._make(self.variables, self._re * a, self._re * b)
        return Poly._make(
            self.variables, self._re * a - self._im * b, self._re * b + self._im * a
        )

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if not isinstance(other, _SCALARLIKE):
                return NotImplemented
            return self.scale(other)
        self._check(other)
        a, b, c, d = self._re, self._im, other._re, other._im
        if b is None and d is None:
            return Poly._make(self.variables, a * c)
        if b is None:
            return Poly._make(self.variables, a * c, a * d)
        if d is None:
            return Poly._make(self.variables, a * c, b * c)
        return Poly._make(self.variables, a * c - b * d, a * d + b * c)

    def mul_truncated(self, other: "Poly", name: str, order: int) -> "Poly":
        """``self * other`` reduced modulo ``name**(order+1)``."""
        self._check(other)
        return (self * other).truncate(name, order)

    def __rmul__(self, other) -> "Poly":
        if not isinstance(other, _SCALARLIKE):
            return NotImplemented
        return self.scale(other)

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        if self._im is None:
            return Poly._make(self.variables, self._re ** k)
        out = Poly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def _map(self, fn) -> "Poly":
        return Poly._make(self.variables, fn(self._re), None if self._im is None else fn(self._im))

    # --- calculus and substitution ------------------------------------
    def diff(self, name: str) -> "Poly":
        i = self.index(name)
        return self._map(lambda p: p.derivative(i))

    def truncate(self, name: str, order: int) -> "Poly":
        """Drop every term whose degree in ``name`` exceeds ``order``."""
        if order < 0:
            return Poly.zero(self.variables)
        if self.degree(name) <= order:
            return self
        m = _ctx(self.variables).gen(self.index(name)) ** (order + 1)
        return self._map(lambda p: divmod(p, m)[1])

    def coefficient(self, name: str, k: int) -> "Poly":
        """Coefficient of ``name**k``, as a polynomial free of ``name``."""
        i = self.index(name)
        if k == 0:
            return self._map(lambda p: p.subs({name: 0}))
        if self.degree(name) < k:
            return Poly.zero(self.variables)
        low = self.truncate(name, k)
        m = _ctx(self.variables).gen(i) ** k
        return low._map(lambda p: divmod(p, m)[0])

    def coefficients(self, name: str) -> list:
        """All coefficients in ``name``, lowest power first."""
        d = self.degree(name)
        return [self.coefficient(name, k) for k in range(d + 1)]

    def set_zero(self, names: Iterable[str]) -> "Poly":
        names = list(names)
        if not names:
            return self
        for n in names:
            self.index(n)
        sub = {n: 0 for n in names}
        return self._map(lambda p: p.subs(sub))

    def shift(self, name: str, k: int) -> "Poly":
        """Multiply by ``name**k`` (k >= 0)."""
        if k == 0:
            return self
        m = _ctx(self.variables).gen(self.index(name)) ** k
        return self._map(lambda p: p * m)

    def substitute(
        self,
        mapping: Mapping[str, "Poly"],
        variables: Sequence[str] | None = None,
        truncate: tuple[str, int] | None = None,
    ) -> "Poly":
        """Compose with ``mapping``; unmapped variables must exist in the target list.

        ``truncate=(name, n)`` discards terms of degree > n in ``name`` after
        every product, which keeps power-series compositions cheap.
        """
        if variables is None:
            if mapping:
                variables = next(iter(mapping.values())).variables
            else:
                variables = self.variables
        variables = tuple(variables)
        images = []
        for v in self.variables:
            if v in mapping:
                img = mapping[v]
                if img.variables != variables:
                    raise VariableMismatch(
                        f"image of {v!r} lives over {img.variables}, expected {variables}"
                    )
            elif v in variables:
                img = Poly.var(v, variables)
            else:
                raise VariableMismatch(f"no substitution given for variable {v!r}")
            images.append(img)

        def mul(p: Poly, q: Poly) -> Poly:
            return p.mul_truncated(q, *truncate) if truncate else p * q

        powers: list = [dict() for _ in images]

        def power(i: int, k: int) -> Poly:
            cache = powers[i]
            if k not in cache:
                if k == 0:
                    cache[k] = Poly.constant(1, variables)
                elif k == 1:
                    cache[k] = images[i].truncate(*truncate) if truncate else images[i]
                else:
                    cache[k] = mul(power(i, k - 1), power(i, 1))
            return cache[k]

        # Horner in the first variable keeps the number of products down
        out = Poly.zero(variables)
        for e, c in self.terms.items():
            term = Poly.constant(c, variables)
            for i, k in enumerate(e):
                if k:
                    term = mul(term, power(i, k))
                    if not term:
                        break
            out = out + term
        return out

    def evaluate(self, point: Mapping[str, object]) -> Scalar:
        vals = []
        for v in self.variables:
            if v not in point:
                raise KeyError(f"no value assigned to variable {v!r}")
            vals.append(Scalar.coerce(point[v]))
        total = ZERO
        for e, c in self.terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def with_variables(self, variables: Sequence[str]) -> "Poly":
        """Re-embed into another variable list containing every variable actually used."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = []
        for i, v in enumerate(self.variables):
            if v in variables:
                pos.append(variables.index(v))
            elif self.involves(v):
                raise VariableMismatch(f"variable {v!r} is used but absent from {variables}")
            else:
                pos.append(None)
        out = {}
        n = len(variables)
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                if k:
                    ne[pos[i]] = k
            out[tuple(ne)] = c
        return Poly(variables, out)

    def map_coefficients(self, fn) -> "Poly":
        return Poly(self.variables, {e: fn(c) for e, c in self.terms.items()})

    # --- text ---------------------------------------------------------
    def __str__(self) -> str:
        from .parsing import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, variables={self.variables})"


def _add_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def partial_derivative(p: Poly, name: str) -> Poly:
    return p.diff(name)


def substitute_time_curve(
    p: Poly, curve: Mapping[str, Poly], order: int, time: str = "t"
) -> Poly:
    """Evaluate ``p`` along a curve ``x_j = curve[x_j](t)``, modulo ``t**(order+1)``.

    ``p`` may involve the time variable itself; it is mapped to ``t`` of the
    curve's variable list.  Every other variable of ``p`` needs an entry in
    ``curve``.
    """
    if not curve:
        raise VariableMismatch("empty curve")
    target = next(iter(curve.values())).variables
    if time not in target:
        raise VariableMismatch(f"curve polynomials must involve time variable {time!r}")
    mapping = dict(curve)
    for v in p.variables:
        if v == time:
            mapping.setdefault(v, Poly.var(time, target))
        elif v not in mapping:
            raise VariableMismatch(f"curve supplies no substitution for {v!r}")
    return p.substitute(mapping, target, truncate=(time, order))


def restrict_to_subspace(p: Poly, subspace) -> Poly:
    """Set the vanishing coordinates of ``subspace`` to zero."""
    names = subspace.vanishing_names if hasattr(subspace, "vanishing_names") else subspace
    return p.set_zero(names)


def evaluate(p: Poly, point: Mapping[str, object]) -> Scalar:
    return p.evaluate(point)


def monomials_up_to(nvars: int, degree: int):
    """Exponent tuples of total degree <= degree, graded order."""
    for d in range(degree + 1):
        yield from _compositions(nvars, d)


def _compositions(n: int, d: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for k in range(d, -1, -1):
        for rest in _compositions(n - 1, d - k):
            yield (k,) + rest


def factorial_fraction(n: int) -> Fraction:
    return Fraction(1, factorial(n))
