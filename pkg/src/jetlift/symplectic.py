"""Complex-symplectic geometry in Darboux coordinates.

Coordinates are ordered ``(x_1..x_N, y_1..y_N)`` with ``omega = sum dx_i ^ dy_i``.
Hamiltonian fields follow ``i_{X_H} omega = dH``, so
``X_H = (dH/dy_i, -dH/dx_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fields import Chart, TimeDepVectorField, VectorField, lie_bracket
from .geometry import (
    MEMBER,
    NON_MEMBER,
    HypothesisError,
    MembershipCertificate,
    ObstructionSpec,
    SheafSpec,
    SubspaceY,
    TangentFieldOnY,
)
from .jets import flow_jet
from .poly import Poly

__all__ = [
    "DarbouxSpace",
    "OneFormOnY",
    "ham_field",
    "poisson_bracket",
    "contract_omega",
    "is_hamiltonian",
    "HamiltonianVerdict",
    "contraction_forms",
    "hamiltonian_extension",
    "perp_membership",
    "HamiltonianSheaf",
    "Perp",
    "check_bracket_perp",
    "pullback_form_along_flow",
    "symplectic_setup",
]


@dataclass(frozen=True)
class DarbouxSpace:
    """``C^{2N}`` with the standard symplectic form."""

    N: int
    time: str = "t"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("half-dimension must be >= 1")

    @property
    def chart(self) -> Chart:
        if self.N == 1:
            return Chart(("x", "y"), self.time)
        xs = tuple(f"x{i}" for i in range(1, self.N + 1))
        ys = tuple(f"y{i}" for i in range(1, self.N + 1))
        return Chart(xs + ys, self.time)

    @property
    def dim(self) -> int:
        return 2 * self.N

    def partner(self, i: int) -> int:
        return i + self.N if i < self.N else i - self.N

    def omega(self, i: int, j: int) -> int:
        """Constant coefficient ``omega(e_i, e_j)``."""
        if j == i + self.N and i < self.N:
            return 1
        if i == j + self.N and j < self.N:
            return -1
        return 0

    def pair(self, u: Sequence[Poly], w: Sequence[Poly]) -> Poly:
        """``omega(u, w) = sum u_x w_y - u_y w_x``."""
        out = self.chart.zero()
        for i in range(self.N):
            out = out + u[i] * w[i + self.N] - u[i + self.N] * w[i]
        return out


@dataclass
class OneFormOnY:
    """``sum_k coeffs[k] dz_k`` with coefficients restricted to Y."""

    subspace: SubspaceY
    coeffs: tuple

    def __post_init__(self):
        self.coeffs = tuple(self.coeffs)

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OneFormOnY):
            return NotImplemented
        return self.subspace == other.subspace and self.coeffs == other.coeffs

    def __str__(self) -> str:
        parts = [
            f"({c})*d{name}"
            for c, name in zip(self.coeffs, self.subspace.chart.coords)
            if c
        ]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {name: str(c) for c, name in zip(self.coeffs, self.subspace.chart.coords)}

    def is_closed(self) -> bool:
        """Closedness on Y: only the free differentials take part."""
        chart = self.subspace.chart
        free = self.subspace.free
        for a in free:
            for b in free:
                if a < b:
                    lhs = self.coeffs[b].diff(chart.coords[a])
                    rhs = self.coeffs[a].diff(chart.coords[b])
                    if lhs != rhs:
                        return False
        return True


def ham_field(H: Poly, space: DarbouxSpace) -> TimeDepVectorField:
    """``X_H``; time-independent ``H`` gives a :class:`VectorField`."""
    chart = space.chart
    H = chart.poly(H)
    comps = [H.diff(chart.coords[i + space.N]) for i in range(space.N)]
    comps += [-H.diff(chart.coords[i]) for i in range(space.N)]
    if H.involves(chart.time):
        return TimeDepVectorField(chart, comps)
    return VectorField(chart, comps)


def poisson_bracket(H: Poly, K: Poly, space: DarbouxSpace) -> Poly:
    """The bracket making ``[X_H, X_K] = X_{H,K}`` hold."""
    chart = space.chart
    H, K = chart.poly(H), chart.poly(K)
    out = chart.zero()
    for i in range(space.N):
        x, y = chart.coords[i], chart.coords[i + space.N]
        out = out + H.diff(y) * K.diff(x) - H.diff(x) * K.diff(y)
    return out


def contract_omega(A: TimeDepVectorField, space: DarbouxSpace) -> list:
    """Coefficients of ``i_A omega``: ``-A_{y_i}`` on ``dx_i`` and ``A_{x_i}`` on ``dy_i``."""
    N = space.N
    return [-A[i + N] for i in range(N)] + [A[i] for i in range(N)]


def _homotopy_primitive(alpha: Sequence[Poly], names: Sequence[str], all_coords: Sequence[str]) -> Poly:
    """Primitive of a closed form along the straight line to the origin in ``names``.

    Only the coordinates in ``names`` are scaled; other variables (time,
    or coordinates set to zero) act as parameters.
    """
    out = alpha[0] * 0
    idx = [all_coords.index(n) for n in names]
    for k, a in zip(idx, (alpha[all_coords.index(n)] for n in names)):
        if not a:
            continue
        z = Poly.var(all_coords[k], a.variables)
        pos = [a.variables.index(n) for n in names]
        terms = {}
        for e, c in a.terms.items():
            deg = sum(e[p] for p in pos)
            terms[e] = c / (deg + 1)
        out = out + Poly._raw(a.variables, terms) * z
    return out


@dataclass
class HamiltonianVerdict:
    verdict: str
    primitive: Poly | None = None
    reason: str = ""

    @property
    def is_member(self) -> bool:
        return self.verdict == MEMBER

    def __bool__(self) -> bool:
        return self.is_member

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "primitive": None if self.primitive is None else str(self.primitive),
            "reason": self.reason,
        }


def is_hamiltonian(A: TimeDepVectorField, space: DarbouxSpace) -> HamiltonianVerdict:
    """Closedness of ``i_A omega`` in the chart coordinates; time is a parameter.

    On success the primitive ``H`` satisfies ``ham_field(H) == A``.
    """
    chart = space.chart
    if A.chart != chart:
        raise ValueError("field does not live on the Darboux chart")
    alpha = contract_omega(A, space)
    coords = chart.coords
    for a in range(space.dim):
        for b in range(a + 1, space.dim):
            if alpha[b].diff(coords[a]) != alpha[a].diff(coords[b]):
                return HamiltonianVerdict(
                    NON_MEMBER, None,
                    f"d(i_A omega) has a nonzero d{coords[a]}^d{coords[b]} coefficient",
                )
    H = _homotopy_primitive(alpha, coords, coords)
    if ham_field(H, space) != TimeDepVectorField(chart, A.components):
        raise AssertionError("primitive does not reproduce the field")
    return HamiltonianVerdict(MEMBER, H, "contraction with omega is closed")


def contraction_forms(A: TangentFieldOnY, Y: SubspaceY, space: DarbouxSpace):
    """``(eta, xi)``: ``eta = omega(A, .)`` along Y and its pullback to Y."""
    if Y.chart != space.chart:
        raise ValueError("subspace is not a subspace of the Darboux chart")
    comps = [Y.restrict(a) for a in A]
    eta = [Y.restrict(c) for c in contract_omega(comps, space)]
    xi = [c if i in Y.free else Y.chart.zero() for i, c in enumerate(eta)]
    return OneFormOnY(Y, eta), OneFormOnY(Y, xi)


def hamiltonian_extension(A: TangentFieldOnY, Y: SubspaceY, space: DarbouxSpace) -> Poly:
    """A Hamiltonian ``G`` on the chart with ``X_G`` restricting to ``A`` on Y.

    ``G = g + sum_s eta_s * z_s``, where ``dg = xi`` on Y and ``z_s`` runs
    over the vanishing coordinates.
    """
    eta, xi = contraction_forms(A, Y, space)
    if not xi.is_closed():
        raise HypothesisError("the pulled-back contraction form is not closed")
    coords = Y.chart.coords
    G = _homotopy_primitive(list(xi.coeffs), Y.free_names, coords)
    for s in Y.vanishing:
        G = G + eta.coeffs[s] * Y.chart.coord(s)
    got = Y.restrict_field(ham_field(G, space))
    if list(got.components) != [Y.restrict(a) for a in A]:
        raise AssertionError("extension does not restrict to the given field")
    return G


def perp_membership(v: TangentFieldOnY, Y: SubspaceY, space: DarbouxSpace) -> MembershipCertificate:
    """``omega(v, e) = 0`` on Y for every coordinate direction ``e`` tangent to Y."""
    coords = Y.chart.coords
    for i in Y.free:
        # omega(v, d/dx_i) = -v_{y_i}; omega(v, d/dy_i) = v_{x_i}
        c = Y.restrict(v[space.partner(i)])
        if c:
            return MembershipCertificate(
                NON_MEMBER, None,
                f"omega(v, d/d{coords[i]}) = {'-' if i < space.N else ''}({c}) on Y",
            )
    return MembershipCertificate(MEMBER, None, "omega-orthogonal to every tangent direction of Y")


class HamiltonianSheaf(SheafSpec):
    """Hamiltonian fields on a Darboux chart."""

    kind = "hamiltonian"

    def __init__(self, space: DarbouxSpace):
        self.space = space
        self.chart = space.chart

    def contains(self, A):
        v = is_hamiltonian(A, self.space)
        return MembershipCertificate(
            v.verdict, [v.primitive] if v.primitive is not None else None, v.reason
        )

    def restricted_contains(self, v):
        _, xi = contraction_forms(v, v.subspace, self.space)
        if xi.is_closed():
            return MembershipCertificate(MEMBER, None, "pulled-back contraction form is closed")
        return MembershipCertificate(NON_MEMBER, None, "pulled-back contraction form is not closed")

    def extend(self, v):
        G = hamiltonian_extension(v, v.subspace, self.space)
        return ham_field(G, self.space)

    def bracket_closed(self):
        return {"closed": True, "pairs": [], "reason": "Hamiltonian fields form a Lie algebra"}

    def to_json(self):
        return {"kind": self.kind, "N": self.space.N}


class Perp(ObstructionSpec):
    """Sections over Y that are omega-orthogonal to the tangent spaces of Y."""

    kind = "perp"

    def __init__(self, space: DarbouxSpace):
        self.space = space

    def contains(self, v):
        return perp_membership(v, v.subspace, self.space)

    def to_json(self):
        return {"kind": self.kind, "N": self.space.N}


@dataclass
class BracketPerpReport:
    bracket: VectorField
    restricted: TangentFieldOnY
    certificate: MembershipCertificate

    @property
    def ok(self) -> bool:
        return self.certificate.is_member

    def to_json(self) -> dict:
        return {
            "bracket": self.bracket.to_text(),
            "restricted": self.restricted.to_text(),
            "certificate": self.certificate.to_json(),
        }


def check_bracket_perp(F: VectorField, G: VectorField, Y: SubspaceY, space: DarbouxSpace) -> BracketPerpReport:
    """Bracket of two Hamiltonian fields that agree along Y, tested against Perp."""
    for name, A in (("first", F), ("second", G)):
        if not is_hamiltonian(A, space):
            raise HypothesisError(f"{name} field is not Hamiltonian")
    if Y.restrict_field(F) != Y.restrict_field(G):
        raise HypothesisError("fields do not agree along Y")
    br = lie_bracket(F, G)
    r = Y.restrict_field(br)
    return BracketPerpReport(br, r, perp_membership(r, Y, space))


def pullback_form_along_flow(A: TimeDepVectorField, n: int, space: DarbouxSpace) -> list:
    """``Phi_t^* omega - omega`` modulo ``t^(n+1)`` as a full antisymmetric matrix."""
    chart = space.chart
    for k, Ak in enumerate(A.time_coefficients()):
        if not is_hamiltonian(Ak, space):
            raise HypothesisError(f"coefficient of t^{k} is not Hamiltonian")
    curve = flow_jet(A, n).curve()
    t = chart.time
    phi = [curve[c] for c in chart.coords]
    jac = [[p.diff(c) for c in chart.coords] for p in phi]
    d = space.dim
    out = [[chart.zero() for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            s = chart.zero()
            for k in range(space.N):
                l = k + space.N
                s = s + jac[k][i].mul_truncated(jac[l][j], t, n)
                s = s - jac[k][j].mul_truncated(jac[l][i], t, n)
            s = s - space.omega(i, j)
            out[i][j] = s
            out[j][i] = -s
    return out


def symplectic_setup(N: int, vanishing: Sequence[str], name: str = ""):
    """A ready :class:`DeformationSetup` with F Hamiltonian and G = Perp."""
    from .geometry import DeformationSetup

    space = DarbouxSpace(N)
    Y = SubspaceY.from_names(space.chart, vanishing)
    return DeformationSetup(
        space.chart, Y, HamiltonianSheaf(space), Perp(space),
        name=name or f"darboux-{2 * N}", notes={"space": space},
    )
