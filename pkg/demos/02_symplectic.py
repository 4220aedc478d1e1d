"""Hamiltonian fields on C^2 with the subspace y = 0."""
from jetlift.fields import TimeDepVectorField, lie_bracket
from jetlift.geometry import SubspaceY, TangentFieldOnY
from jetlift.symplectic import (
    DarbouxSpace,
    check_bracket_perp,
    ham_field,
    hamiltonian_extension,
    is_hamiltonian,
    perp_membership,
    pullback_form_along_flow,
)

space = DarbouxSpace(1)
c = space.chart
Y = SubspaceY.from_names(c, ["y"])

H = c.poly("x*y")
K = c.poly("x*y + x*y^2")
XH, XK = ham_field(H, space), ham_field(K, space)
print("X_H =", XH.to_text())
print("X_K =", XK.to_text())

# K - H vanishes to second order along y = 0, so the fields agree there
assert Y.restrict_field(XH) == Y.restrict_field(XK)
br = lie_bracket(XH, XK)
print("[X_H, X_K] =", br.to_text())
print("on Y       :", Y.restrict_field(br).to_text())
print("in Perp    :", perp_membership(Y.restrict_field(br), Y, space).verdict)
print("report ok  :", check_bracket_perp(XH, XK, Y, space).ok)

# a field that is not Hamiltonian
v = is_hamiltonian(TimeDepVectorField.parse("(2*x, -y)", c), space)
print("(2x, -y) Hamiltonian?", v.verdict, "-", v.reason)

# extend a tangent field on x = 0 to a Hamiltonian whose field restricts to it
Yx = SubspaceY.from_names(c, ["x"])
G = hamiltonian_extension(TangentFieldOnY(Yx, [c.one(), c.poly("y")]), Yx, space)
print("Hamiltonian extension of (1, y) along x = 0:", G)

# the flow of a Hamiltonian field pulls omega back to itself
residual = pullback_form_along_flow(XH, 4, space)
print("pullback residual mod t^5:", [[str(e) for e in row] for row in residual])
