"""The foliation spanned by (1, x) on C^2, restricted to y = 0."""
from jetlift.fields import Chart, TimeDepVectorField, VectorField, lie_bracket
from jetlift.foliation import check_foliation_bracket, tangency_ideal, velocity_in_foliation
from jetlift.geometry import FoliationSpan, SubspaceY

chart = Chart(("x", "y"))
A = VectorField.parse("(1, x)", chart)
F = FoliationSpan(chart, [A])
Y = SubspaceY.from_names(chart, ["y"])

# the leaves are tangent to Y exactly where x vanishes
print("tangency ideal:", tangency_ideal(F, Y))

B = A.scale(chart.poly("1 + y"))
print("A and (1 + y) A agree on Y:", Y.restrict_field(A) == Y.restrict_field(B))
print("[A, B] =", lie_bracket(A, B).to_text())
rep = check_foliation_bracket(A, B, Y, F)
print("bracket in J_T * F_Y:", rep.certificate.verdict, "witness", [str(w) for w in rep.certificate.witness])

# the flow velocity of a time-dependent field of F stays in F along the flow
X = TimeDepVectorField(chart, [c * chart.poly("1 + t*x") for c in A])
vel = velocity_in_foliation(X, 4, F)
print("velocity mod t^4:", vel.verdict, [str(f) for f in vel.witness])
