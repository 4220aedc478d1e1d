"""Brackets, Lie_D, flow jets and the jet-gap formula on the plane."""
from jetlift.fields import Chart, TimeDepVectorField, iterated_lie_D, lie_bracket, lie_D
from jetlift.geometry import SubspaceY
from jetlift.jets import difference_formula, flow_jet, jet_difference

chart = Chart(("x", "y"))
A = TimeDepVectorField.parse("(y, t*x)", chart)
B = TimeDepVectorField.parse("(x^2, 1 + t)", chart)

print("A =", A.to_text())
print("B =", B.to_text())
print("[A, B]        =", lie_bracket(A, B).to_text())
print("Lie_D(A) B    =", lie_D(A, B).to_text())
print("Lie_D(A)^2 A  =", iterated_lie_D(A, A, 2).to_text())

# the flow of A as a power series in t, through t^3
J = flow_jet(A, 3)
for m in range(4):
    print(f"  t^{m} coefficient:", [str(c) for c in J.coefficient(m)])

# two fields with equal 2-jets; the 3-jet gap is predicted by the formula
C = A + TimeDepVectorField.parse("(t^2*y, 0)", chart)
Y = SubspaceY.from_names(chart, [])
gap = jet_difference(flow_jet(C, 3), flow_jet(A, 3), Y)
formula = difference_formula([A] * 2, C)
print("jet gap      :", gap.to_text())
print("formula value:", formula.to_text())
assert gap.components == Y.restrict_field(formula).components
