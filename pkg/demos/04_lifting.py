"""Lift a seed field order by order, then glue three charts with a Cech splitting."""
from jetlift.fields import Chart, TimeDepVectorField, VectorField
from jetlift.foliation import foliation_setup
from jetlift.lifting import (
    DeformationProblem,
    cech_cocycle,
    cech_glue,
    coherent_truncations,
    lift_to_order,
)
from jetlift.symplectic import ham_field, symplectic_setup

# foliation by (1, x), subspace y = 0, lifted to order 3
chart = Chart(("x", "y"))
setup = foliation_setup(chart, [VectorField.parse("(1, x)", chart)], ["y"])
seed = TimeDepVectorField.parse("(1, x)", chart)
problem = DeformationProblem(setup, seed, 3, [VectorField.parse("(x, x^2)", chart), None])
result = lift_to_order(problem)
print("lifted field  :", result.field.to_text())
print("jet differences:", [d.to_text() for d in result.differences])
print("admissible at 3:", result.report.admissible)
print("coherent truncations:", coherent_truncations(result, setup.subspace))

# three symplectic charts that all agree to order 1 on y = 0
st = symplectic_setup(1, ["y"])
c = st.chart
base = ham_field(c.poly("x*y"), st.notes["space"])
deltas = [ham_field(c.poly(h), st.notes["space"]) for h in ("0", "x^2*y", "-x*y^2 + y")]
deltas = [VectorField(c, d.components) for d in deltas]
charts = [
    TimeDepVectorField(c, (base + d.times_t_power(1, 1)).components)
    for d in deltas
]
data = cech_cocycle(charts, 1, st)
for (j, k), v in sorted(data.cocycle.items()):
    if j < k:
        print(f"C_{j}{k} =", v.to_text())
print("cocycle invariants hold:", data.invariants_hold())

split = [-st.subspace.restrict_field(d) for d in deltas]
glued = cech_glue(data, split, st)
print("glued 2-jet on Y:", glued.glued_jet.to_json())
