from hypothesis import given
from hypothesis import strategies as st

from jetlift.linalg import solve_sparse
from jetlift.poly import Scalar

from conftest import scalars


def test_unique_solution():
    cols = [{"a": 1, "b": 1}, {"a": 1, "b": -1}]
    assert solve_sparse(cols, {"a": 3, "b": 1}) == [2, 1]


def test_inconsistent():
    assert solve_sparse([{"a": 1}], {"b": 1}) is None


def test_gaussian_pivot():
    i = Scalar(0, 1)
    assert solve_sparse([{"r": i}], {"r": 1}) == [-i]


def test_free_unknowns_are_zero():
    sol = solve_sparse([{"r": 1}, {"r": 2}], {"r": 4})
    assert sol[0] + 2 * sol[1] == 4


def test_empty_target():
    assert solve_sparse([{"r": 1}], {}) == [0]


@given(st.lists(st.lists(scalars, min_size=4, max_size=4), min_size=1, max_size=5),
       st.lists(scalars, min_size=5, max_size=5))
def test_solutions_reproduce_consistent_targets(cols, coeffs):
    columns = [dict(enumerate(c)) for c in cols]
    target = {}
    for c, col in zip(coeffs, columns):
        for k, v in col.items():
            target[k] = target.get(k, Scalar(0)) + c * v
    sol = solve_sparse(columns, target)
    assert sol is not None
    back = {}
    for c, col in zip(sol, columns):
        for k, v in col.items():
            back[k] = back.get(k, Scalar(0)) + c * v
    assert all(back.get(k, 0) == target.get(k, 0) for k in set(back) | set(target))
