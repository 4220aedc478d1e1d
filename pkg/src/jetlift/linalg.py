"""Exact sparse Gaussian elimination over Gaussian rationals."""
from __future__ import annotations

from typing import Hashable, Mapping, Sequence

from .poly import Scalar

__all__ = ["solve_sparse"]

_RHS = object()


def solve_sparse(
    columns: Sequence[Mapping[Hashable, Scalar]],
    target: Mapping[Hashable, Scalar],
) -> list | None:
    """Find scalars ``c`` with ``sum_j c_j * columns[j] == target``.

    Vectors are sparse dicts keyed by arbitrary row labels.  Returns one
    solution (free unknowns set to zero) or ``None`` if the system is
    inconsistent.
    """
    rows: dict = {}
    for j, col in enumerate(columns):
        for key, v in col.items():
            if v:
                rows.setdefault(key, {})[j] = Scalar.coerce(v)
    for key, v in target.items():
        if v:
            rows.setdefault(key, {})[_RHS] = Scalar.coerce(v)

    pivots: dict = {}
    order: list = []
    for row in rows.values():
        row = dict(row)
        # eliminate known pivots until the row is reduced
        changed = True
        while changed:
            changed = False
            for col in [c for c in row if c is not _RHS and c in pivots]:
                if col not in row:
                    continue
                factor = row[col]
                for c, v in pivots[col].items():
                    nv = row.get(c)
                    nv = -(factor * v) if nv is None else nv - factor * v
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
                changed = True
        unknowns = [c for c in row if c is not _RHS]
        if not unknowns:
            if row.get(_RHS):
                return None
            continue
        pc = min(unknowns)
        inv = row[pc].inverse()
        pivots[pc] = {c: v * inv for c, v in row.items()}
        order.append(pc)

    solution = [Scalar(0)] * len(columns)
    for pc in reversed(order):
        row = pivots[pc]
        value = row.get(_RHS, Scalar(0))
        for c, v in row.items():
            if c is _RHS or c == pc:
                continue
            value = value - v * solution[c]
        solution[pc] = value
    return solution
