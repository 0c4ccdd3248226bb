"""
Exact linear algebra over the rationals on numpy object arrays.

Rows are cleared of denominators first and then eliminated with the
fraction-free (Bareiss) scheme, so intermediate entries stay integers and
every division is exact. Rationals only reappear in back substitution.
"""
import logging
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

logger = logging.getLogger(__name__)


class SingularMatrix(ArithmeticError):
    pass


LinearSolution = namedtuple('LinearSolution', ['values', 'rank', 'pivots', 'inconsistent_row'])
LinearSolution.__doc__ = """
Outcome of ``solve``. ``values`` has one row per unknown and one column per
right-hand side (free unknowns set to 0); it is None when the system is
inconsistent, in which case ``inconsistent_row`` is an original row index
that no solution can satisfy.
"""


def identity(size):
    return np.array([[Fraction(int(i == j)) for j in range(size)] for i in range(size)], dtype=object).reshape(size, size)


def _integer_rows(matrix):
    """Scale every row by the lcm of its denominators."""
    rows = []
    for row in matrix:
        values = [Fraction(value) for value in row]
        scale = math.lcm(*(value.denominator for value in values)) if values else 1
        rows.append([int(value * scale) for value in values])
    return np.array(rows, dtype=object).reshape(matrix.shape)


def _bareiss(integers, pivot_columns):
    """
    Fraction-free forward elimination in place, pivots searched only in
    ``pivot_columns``. Returns the pivot positions and the row order.
    """
    rows = integers.shape[0]
    order = list(range(rows))
    pivots = []
    previous = 1
    r = 0
    for c in range(pivot_columns):
        if r == rows:
            break
        candidates = [i for i in range(r, rows) if integers[i, c] != 0]
        if not candidates:
            continue
        p = candidates[0]
        if p != r:
            integers[[r, p]] = integers[[p, r]]
            order[r], order[p] = order[p], order[r]
        pivot = integers[r, c]
        if r + 1 < rows:
            below = integers[r + 1:, :]
            integers[r + 1:, :] = (below * pivot - np.multiply.outer(below[:, c], integers[r, :])) // previous
        previous = pivot
        pivots.append((r, c))
        r += 1
    return pivots, order


def echelon(matrix):
    """
    Integer row-echelon form of a rational matrix.

    Returns (echelon array, pivot positions, original row order).
    """
    matrix = np.asarray(matrix, dtype=object)
    integers = _integer_rows(matrix)
    pivots, order = _bareiss(integers, integers.shape[1])
    return integers, pivots, order


def rank(matrix):
    matrix = np.asarray(matrix, dtype=object)
    if matrix.size == 0:
        return 0
    return len(echelon(matrix)[1])


def _back_substitute(upper, pivots, unknowns, rhs_columns):
    values = np.full((unknowns, rhs_columns), Fraction(0), dtype=object)
    for r, c in reversed(pivots):
        pivot = upper[r, c]
        for column in range(rhs_columns):
            total = Fraction(upper[r, unknowns + column])
            for other in range(c + 1, unknowns):
                if upper[r, other]:
                    total -= upper[r, other] * values[other, column]
            values[c, column] = total / pivot
    return values


def solve(matrix, rhs):
    """
    Solve matrix @ x = rhs exactly, ``rhs`` a vector or a matrix of columns.
    """
    matrix = np.asarray(matrix, dtype=object)
    rhs = np.asarray(rhs, dtype=object)
    if rhs.ndim == 1:
        rhs = rhs.reshape(-1, 1)
    rows, unknowns = matrix.shape
    if rhs.shape[0] != rows:
        raise ValueError(f"{rows} equations but {rhs.shape[0]} right-hand sides")
    augmented = _integer_rows(np.concatenate([matrix, rhs], axis=1))
    pivots, order = _bareiss(augmented, unknowns)
    found = len(pivots)
    for r in range(found, rows):
        if any(augmented[r, unknowns:]):
            logger.debug(f"Inconsistent system: row {order[r]} after rank {found}")
            return LinearSolution(None, found, [c for _, c in pivots], order[r])
    values = _back_substitute(augmented, pivots, unknowns, rhs.shape[1])
    return LinearSolution(values, found, [c for _, c in pivots], None)


def inverse(matrix):
    """
    Exact inverse of a square rational matrix; raises SingularMatrix.
    """
    matrix = np.asarray(matrix, dtype=object)
    size = matrix.shape[0]
    if matrix.shape != (size, size):
        raise ValueError(f"cannot invert a {matrix.shape} matrix")
    if size == 0:
        return np.empty((0, 0), dtype=object)
    solution = solve(matrix, identity(size))
    if solution.rank < size:
        raise SingularMatrix(f"matrix of size {size} has rank {solution.rank}")
    return solution.values
