"""
Exact Linear Algebra
--------------------
Rank, reduced row echelon form, nullspaces and linear solves over the
rationals, backed by sympy's ``DomainMatrix`` over ``QQ``.

Vectors and matrices cross this module boundary as lists of
``fractions.Fraction``; domain elements never leak out.
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

Vector = Sequence[Fraction]
Matrix = Sequence[Sequence[Fraction]]


def _to_domain(rows: Matrix, ncols: int) -> DomainMatrix:
    elements = [[QQ(int(v.numerator), int(v.denominator)) for v in row] for row in rows]
    return DomainMatrix(elements, (len(rows), ncols), QQ)


def _from_domain(element) -> Fraction:
    return Fraction(int(element.numerator), int(element.denominator))


def _width(rows: Matrix, ncols: Optional[int]) -> int:
    if ncols is not None:
        return ncols
    return len(rows[0]) if rows else 0


def rref(
    rows: Matrix, ncols: Optional[int] = None
) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """
    Reduced row echelon form.

    Args:
        rows: Matrix rows
        ncols: Column count (required when ``rows`` is empty)

    Returns:
        Tuple of (nonzero rows of the RREF, pivot column indices)
    """
    width = _width(rows, ncols)
    if not rows or width == 0:
        return [], ()
    reduced, pivots = _to_domain(rows, width).rref()
    dense = [[_from_domain(e) for e in row] for row in reduced.to_list()]
    return dense[: len(pivots)], tuple(pivots)


def rank(rows: Matrix, ncols: Optional[int] = None) -> int:
    """Rank of a rational matrix."""
    width = _width(rows, ncols)
    if not rows or width == 0:
        return 0
    return int(_to_domain(rows, width).rank())


def nullspace(rows: Matrix, ncols: int) -> List[List[Fraction]]:
    """
    Basis of {x : rows . x = 0}, one vector per free column.

    Args:
        rows: Matrix rows
        ncols: Number of unknowns

    Returns:
        List of basis vectors (empty when the kernel is trivial)
    """
    reduced, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vector = [Fraction(0)] * ncols
        vector[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vector[p] = -row[f]
        basis.append(vector)
    return basis


def solve(rows: Matrix, rhs: Vector, ncols: Optional[int] = None) -> Optional[List[Fraction]]:
    """
    One solution of ``rows . x = rhs`` with free variables set to zero.

    Returns:
        Solution vector, or None when the system is inconsistent
    """
    width = _width(rows, ncols)
    if not rows:
        return [Fraction(0)] * width
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, width + 1)
    if pivots and pivots[-1] == width:
        return None
    solution = [Fraction(0)] * width
    for row, p in zip(reduced, pivots):
        solution[p] = row[width]
    return solution


def independent_columns(vectors: Sequence[Vector]) -> Tuple[int, ...]:
    """
    Indices of the greedy maximal independent subset of ``vectors``.

    A vector is kept when it is not in the span of the vectors kept before it.
    """
    if not vectors:
        return ()
    length = len(vectors[0])
    columns_as_rows = [[v[i] for v in vectors] for i in range(length)]
    _, pivots = rref(columns_as_rows, len(vectors))
    return pivots


def in_span(vectors: Sequence[Vector], target: Vector) -> bool:
    """True when ``target`` is a linear combination of ``vectors``."""
    if not vectors:
        return all(v == 0 for v in target)
    columns_as_rows = [[v[i] for v in vectors] for i in range(len(target))]
    return solve(columns_as_rows, target, len(vectors)) is not None


def weighted_dot(u: Vector, v: Vector, weights: Vector) -> Fraction:
    """Sum of w_i u_i v_i."""
    return sum((w * a * b for w, a, b in zip(weights, u, v)), Fraction(0))


def matmul(a: Matrix, b: Matrix) -> List[List[Fraction]]:
    inner = len(b)
    width = len(b[0]) if b else 0
    return [
        [sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(width)]
        for row in a
    ]


def matvec(a: Matrix, x: Vector) -> List[Fraction]:
    return [sum((r * v for r, v in zip(row, x)), Fraction(0)) for row in a]
