"""
Exact Simplex
-------------
Two-phase primal simplex over ``Fraction`` with Bland's anti-cycling rule.

Solves ``maximize c.x  subject to  A x = b, x >= 0`` exactly. Used for
interior-point probing of martingale-measure polytopes and for the
no-arbitrage linear program.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


class LinearProgramResult(BaseModel):
    """Outcome of a linear program.

    Attributes:
        status: ``optimal``, ``infeasible`` or ``unbounded``
        x: Optimal basic solution when ``status == "optimal"``
        value: Optimal objective value when ``status == "optimal"``
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: str
    x: Optional[tuple] = None
    value: Optional[Fraction] = None


class SimplexTableau:
    """Dense simplex tableau kept in canonical form with respect to ``basis``.

    Row ``i`` reads ``sum_j A[i][j] x_j = b[i]`` with ``basis[i]`` the basic
    variable of the row. ``d`` holds reduced costs of a maximisation.
    """

    def __init__(
        self,
        A: Sequence[Sequence[Fraction]],
        b: Sequence[Fraction],
        basis: Sequence[int],
    ) -> None:
        self.A: List[List[Fraction]] = [list(row) for row in A]
        self.b: List[Fraction] = list(b)
        self.basis: List[int] = list(basis)
        self.m = len(self.A)
        self.n = len(self.A[0]) if self.A else 0
        self.d: List[Fraction] = [ZERO] * self.n
        self.value = ZERO

    def set_objective(self, c: Sequence[Fraction]) -> None:
        """Price out the basic columns for objective ``c``."""
        self.d = list(c)
        self.value = ZERO
        for i, j in enumerate(self.basis):
            cj = c[j]
            if cj:
                for k in range(self.n):
                    self.d[k] -= cj * self.A[i][k]
                self.value += cj * self.b[i]

    def pivot(self, i: int, j: int) -> None:
        piv = self.A[i][j]
        row = [a / piv for a in self.A[i]]
        self.A[i] = row
        self.b[i] /= piv
        for k in range(self.m):
            if k != i:
                f = self.A[k][j]
                if f:
                    self.A[k] = [a - f * r for a, r in zip(self.A[k], row)]
                    self.b[k] -= f * self.b[i]
        f = self.d[j]
        if f:
            self.d = [a - f * r for a, r in zip(self.d, row)]
            self.value += f * self.b[i]
        self.basis[i] = j

    def bland_primal_step(self, allowed: int) -> str:
        entering = [j for j in range(min(allowed, self.n)) if self.d[j] > 0]
        if not entering:
            return "optimal"
        j = entering[0]
        candidates = [
            (self.b[i] / self.A[i][j], self.basis[i], i)
            for i in range(self.m)
            if self.A[i][j] > 0
        ]
        if not candidates:
            return "unbounded"
        _, _, i = min(candidates)
        self.pivot(i, j)
        return "go_on"

    def bland_primal(self, allowed: Optional[int] = None) -> str:
        limit = self.n if allowed is None else allowed
        steps = 0
        while True:
            status = self.bland_primal_step(limit)
            if status != "go_on":
                logger.debug("simplex finished after %d pivots: %s", steps, status)
                return status
            steps += 1

    def solution(self, width: int) -> List[Fraction]:
        x = [ZERO] * width
        for i, j in enumerate(self.basis):
            if j < width:
                x[j] = self.b[i]
        return x


def maximize(
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> LinearProgramResult:
    """
    Maximize ``c.x`` subject to ``A x = b`` and ``x >= 0``.

    Args:
        A: Constraint rows
        b: Right-hand side
        c: Objective coefficients

    Returns:
        LinearProgramResult with an optimal basic solution when one exists
    """
    n = len(c)
    rows = []
    rhs = []
    for row, value in zip(A, b):
        if value < 0:
            rows.append([-a for a in row])
            rhs.append(-value)
        else:
            rows.append(list(row))
            rhs.append(value)
    m = len(rows)

    # phase one: artificial variable per row, maximise minus their sum
    tableau = SimplexTableau(
        [row + [Fraction(int(k == i)) for k in range(m)] for i, row in enumerate(rows)],
        rhs,
        [n + i for i in range(m)],
    )
    tableau.set_objective([ZERO] * n + [Fraction(-1)] * m)
    tableau.bland_primal()
    if tableau.value < 0:
        return LinearProgramResult(status="infeasible")

    # drive remaining artificials out of the basis, dropping redundant rows
    i = 0
    while i < tableau.m:
        if tableau.basis[i] >= n:
            pivot_col = next((j for j in range(n) if tableau.A[i][j] != 0), None)
            if pivot_col is None:
                logger.debug("dropping redundant constraint row %d", i)
                del tableau.A[i]
                del tableau.b[i]
                del tableau.basis[i]
                tableau.m -= 1
                continue
            tableau.pivot(i, pivot_col)
        i += 1

    tableau.A = [row[:n] for row in tableau.A]
    tableau.n = n
    tableau.set_objective(list(c))
    status = tableau.bland_primal()
    if status == "unbounded":
        return LinearProgramResult(status="unbounded")
    x = tableau.solution(n)
    return LinearProgramResult(status="optimal", x=tuple(x), value=tableau.value)
