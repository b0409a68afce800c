"""Tests for exact linear algebra and the exact simplex."""

from fractions import Fraction as Fr

from prplab import linalg
from prplab.simplex import maximize


class TestLinalg:
    def test_rank(self):
        assert linalg.rank([[1, 2], [2, 4]]) == 1
        assert linalg.rank([[1, 0], [0, 1]]) == 2
        assert linalg.rank([], 3) == 0

    def test_rref_pivots(self):
        reduced, pivots = linalg.rref([[2, 4, 2], [1, 2, 3]])
        assert pivots == (0, 2)
        assert reduced[0] == [1, 2, 0]

    def test_nullspace(self):
        basis = linalg.nullspace([[1, 1, 1]], 3)
        assert len(basis) == 2
        for vector in basis:
            assert sum(vector) == 0

    def test_solve(self):
        assert linalg.solve([[1, 1], [1, -1]], [Fr(3), Fr(1)]) == [2, 1]

    def test_solve_inconsistent(self):
        assert linalg.solve([[1, 1], [2, 2]], [Fr(1), Fr(3)]) is None

    def test_solve_exact_thirds(self):
        assert linalg.solve([[3]], [Fr(1)]) == [Fr(1, 3)]

    def test_independent_columns(self):
        vectors = [[1, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0]]
        assert linalg.independent_columns(vectors) == (0, 2)

    def test_in_span(self):
        assert linalg.in_span([[1, 0], [0, 1]], [Fr(5), Fr(-2)])
        assert not linalg.in_span([[1, 1]], [Fr(1), Fr(0)])
        assert linalg.in_span([], [Fr(0), Fr(0)])

    def test_weighted_dot(self):
        assert linalg.weighted_dot([1, 2], [3, 4], [Fr(1, 2), Fr(1, 4)]) == Fr(7, 2)


class TestSimplex:
    def test_optimal(self):
        result = maximize([[1, 1]], [Fr(1)], [Fr(1), Fr(0)])
        assert result.status == "optimal"
        assert result.value == 1
        assert result.x == (1, 0)

    def test_infeasible(self):
        result = maximize([[1, 1]], [Fr(-1)], [Fr(1), Fr(0)])
        assert result.status == "infeasible"

    def test_unbounded(self):
        result = maximize([[1, -1]], [Fr(0)], [Fr(1), Fr(0)])
        assert result.status == "unbounded"

    def test_redundant_rows(self):
        result = maximize([[1, 1, 0], [2, 2, 0], [0, 0, 1]], [Fr(1), Fr(2), Fr(1)], [0, 1, 0])
        assert result.status == "optimal"
        assert result.value == 1
