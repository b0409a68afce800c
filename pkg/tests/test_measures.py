"""Tests for martingale-measure polytopes and the fundamental-theorem reports."""

from fractions import Fraction as Fr

import pytest

from prplab.calculus import doob_decomposition
from prplab.exceptions import (
    FiltrationsNotIndependentError,
    InfeasibleSystemError,
    NoEMMError,
    NotADensityError,
    NotEquivalentError,
    NotInPolytopeError,
)
from prplab.measures import (
    emm_set,
    extremal_points,
    find_equivalent_mm,
    first_ftap_check,
    is_extremal,
    is_unique_emm,
    martingale_polytope,
    measure_from_density,
    minimal_mm_check,
    mutually_non_dominated,
    no_arbitrage_check,
    pairwise_singular,
    product_density_measure,
    product_law,
    render,
    second_ftap_report,
    unique_emm,
)
from prplab.models import Measure, Process, RandomVariable
from prplab.space import build_space, natural_filtration, with_filtration

def _one_step(values, probabilities=None):
    n = len(values)
    labels = [f"w{i}" for i in range(n)]
    weights = probabilities or [Fr(1, n)] * n
    filtration = [[list(range(n))], [[i] for i in range(n)]]
    space = build_space(labels, weights, filtration, 1)
    X = Process.of([[0, v] for v in values])
    return space, X


def _polytope(lab, name="X"):
    X = lab.process(name)
    return martingale_polytope([X], lab.filtration(), lab.space)


class TestPolytope:
    def test_binomial_is_a_point(self, bin_lab):
        poly = _polytope(bin_lab)
        assert poly.constraint_matrix[-1] == (1, 1)
        assert find_equivalent_mm(poly).weights == (Fr(1, 3), Fr(2, 3))
        assert is_unique_emm(poly)
        assert [v.weights for v in extremal_points(poly)] == [(Fr(1, 3), Fr(2, 3))]

    def test_unique_emm_lifted(self, bin_lab, tau_lab):
        assert unique_emm([bin_lab.process("X")], bin_lab.filtration(), bin_lab.space).weights == (
            Fr(1, 3),
            Fr(2, 3),
        )
        tau = unique_emm([tau_lab.process("X")], tau_lab.filtration(), tau_lab.space)
        assert tau == tau_lab.space.measure

    def test_trinomial_vertices(self, tri_lab):
        poly = _polytope(tri_lab)
        vertices = extremal_points(poly)
        assert [v.weights for v in vertices] == [(0, 1, 0), (Fr(1, 3), 0, Fr(2, 3))]
        assert not is_unique_emm(poly)
        assert unique_emm([tri_lab.process("X")], tri_lab.filtration(), tri_lab.space) is None

    def test_trinomial_equivalent_measure(self, tri_lab):
        poly = _polytope(tri_lab)
        emm = find_equivalent_mm(poly)
        assert emm.weights == (Fr(1, 6), Fr(1, 2), Fr(1, 3))
        assert poly.contains(emm.weights)
        assert not is_extremal(emm, poly)
        assert is_extremal(Measure.of([0, 1, 0]), poly)

    def test_is_extremal_outside(self, tri_lab):
        with pytest.raises(NotInPolytopeError):
            is_extremal(Measure.of([1, 0, 0]), _polytope(tri_lab))

    def test_emm_set_uses_terminal_blocks(self, tau_lab):
        q, poly = emm_set([tau_lab.process("X")], tau_lab.filtration(), tau_lab.space)
        assert q.space.size == 4
        assert poly.outcome_count == 4


class TestSingularity:
    def test_trinomial_vertices_disjoint(self, tri_lab):
        vertices = extremal_points(_polytope(tri_lab))
        assert pairwise_singular(vertices)
        assert mutually_non_dominated(vertices)

    def test_overlapping_vertices(self):
        # two down moves: vertices share the up outcome
        space, X = _one_step([1, -1, -2])
        vertices = extremal_points(martingale_polytope([X], space.filtration, space))
        assert [v.weights for v in vertices] == [
            (Fr(1, 2), Fr(1, 2), 0),
            (Fr(2, 3), 0, Fr(1, 3)),
        ]
        assert not pairwise_singular(vertices)
        assert mutually_non_dominated(vertices)

    def test_nested_supports_are_dominated(self):
        measures = [Measure.of(["1/2", "1/2", 0]), Measure.of(["1/3", "1/3", "1/3"])]
        assert not mutually_non_dominated(measures)


class TestArbitrage:
    def test_no_emm(self):
        space, X = _one_step([1, 2])
        poly = martingale_polytope([X], space.filtration, space)
        assert find_equivalent_mm(poly) is None
        assert not no_arbitrage_check([X], space.filtration, space.measure)
        with pytest.raises(InfeasibleSystemError):
            extremal_points(poly)

    def test_first_theorem(self):
        space, X = _one_step([1, 2])
        report = first_ftap_check([X], space.filtration, space)
        assert report.conclusions == {"no_arbitrage_iff_emm_exists": True}
        assert report.values["no_arbitrage"] == "false"
        assert "emm" not in report.values

    def test_first_theorem_viable(self, tri_lab):
        report = first_ftap_check([tri_lab.process("X")], tri_lab.filtration(), tri_lab.space)
        assert report.passed
        assert report.values["no_arbitrage"] == "true"

    def test_null_outcome_has_no_equivalent_measure(self):
        # the zero move is fine, the lone positive move forces q = 0 on it
        space, X = _one_step([0, 1])
        poly = martingale_polytope([X], space.filtration, space)
        assert find_equivalent_mm(poly) is None
        assert [v.weights for v in extremal_points(poly)] == [(1, 0)]

    def test_second_theorem_needs_emm(self):
        space, X = _one_step([1, 2])
        with pytest.raises(NoEMMError):
            second_ftap_report(X, space.filtration, space)


class TestSecondTheorem:
    def test_binomial_complete(self, bin_lab):
        report = second_ftap_report(bin_lab.process("X"), bin_lab.filtration(), bin_lab.space)
        assert report.unique and report.complete
        assert report.passed
        assert report.values["emm"] == "1/3 2/3"

    def test_trinomial_incomplete(self, tri_lab):
        report = second_ftap_report(tri_lab.process("X"), tri_lab.filtration(), tri_lab.space)
        assert not report.unique
        assert not report.complete
        assert report.passed
        assert report.values["supports_disjoint"] == "true"
        assert report.values["vertex_1"] == "1/3 0 2/3"
        assert report.dimensions["vertices"] == 2
        extremal = [m.extremal for m in report.measures]
        assert extremal.count(True) == 2

    def test_overlapping_vertices_still_pass(self):
        space, X = _one_step([1, -1, -2])
        report = second_ftap_report(X, space.filtration, space)
        assert report.passed
        assert report.values["supports_disjoint"] == "false"


class TestDensities:
    def test_measure_from_density(self, bin_lab):
        Q = measure_from_density(bin_lab.space.measure, RandomVariable.of(["2/3", "4/3"]))
        assert Q.weights == (Fr(1, 3), Fr(2, 3))

    @pytest.mark.parametrize("values", [[0, 2], [1, 2], [-1, 3]])
    def test_not_a_density(self, bin_lab, values):
        with pytest.raises(NotADensityError):
            measure_from_density(bin_lab.space.measure, RandomVariable.of(values))

    def test_product_density(self, prod_lab):
        X, Y = prod_lab.process("X"), prod_lab.process("Y")
        fX = natural_filtration([X], prod_lab.space)
        fY = natural_filtration([Y], prod_lab.space)
        LX = RandomVariable.of(["1/2", "1/2", 2, 2])
        LY = RandomVariable.of(["1/2", 2, "1/2", 2])
        Q = product_density_measure(prod_lab.space.measure, LX, LY, fX, fY)
        assert render(Q.weights) == "1/9 2/9 2/9 4/9"

    def test_product_density_requires_independence(self, coin_lab):
        M, N = coin_lab.process("M"), coin_lab.process("N")
        fM = natural_filtration([M], coin_lab.space)
        fN = natural_filtration([N], coin_lab.space)
        ones = RandomVariable.constant(4, 1)
        with pytest.raises(FiltrationsNotIndependentError):
            product_density_measure(coin_lab.measure("Q"), ones, ones, fM, fN)

    def test_product_density_requires_measurability(self, prod_lab):
        X, Y = prod_lab.process("X"), prod_lab.process("Y")
        fX = natural_filtration([X], prod_lab.space)
        fY = natural_filtration([Y], prod_lab.space)
        ones = RandomVariable.constant(4, 1)
        crossed = RandomVariable.of(["1/2", 2, "1/2", 2])
        with pytest.raises(NotADensityError):
            product_density_measure(prod_lab.space.measure, crossed, ones, fX, fY)


class TestProductLaw:
    def test_skewed_coins(self, load):
        lab = load("COIN2-SKEW")
        M, N = lab.process("M"), lab.process("N")
        law = product_law(
            lab.space,
            natural_filtration([M], lab.space),
            natural_filtration([N], lab.space),
        )
        assert law.weights == (Fr(1, 4),) * 4

    def test_unrealised_combination(self, bin_lab):
        F = bin_lab.filtration()
        assert product_law(bin_lab.space, F, F) is None


class TestMinimalMeasure:
    def test_doleans_measure_is_minimal(self, drift_lab):
        F = drift_lab.filtration()
        dec = doob_decomposition(drift_lab.process("X"), F, drift_lab.space.measure)
        Q = Measure.of(["1/3", "2/3"])
        assert minimal_mm_check(Q, dec.martingale_part, with_filtration(drift_lab.space, F))

    def test_changes_f0_mass(self, coin_lab):
        G = natural_filtration([coin_lab.process("M"), coin_lab.process("N")], coin_lab.space)
        space = build_space(
            coin_lab.space.outcomes,
            coin_lab.space.measure,
            [[[0, 1], [2, 3]], G[1]],
            1,
        )
        shifted = Measure.of(["1/8", "1/8", "3/8", "3/8"])
        assert not minimal_mm_check(shifted, coin_lab.process("N"), space)

    def test_requires_equivalence(self, drift_lab):
        with pytest.raises(NotEquivalentError):
            minimal_mm_check(
                Measure.of([1, 0]), drift_lab.process("X"), drift_lab.space
            )
