"""Tests for Doob decomposition, integrals, covariations and the structure condition."""

from fractions import Fraction as Fr

import pytest

from prplab.calculus import (
    are_independent,
    check_yoeurp,
    doleans_exponential,
    doob_decomposition,
    elementary_integrals,
    is_process_predictable,
    is_strongly_orthogonal,
    jump_condition,
    lagged,
    predictable_qv,
    product,
    quadratic_covariation,
    stochastic_integral,
    structure_alpha,
)
from prplab.exceptions import (
    DimensionMismatchError,
    JumpConditionViolatedError,
    NotAdaptedError,
    NotMartingaleError,
    NotPredictableError,
    StructureConditionFailsError,
)
from prplab.models import Integrand, Measure, Process
from prplab.space import is_martingale, natural_filtration, trivial_partition


class TestDoobDecomposition:
    """Drifted one-step tree: P = (2/3, 1/3), X = 1 -> 2 or 1/2."""

    def test_parts(self, drift_lab):
        dec = doob_decomposition(drift_lab.process("X"), drift_lab.filtration(), drift_lab.space.measure)
        assert dec.initial.values == (1, 1)
        assert dec.drift_part.at(1).values == (Fr(1, 2), Fr(1, 2))
        assert dec.martingale_part.at(1).values == (Fr(1, 2), Fr(-1))

    def test_reconstructs(self, drift_lab):
        X = drift_lab.process("X")
        F = drift_lab.filtration()
        dec = doob_decomposition(X, F, drift_lab.space.measure)
        start = Process.from_columns([dec.initial.values] * 2)
        assert start + dec.martingale_part + dec.drift_part == X
        assert is_martingale(dec.martingale_part, F, drift_lab.space.measure)
        assert is_process_predictable(dec.drift_part, F)

    def test_total_variation(self, drift_lab):
        dec = doob_decomposition(drift_lab.process("X"), drift_lab.filtration(), drift_lab.space.measure)
        assert dec.total_variation().terminal().values == (Fr(1, 2), Fr(1, 2))

    def test_martingale_has_no_drift(self, bin_lab):
        dec = doob_decomposition(bin_lab.process("X"), bin_lab.filtration(), Measure.of(["1/3", "2/3"]))
        assert dec.drift_part.is_zero()

    def test_not_adapted(self, drift_lab):
        with pytest.raises(NotAdaptedError) as info:
            doob_decomposition(
                drift_lab.process("X"), [trivial_partition(2)] * 2, drift_lab.space.measure
            )
        assert info.value.context["time"] == 1
        assert "at time 1" in info.value.message


class TestIntegrals:
    def test_constant_integrand(self, bin_lab):
        result = stochastic_integral(Integrand.constant(2, 1, 2), bin_lab.process("X"), bin_lab.filtration())
        assert result.terminal().values == (2, -1)
        assert result.at(0).is_zero()

    def test_not_predictable(self, bin_lab):
        with pytest.raises(NotPredictableError) as info:
            stochastic_integral(Integrand.of([[1], [2]]), bin_lab.process("X"), bin_lab.filtration())
        assert info.value.context["time"] == 1

    def test_grid_mismatch(self, bin_lab):
        with pytest.raises(DimensionMismatchError):
            stochastic_integral(Integrand.constant(3, 1), bin_lab.process("X"))

    def test_quadratic_variation(self, bin_lab):
        X = bin_lab.process("X")
        assert quadratic_covariation(X, X).terminal().values == (1, Fr(1, 4))

    def test_covariation_of_coins(self, coin_lab):
        qc = quadratic_covariation(coin_lab.process("M"), coin_lab.process("N"))
        assert qc.terminal().values == (1, -1, -1, 1)

    def test_integration_by_parts(self, tau_lab):
        U = tau_lab.process("X")
        V = U * U
        lhs = (
            stochastic_integral(lagged(U), V)
            + stochastic_integral(lagged(V), U)
            + quadratic_covariation(U, V)
        )
        start = Process.from_columns([(U.at(0) * V.at(0)).values] * 3)
        assert lhs == product(U, V) - start

    def test_elementary_integrals(self, coin_lab):
        F = natural_filtration([coin_lab.process("M"), coin_lab.process("N")], coin_lab.space)
        generators = elementary_integrals([coin_lab.process("M"), coin_lab.process("N")], F)
        assert [coordinate for coordinate, _ in generators] == [(0, 1, 0), (1, 1, 0)]
        assert generators[0][1].values == (1, 1, -1, -1)


class TestStructure:
    def test_predictable_qv_and_alpha(self, drift_lab):
        F = drift_lab.filtration()
        P = drift_lab.space.measure
        dec = doob_decomposition(drift_lab.process("X"), F, P)
        assert predictable_qv(dec.martingale_part, F, P).at(1).values == (Fr(1, 2), Fr(1, 2))
        data = structure_alpha(dec, F, P)
        assert data.satisfied
        assert data.alpha.at(1).values == (1, 1)
        assert jump_condition(data.alpha, dec.martingale_part)

    def test_predictable_qv_requires_martingale(self, drift_lab):
        with pytest.raises(NotMartingaleError):
            predictable_qv(drift_lab.process("X"), drift_lab.filtration(), drift_lab.space.measure)

    def test_structure_condition_fails_for_deterministic_drift(self, bin_lab):
        X = Process.of([[0, 1], [0, 1]])
        F = bin_lab.filtration()
        dec = doob_decomposition(X, F, bin_lab.space.measure)
        with pytest.raises(StructureConditionFailsError):
            structure_alpha(dec, F, bin_lab.space.measure)

    def test_doleans_exponential(self, drift_lab):
        F = drift_lab.filtration()
        P = drift_lab.space.measure
        dec = doob_decomposition(drift_lab.process("X"), F, P)
        data = structure_alpha(dec, F, P)
        L = doleans_exponential(data.alpha, dec.martingale_part)
        assert L.at(0).values == (1, 1)
        assert L.terminal().values == (Fr(1, 2), 2)
        assert P.expectation(L.terminal()) == 1

    def test_jump_condition_violated(self, drift_lab):
        dec = doob_decomposition(drift_lab.process("X"), drift_lab.filtration(), drift_lab.space.measure)
        alpha = Integrand.constant(2, 1, 2)
        assert not jump_condition(alpha, dec.martingale_part)
        with pytest.raises(JumpConditionViolatedError):
            doleans_exponential(alpha, dec.martingale_part)


class TestOrthogonality:
    """Two coins: orthogonal and independent under P, neither under Q."""

    def _setup(self, coin_lab):
        M, N = coin_lab.process("M"), coin_lab.process("N")
        fM = natural_filtration([M], coin_lab.space)
        fN = natural_filtration([N], coin_lab.space)
        G = natural_filtration([M, N], coin_lab.space)
        return M, N, fM, fN, G

    def test_under_base_measure(self, coin_lab):
        M, N, fM, fN, G = self._setup(coin_lab)
        P = coin_lab.space.measure
        assert is_strongly_orthogonal(M, N, G, P)
        assert are_independent(fM, fN, P)

    def test_under_q(self, coin_lab):
        M, N, fM, fN, G = self._setup(coin_lab)
        Q = coin_lab.measure("Q")
        assert is_martingale(M, G, Q) and is_martingale(N, G, Q)
        assert Q.expectation(M.terminal() * N.terminal()) == Fr(-1, 2)
        assert not is_strongly_orthogonal(M, N, G, Q)
        assert not are_independent(fM, fN, Q)

    def test_requires_martingales(self, drift_lab):
        X = drift_lab.process("X")
        with pytest.raises(NotMartingaleError):
            is_strongly_orthogonal(X, X, drift_lab.filtration(), drift_lab.space.measure)


class TestYoeurp:
    def test_covariation_with_drift_is_martingale(self, drift_lab):
        F = drift_lab.filtration()
        P = drift_lab.space.measure
        dec = doob_decomposition(drift_lab.process("X"), F, P)
        M, A = dec.martingale_part, dec.drift_part
        assert quadratic_covariation(M, A).terminal().values == (Fr(1, 4), Fr(-1, 2))
        assert check_yoeurp(M, A, F, P)

    def test_rejects_unpredictable(self, drift_lab):
        F = drift_lab.filtration()
        P = drift_lab.space.measure
        dec = doob_decomposition(drift_lab.process("X"), F, P)
        with pytest.raises(NotPredictableError) as info:
            check_yoeurp(dec.martingale_part, dec.martingale_part, F, P)
        assert info.value.context == {"name": "A", "time": 1}
