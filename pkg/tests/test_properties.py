"""Seeded randomized checks of identities that hold on every finite space."""

import random
from collections import defaultdict
from fractions import Fraction as Fr
from itertools import product as paths_of_length

import pytest

from prplab import linalg
from prplab.calculus import (
    are_independent,
    check_yoeurp,
    doob_decomposition,
    elementary_integrals,
    is_process_predictable,
    is_strongly_orthogonal,
    lagged,
    predictable_qv,
    product,
    quadratic_covariation,
    stochastic_integral,
)
from prplab.enlargement import (
    first_strict_time,
    immersion_check,
    initial_enlargement,
    is_enlargement,
    progressive_enlargement,
    prp_loss_witness,
    void_emm_check,
)
from prplab.exceptions import HypothesisViolatedError, NoEMMError
from prplab.measures import first_ftap_check, second_ftap_report, unique_emm
from prplab.models import Integrand, Process, RandomTime, RandomVariable
from prplab.representation import represent
from prplab.space import build_space, is_martingale, natural_filtration, partition_from_labels

SEEDS = range(200)


def random_space(rng, max_outcomes=10, max_horizon=3):
    n = rng.randint(2, max_outcomes)
    horizon = rng.randint(1, max_horizon)
    split_f0 = rng.random() < 0.2
    paths = [
        [rng.randint(0, 1) if split_f0 else 0] + [rng.randint(0, 2) for _ in range(horizon)]
        for _ in range(n)
    ]
    filtration = [
        partition_from_labels([tuple(path[: t + 1]) for path in paths])
        for t in range(horizon + 1)
    ]
    raw = [rng.randint(1, 6) for _ in range(n)]
    weights = [Fr(w, sum(raw)) for w in raw]
    return build_space([f"w{i}" for i in range(n)], weights, filtration, horizon)


def _value(rng):
    return Fr(rng.randint(-6, 6), rng.randint(1, 3))


def _columns(rng, partitions, size):
    columns = []
    for partition in partitions:
        column = [Fr(0)] * size
        for block in partition.blocks:
            value = _value(rng)
            for i in block:
                column[i] = value
        columns.append(column)
    return columns


def random_adapted(rng, space):
    return Process.from_columns(_columns(rng, space.filtration, space.size))


def random_predictable(rng, space):
    return Integrand.from_columns(_columns(rng, space.filtration[:-1], space.size))


def _start(X):
    return Process.from_columns([X.at(0).values] * (X.horizon + 1))


class TestCalculusIdentities:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_doob_decomposition(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F, P = list(space.filtration), space.measure
        X = random_adapted(rng, space)
        dec = doob_decomposition(X, F, P)
        assert _start(X) + dec.martingale_part + dec.drift_part == X
        assert is_martingale(dec.martingale_part, F, P)
        assert is_process_predictable(dec.drift_part, F)
        assert doob_decomposition(dec.martingale_part, F, P).drift_part.is_zero()

    @pytest.mark.parametrize("seed", SEEDS)
    def test_martingale_transform(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F, P = list(space.filtration), space.measure
        M = doob_decomposition(random_adapted(rng, space), F, P).martingale_part
        integral = stochastic_integral(random_predictable(rng, space), M, F)
        assert is_martingale(integral, F, P)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_integration_by_parts(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        U, V = random_adapted(rng, space), random_adapted(rng, space)
        lhs = (
            stochastic_integral(lagged(U), V)
            + stochastic_integral(lagged(V), U)
            + quadratic_covariation(U, V)
        )
        assert lhs == product(U, V) - _start(U * V)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_square_minus_bracket(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F, P = list(space.filtration), space.measure
        dec = doob_decomposition(random_adapted(rng, space), F, P)
        M = dec.martingale_part
        assert is_martingale(M * M - predictable_qv(M, F, P), F, P)
        assert check_yoeurp(M, dec.drift_part, F, P)


class TestImmersionEquivalence:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_progressive(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F = list(space.filtration)
        tau = RandomTime.of([rng.randint(0, space.horizon) for _ in range(space.size)])
        G = progressive_enlargement(F, tau)
        report = immersion_check(F, G, space.measure, space)
        assert report.conclusions["conditions_equivalent"]

    @pytest.mark.parametrize("seed", SEEDS)
    def test_initial(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F = list(space.filtration)
        G = initial_enlargement(F, [rng.randint(0, 2) for _ in range(space.size)])
        report = immersion_check(F, G, space.measure, space)
        assert report.conclusions["conditions_equivalent"]


class TestRepresentation:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_residual_orthogonal_to_span(self, seed):
        rng = random.Random(seed)
        space = random_space(rng, max_outcomes=8)
        F, P = list(space.filtration), space.measure
        X = random_adapted(rng, space)
        H = RandomVariable.of([_value(rng) for _ in range(space.size)])
        result = represent(H, [X], F, space, P)
        assert result.reconstruction + result.residual == H
        generators = [(Fr(1),) * space.size] + [g.values for _, g in elementary_integrals([X], F)]
        for g in generators:
            assert linalg.weighted_dot(result.residual.values, g, P.weights) == 0


class TestMartingaleMeasures:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_fundamental_theorem_checklist(self, seed):
        rng = random.Random(seed)
        space = random_space(rng, max_outcomes=12, max_horizon=4)
        F = list(space.filtration)
        X = doob_decomposition(random_adapted(rng, space), F, space.measure).martingale_part
        report = second_ftap_report(X, F, space)
        assert report.passed, report.conclusions
        assert report.conclusions["vertices_mutually_non_dominated"]

    @pytest.mark.parametrize("seed", SEEDS)
    def test_processes_with_drift(self, seed):
        rng = random.Random(seed)
        space = random_space(rng, max_outcomes=12, max_horizon=4)
        F = list(space.filtration)
        X = random_adapted(rng, space)
        first = first_ftap_check([X], F, space)
        assert first.passed
        if first.values["no_arbitrage"] == "true":
            report = second_ftap_report(X, F, space)
            assert report.passed, report.conclusions
        else:
            with pytest.raises(NoEMMError):
                second_ftap_report(X, F, space)

    def test_drift_cases_include_arbitrage(self):
        verdicts = set()
        for seed in SEEDS:
            rng = random.Random(seed)
            space = random_space(rng, max_outcomes=12, max_horizon=4)
            F = list(space.filtration)
            verdicts.add(first_ftap_check([random_adapted(rng, space)], F, space).values["no_arbitrage"])
        assert verdicts == {"true", "false"}


def _prefix_filtration(paths, horizon):
    return [partition_from_labels([path[:t] for path in paths]) for t in range(horizon + 1)]


def _binary_martingale(rng, paths, weights, horizon):
    """Martingale on a binary tree of paths with a nonzero increment at every node."""
    mass = defaultdict(Fr)
    for path, weight in zip(paths, weights):
        for t in range(horizon + 1):
            mass[path[:t]] += weight
    columns = [[Fr(0)] * len(paths)]
    for t in range(1, horizon + 1):
        step = {}
        for prefix in {path[: t - 1] for path in paths}:
            k = Fr(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
            step[prefix + (0,)] = k * mass[prefix + (1,)]
            step[prefix + (1,)] = -k * mass[prefix + (0,)]
        columns.append([columns[-1][i] + step[path[:t]] for i, path in enumerate(paths)])
    return Process.from_columns(columns)


def _weights(rng, n):
    raw = [rng.randint(1, 6) for _ in range(n)]
    return [Fr(w, sum(raw)) for w in raw]


def marked_tree(rng):
    """
    Two-step binary tree where every path carries a hidden mark.

    F sees the path only; tau is 1 on mark 0 and 2 on mark 1, so the
    progressive enlargement learns the mark at time 1.
    """
    horizon = 2
    marks = rng.randint(2, 3)
    base = list(paths_of_length((0, 1), repeat=horizon))
    paths = [path for path in base for _ in range(marks)]
    mark_of = [mark for _ in base for mark in range(marks)]
    weights = _weights(rng, len(paths))
    F = _prefix_filtration(paths, horizon)
    space = build_space([f"w{i}" for i in range(len(paths))], weights, F, horizon)
    X = _binary_martingale(rng, paths, weights, horizon)
    tau_by_mark = [1, 2] + [rng.randint(1, 2) for _ in range(marks - 2)]
    tau = RandomTime.of([tau_by_mark[mark] for mark in mark_of])
    return space, X, progressive_enlargement(F, tau)


WITNESS_HYPOTHESES = [
    "G_contains_F",
    "G0_trivial",
    "u_exists",
    "unique_martingale_measure_F",
    "martingale_measure_G",
]


class TestEnlargementWitness:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_progressive(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F = list(space.filtration)
        X = doob_decomposition(random_adapted(rng, space), F, space.measure).martingale_part
        tau = RandomTime.of([rng.randint(0, space.horizon) for _ in range(space.size)])
        G = progressive_enlargement(F, tau)
        report = prp_loss_witness(X, F, G, space)
        if report.witness is None:
            assert report.failed_hypothesis in WITNESS_HYPOTHESES
            assert not report.hypotheses[report.failed_hypothesis]
        else:
            assert report.passed, report.conclusions
            assert first_strict_time(F, G).strict_after_u

    @pytest.mark.parametrize("seed", SEEDS)
    def test_initial_enlargement_has_no_witness(self, seed):
        rng = random.Random(seed)
        space = random_space(rng)
        F = list(space.filtration)
        X = doob_decomposition(random_adapted(rng, space), F, space.measure).martingale_part
        G = initial_enlargement(F, [rng.randint(0, 2) for _ in range(space.size)])
        report = prp_loss_witness(X, F, G, space)
        assert report.witness is None
        assert report.failed_hypothesis in ("G0_trivial", "u_exists")

    @pytest.mark.parametrize("seed", SEEDS)
    def test_marked_tree(self, seed):
        rng = random.Random(seed)
        space, X, G = marked_tree(rng)
        F = list(space.filtration)
        report = prp_loss_witness(X, F, G, space)
        assert report.witness is not None, report.failed_hypothesis
        assert report.u == 1
        assert report.passed, report.conclusions
        assert report.codimension >= 1
        Q = [Fr(v) for v in report.values["Q"].split()]
        assert linalg.weighted_dot(report.witness.values, (Fr(1),) * space.size, Q) == 0
        assert first_strict_time(F, G).strict_after_u


class TestVoidMartingaleMeasures:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_same_terminal_information(self, seed):
        rng = random.Random(seed)
        horizon = rng.randint(2, 3)
        paths = list(paths_of_length((0, 1), repeat=horizon))
        weights = _weights(rng, len(paths))
        F = _prefix_filtration(paths, horizon)
        space = build_space([f"w{i}" for i in range(len(paths))], weights, F, horizon)
        X = _binary_martingale(rng, paths, weights, horizon)
        tau = RandomTime.of([rng.randint(1, horizon) for _ in paths])
        G = progressive_enlargement(F, tau)
        assert G[-1] == F[-1]
        if is_enlargement(F, G):
            report = void_emm_check(X, F, G, space)
            assert report.passed, report.conclusions
        else:
            with pytest.raises(HypothesisViolatedError):
                void_emm_check(X, F, G, space)


def _two_coins(rng, product_law):
    if product_law:
        a, b = Fr(rng.randint(1, 5), 6), Fr(rng.randint(1, 5), 6)
        weights = [a * b, a * (1 - b), (1 - a) * b, (1 - a) * (1 - b)]
    else:
        raw = [rng.randint(1, 6) for _ in range(4)]
        weights = [Fr(w, sum(raw)) for w in raw]
    space = build_space(
        ["uu", "ud", "du", "dd"], weights, [[[0, 1, 2, 3]], [[0], [1], [2], [3]]], 1
    )
    p_m = weights[0] + weights[1]
    p_n = weights[0] + weights[2]
    M = Process.of([[0, 1 - p_m], [0, 1 - p_m], [0, -p_m], [0, -p_m]])
    N = Process.of([[0, 1 - p_n], [0, -p_n], [0, 1 - p_n], [0, -p_n]])
    return space, M, N


class TestTwoCoins:
    @pytest.mark.parametrize("seed", range(60))
    def test_orthogonal_iff_independent(self, seed):
        rng = random.Random(seed)
        space, M, N = _two_coins(rng, product_law=seed % 2 == 0)
        P = space.measure
        fM = natural_filtration([M], space)
        fN = natural_filtration([N], space)
        G = natural_filtration([M, N], space)
        assert is_strongly_orthogonal(M, N, G, P) == are_independent(fM, fN, P)
        if seed % 2 == 0:
            assert are_independent(fM, fN, P)
        assert unique_emm([M], fM, space) == P
        assert unique_emm([N], fN, space) == P
