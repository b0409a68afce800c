"""Tests for partitions, spaces, conditional expectations and measurability."""

from fractions import Fraction as Fr

import pytest

from prplab.exceptions import (
    DimensionMismatchError,
    FiltrationNotRefiningError,
    NonPositiveProbabilityError,
    PartitionInvalidError,
    ProbabilitySumNotOneError,
)
from prplab.models import Integrand, Measure, Partition, Process, RandomVariable
from prplab.space import (
    build_space,
    conditional_expectation,
    describe_partition,
    discrete_partition,
    is_adapted,
    is_filtration,
    is_martingale,
    is_measurable,
    is_predictable,
    is_trivial,
    join,
    meet,
    natural_filtration,
    partition_from_labels,
    quotient,
    refines,
    restrict,
    trivial_partition,
    with_measure,
)

TWO_STEP = [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]]


class TestPartition:
    """Canonical form and validation of partitions."""

    def test_canonical_order(self):
        p = Partition(blocks=[[3, 1], [2, 0]])
        assert p.blocks == ((0, 2), (1, 3))

    def test_labels_and_block_of(self):
        p = Partition(blocks=[[0, 2], [1]])
        assert p.labels() == (0, 1, 0)
        assert p.block_of(2) == (0, 2)

    @pytest.mark.parametrize(
        "blocks",
        [
            [[0], [0, 1]],
            [[0], [2]],
            [[0, 1], []],
            [[-1, 0]],
        ],
    )
    def test_invalid(self, blocks):
        with pytest.raises(PartitionInvalidError):
            Partition(blocks=blocks)

    def test_from_labels(self):
        assert partition_from_labels(["a", "b", "a"]).blocks == ((0, 2), (1,))

    def test_join_and_meet(self):
        a = Partition(blocks=[[0, 1], [2, 3]])
        b = Partition(blocks=[[0, 2], [1, 3]])
        assert join(a, b) == discrete_partition(4)
        assert meet(a, b) == trivial_partition(4)
        assert meet(a, discrete_partition(4)) == a

    def test_meet_chains_blocks(self):
        a = Partition(blocks=[[0, 1], [2], [3]])
        b = Partition(blocks=[[0], [1, 2], [3]])
        assert meet(a, b).blocks == ((0, 1, 2), (3,))

    def test_join_size_mismatch(self):
        with pytest.raises(PartitionInvalidError):
            join(trivial_partition(2), trivial_partition(3))

    def test_refines(self):
        assert refines(discrete_partition(3), trivial_partition(3))
        assert not refines(trivial_partition(3), discrete_partition(3))

    def test_is_filtration(self):
        parts = [Partition(blocks=b) for b in TWO_STEP]
        assert is_filtration(parts)
        assert not is_filtration(list(reversed(parts)))
        assert not is_filtration([])

    def test_trivial_under_measure(self):
        split = discrete_partition(2)
        assert not is_trivial(split, Measure.of(["1/2", "1/2"]))
        assert is_trivial(split, Measure.of([1, 0]))


class TestBuildSpace:
    """Validation performed by build_space."""

    def test_valid(self):
        space = build_space(["a", "b", "c", "d"], ["1/4"] * 4, TWO_STEP, 2)
        assert space.size == 4
        assert space.terminal == discrete_partition(4)
        assert list(space.times) == [0, 1, 2]

    def test_zero_probability(self):
        with pytest.raises(NonPositiveProbabilityError):
            build_space(["a", "b"], ["1", "0"], [[[0, 1]]], 0)

    def test_sum_not_one(self):
        with pytest.raises(ProbabilitySumNotOneError):
            build_space(["a", "b"], ["1/2", "1/3"], [[[0, 1]]], 0)

    def test_not_refining(self):
        with pytest.raises(FiltrationNotRefiningError):
            build_space(["a", "b"], ["1/2", "1/2"], [[[0], [1]], [[0, 1]]], 1)

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            build_space(["a", "b"], ["1/2", "1/2"], [[[0, 1]]], 1)

    def test_partition_of_wrong_size(self):
        with pytest.raises(PartitionInvalidError):
            build_space(["a", "b"], ["1/2", "1/2"], [[[0, 1]], [[0], [1], [2]]], 1)

    def test_with_measure(self, bin_lab):
        other = with_measure(bin_lab.space, Measure.of(["1/3", "2/3"]))
        assert other.filtration == bin_lab.space.filtration
        assert other.measure.weights == (Fr(1, 3), Fr(2, 3))


class TestConditionalExpectation:
    VALUES = RandomVariable.of([1, 2, 3, 4])
    PAIRS = Partition(blocks=[[0, 1], [2, 3]])

    def test_uniform(self):
        result = conditional_expectation(self.VALUES, self.PAIRS, Measure.of(["1/4"] * 4))
        assert result.values == (Fr(3, 2), Fr(3, 2), Fr(7, 2), Fr(7, 2))

    def test_weighted(self):
        measure = Measure.of(["1/8", "3/8", "3/8", "1/8"])
        result = conditional_expectation(self.VALUES, self.PAIRS, measure)
        assert result.values == (Fr(7, 4), Fr(7, 4), Fr(13, 4), Fr(13, 4))

    def test_null_block_gives_zero(self):
        result = conditional_expectation(self.VALUES, self.PAIRS, Measure.of(["1/2", "1/2", 0, 0]))
        assert result.values[2:] == (0, 0)

    def test_size_mismatch(self):
        with pytest.raises(PartitionInvalidError):
            conditional_expectation(self.VALUES, trivial_partition(3), Measure.of(["1/4"] * 4))


class TestMeasurability:
    def test_is_measurable(self):
        p = Partition(blocks=[[0, 1], [2]])
        assert is_measurable(RandomVariable.of([5, 5, 1]), p)
        assert not is_measurable(RandomVariable.of([5, 4, 1]), p)
        assert is_measurable(RandomVariable.of([5, 4, 1]), p, support=[0, 2])

    def test_adapted_and_predictable(self, bin_lab):
        F = bin_lab.filtration()
        X = bin_lab.process("X")
        assert is_adapted(X, F)
        assert is_predictable(Integrand.of([[3], [3]]), F)
        assert not is_predictable(Integrand.of([[1], [2]]), F)
        assert not is_adapted(X, [trivial_partition(2)] * 2)

    def test_martingale_depends_on_measure(self, bin_lab):
        F = bin_lab.filtration()
        X = bin_lab.process("X")
        assert not is_martingale(X, F, bin_lab.space.measure)
        assert is_martingale(X, F, Measure.of(["1/3", "2/3"]))

    def test_natural_filtration(self, tau_lab):
        F = natural_filtration([tau_lab.process("X")], tau_lab.space)
        assert F[0] == trivial_partition(8)
        assert F[1].blocks == ((0, 1, 2, 3), (4, 5, 6, 7))
        assert F[2].blocks == ((0, 1), (2, 3), (4, 5), (6, 7))
        assert F == list(tau_lab.space.filtration)

    def test_natural_filtration_dimension_check(self, tau_lab):
        with pytest.raises(DimensionMismatchError):
            natural_filtration([Process.of([[0, 1], [0, 1]])], tau_lab.space)


class TestQuotientAndRestriction:
    def test_quotient_of_tau(self, tau_lab):
        q = quotient(tau_lab.space, tau_lab.filtration())
        assert q.space.size == 4
        assert q.space.measure.weights == (Fr(1, 4),) * 4
        assert q.space.terminal == discrete_partition(4)
        assert q.space.outcomes[0] == "uu1+uu2"

    def test_lift_measure_spreads_by_base_weights(self, tau_lab):
        q = quotient(tau_lab.space, tau_lab.filtration())
        lifted = q.lift_measure(Measure.of([1, 0, 0, 0]))
        assert lifted.weights == (Fr(1, 2), Fr(1, 2)) + (Fr(0),) * 6

    def test_project_and_lift_variable(self, tau_lab):
        q = quotient(tau_lab.space, tau_lab.filtration())
        terminal = tau_lab.process("X").terminal()
        projected = q.project_variable(terminal)
        assert projected.values == (2, 0, 0, -2)
        assert q.lift_variable(projected) == terminal

    def test_restrict(self, bin_lab):
        r = restrict(bin_lab.space, [1])
        assert r.space.size == 1
        assert r.space.measure.weights == (1,)
        assert r.process(bin_lab.process("X")).values == ((1, Fr(1, 2)),)

    def test_restrict_with_measure(self, tau_lab):
        measure = Measure.of(["1/4", "1/4", "1/2", 0, 0, 0, 0, 0])
        r = restrict(tau_lab.space, measure.support(), measure)
        assert r.support == (0, 1, 2)
        assert r.space.measure.weights == (Fr(1, 4), Fr(1, 4), Fr(1, 2))

    def test_describe_partition(self, bin_lab):
        assert describe_partition(bin_lab.filtration()[1], bin_lab.space) == "{up} {down}"
