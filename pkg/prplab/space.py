"""
Finite Filtered Spaces
----------------------
Construction and interrogation of finite filtered probability spaces:
partitions, conditional expectations, adaptedness and predictability.

Outcomes are the indices ``0..n-1``; a filtration is a sequence of
partitions, one per time ``0..T``, each refining the previous one.
"""

import logging
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict

from .exceptions import (
    DimensionMismatchError,
    FiltrationNotRefiningError,
    NonPositiveProbabilityError,
    PartitionInvalidError,
    ProbabilitySumNotOneError,
)
from .models import (
    FiniteFilteredSpace,
    Integrand,
    Measure,
    Partition,
    Process,
    RandomVariable,
    Rational,
    to_fraction,
)

logger = logging.getLogger(__name__)

Filtration = Sequence[Partition]
PartitionLike = Union[Partition, Sequence[Sequence[int]]]


# ============================================================================
# Partitions
# ============================================================================


def as_partition(value: PartitionLike) -> Partition:
    if isinstance(value, Partition):
        return value
    return Partition(blocks=tuple(tuple(block) for block in value))


def trivial_partition(n: int) -> Partition:
    """Single-block partition of ``n`` outcomes."""
    return Partition(blocks=(tuple(range(n)),) if n else ())


def discrete_partition(n: int) -> Partition:
    """Partition of ``n`` outcomes into singletons."""
    return Partition(blocks=tuple((i,) for i in range(n)))


def partition_from_labels(labels: Sequence[Hashable]) -> Partition:
    """Group outcome indices sharing a label."""
    groups: Dict[Hashable, List[int]] = {}
    for index, label in enumerate(labels):
        groups.setdefault(label, []).append(index)
    return Partition(blocks=tuple(tuple(group) for group in groups.values()))


def join(a: Partition, b: Partition) -> Partition:
    """
    Coarsest partition refining both ``a`` and ``b``.

    Args:
        a: First partition
        b: Second partition

    Returns:
        Partition of nonempty blockwise intersections

    Raises:
        PartitionInvalidError: If the partitions cover different outcome sets
    """
    if a.size != b.size:
        raise PartitionInvalidError(
            f"cannot join partitions of {a.size} and {b.size} outcomes"
        )
    la, lb = a.labels(), b.labels()
    return partition_from_labels(list(zip(la, lb)))


def meet(a: Partition, b: Partition) -> Partition:
    """
    Finest partition coarser than both ``a`` and ``b``.

    Corresponds to the intersection of the generated sigma-algebras: blocks
    are the connected components of the "shares a block in a or b" relation.
    """
    if a.size != b.size:
        raise PartitionInvalidError(
            f"cannot meet partitions of {a.size} and {b.size} outcomes"
        )
    parent = list(range(a.size))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for partition in (a, b):
        for block in partition.blocks:
            root = find(block[0])
            for index in block[1:]:
                other = find(index)
                if other != root:
                    parent[other] = root
    return partition_from_labels([find(i) for i in range(a.size)])


def refines(fine: Partition, coarse: Partition) -> bool:
    """True when every block of ``fine`` lies inside a block of ``coarse``."""
    if fine.size != coarse.size:
        return False
    labels = coarse.labels()
    return all(len({labels[i] for i in block}) == 1 for block in fine.blocks)


def is_filtration(partitions: Filtration) -> bool:
    """True when the partitions share one outcome set and refine weakly in time."""
    if not partitions:
        return False
    size = partitions[0].size
    if any(p.size != size for p in partitions):
        return False
    return all(refines(partitions[t], partitions[t - 1]) for t in range(1, len(partitions)))


def is_trivial(partition: Partition, measure: Measure) -> bool:
    """
    True when exactly one block carries positive mass.

    For a full-support measure this means the partition has a single block;
    for a measure with null outcomes the null blocks are disregarded.
    """
    charged = [block for block in partition.blocks if measure.mass(block) > 0]
    return len(charged) == 1


# ============================================================================
# Spaces
# ============================================================================


def build_space(
    outcomes: Sequence[str],
    measure: Union[Measure, Sequence[Rational]],
    filtration: Sequence[PartitionLike],
    horizon: int,
) -> FiniteFilteredSpace:
    """
    Build and validate a finite filtered probability space.

    Args:
        outcomes: Outcome labels
        measure: Probability per outcome (Measure or rationals)
        filtration: One partition per time 0..horizon
        horizon: Time horizon T

    Returns:
        Validated FiniteFilteredSpace

    Raises:
        NonPositiveProbabilityError: If an outcome has probability <= 0
        ProbabilitySumNotOneError: If probabilities do not sum to 1
        PartitionInvalidError: If a partition does not cover the outcomes
        FiltrationNotRefiningError: If a partition does not refine its predecessor
        DimensionMismatchError: If lengths are inconsistent

    Example:
        >>> space = build_space(["up", "down"], ["1/2", "1/2"],
        ...                     [[[0, 1]], [[0], [1]]], horizon=1)
        >>> len(space.filtration)
        2
    """
    weights = measure.weights if isinstance(measure, Measure) else tuple(
        to_fraction(p) for p in measure
    )
    n = len(outcomes)
    if len(weights) != n:
        raise DimensionMismatchError("probabilities", n, len(weights))
    for label, weight in zip(outcomes, weights):
        if weight <= 0:
            raise NonPositiveProbabilityError(label, weight)
    total = sum(weights, Fraction(0))
    if total != 1:
        raise ProbabilitySumNotOneError(total)
    if len(filtration) != horizon + 1:
        raise DimensionMismatchError("filtration length", horizon + 1, len(filtration))
    partitions = tuple(as_partition(p) for p in filtration)
    for t, partition in enumerate(partitions):
        if partition.size != n:
            raise PartitionInvalidError(
                f"partition at time {t} covers {partition.size} outcomes, not {n}"
            )
    for t in range(1, len(partitions)):
        if not refines(partitions[t], partitions[t - 1]):
            raise FiltrationNotRefiningError(t)
    return FiniteFilteredSpace(
        outcomes=tuple(outcomes),
        measure=Measure(weights=weights),
        horizon=horizon,
        filtration=partitions,
    )


def with_filtration(space: FiniteFilteredSpace, filtration: Filtration) -> FiniteFilteredSpace:
    """Same outcomes and measure, another filtration."""
    return build_space(space.outcomes, space.measure, filtration, space.horizon)


def with_measure(space: FiniteFilteredSpace, measure: Measure) -> FiniteFilteredSpace:
    """Same outcomes and filtration, another full-support measure."""
    return build_space(space.outcomes, measure, space.filtration, space.horizon)


def _check_process(p: Union[Process, Integrand], size: int, columns: int, what: str) -> None:
    if p.size != size:
        raise DimensionMismatchError(f"{what} rows", size, p.size)
    width = len(p.values[0]) if p.values else 0
    if width != columns:
        raise DimensionMismatchError(f"{what} columns", columns, width)


def natural_filtration(processes: Sequence[Process], space: FiniteFilteredSpace) -> List[Partition]:
    """
    Natural filtration of a family of processes.

    The partition at time t groups outcomes whose trajectories of every
    process agree on [0, t].

    Raises:
        DimensionMismatchError: If a process is not defined on the space's grid
    """
    for p in processes:
        _check_process(p, space.size, space.horizon + 1, "process")
    result = []
    for t in space.times:
        labels = [
            tuple(p.values[i][: t + 1] for p in processes) for i in range(space.size)
        ]
        result.append(partition_from_labels(labels))
    return result


def conditional_expectation(
    rv: RandomVariable, partition: Partition, measure: Measure
) -> RandomVariable:
    """
    E[rv | partition] under ``measure``.

    The result is constant on each block and equals the measure-weighted
    average there; blocks of zero mass get the value 0.

    Raises:
        PartitionInvalidError: If the partition and the variable disagree in size
    """
    if partition.size != rv.size or measure.size != rv.size:
        raise PartitionInvalidError(
            f"partition covers {partition.size} outcomes, variable has {rv.size}"
        )
    out = [Fraction(0)] * rv.size
    for block in partition.blocks:
        mass = measure.mass(block)
        if mass == 0:
            continue
        average = sum((measure.weights[i] * rv.values[i] for i in block), Fraction(0)) / mass
        for i in block:
            out[i] = average
    return RandomVariable(values=tuple(out))


def is_measurable(
    values: Union[RandomVariable, Sequence[Fraction]],
    partition: Partition,
    support: Optional[Sequence[int]] = None,
) -> bool:
    """
    True when ``values`` is constant on every block of ``partition``.

    Args:
        values: Random variable or raw values
        partition: Partition to test against
        support: If given, only outcomes in the support are compared
    """
    vals = values.values if isinstance(values, RandomVariable) else tuple(values)
    allowed = set(range(len(vals))) if support is None else set(support)
    for block in partition.blocks:
        seen = {vals[i] for i in block if i in allowed}
        if len(seen) > 1:
            return False
    return True


def _check_filtration(filtration: Filtration, size: int, columns: int) -> None:
    if len(filtration) != columns:
        raise DimensionMismatchError("filtration length", columns, len(filtration))
    for partition in filtration:
        if partition.size != size:
            raise DimensionMismatchError("partition size", size, partition.size)


def first_unadapted_time(p: Process, filtration: Filtration) -> Optional[int]:
    """First t whose column is not measurable at t, or None when ``p`` is adapted."""
    _check_filtration(filtration, p.size, p.horizon + 1)
    for t in range(p.horizon + 1):
        if not is_measurable(p.at(t), filtration[t]):
            return t
    return None


def first_unpredictable_time(xi: Integrand, filtration: Filtration) -> Optional[int]:
    """First t >= 1 whose column is not measurable at t-1, or None."""
    _check_filtration(filtration, xi.size, xi.horizon + 1)
    for t in range(1, xi.horizon + 1):
        if not is_measurable(xi.at(t), filtration[t - 1]):
            return t
    return None


def is_adapted(p: Process, filtration: Filtration) -> bool:
    """True when column t is measurable with respect to the partition at t."""
    return first_unadapted_time(p, filtration) is None


def is_predictable(xi: Integrand, filtration: Filtration) -> bool:
    """True when column t (t >= 1) is measurable with respect to the partition at t-1."""
    return first_unpredictable_time(xi, filtration) is None


def is_martingale(p: Process, filtration: Filtration, measure: Measure) -> bool:
    """
    True when ``p`` is adapted and E[p_t - p_{t-1} | F_{t-1}] = 0 for every t.
    """
    if not is_adapted(p, filtration):
        return False
    for t in range(1, p.horizon + 1):
        drift = conditional_expectation(p.increment(t), filtration[t - 1], measure)
        if not drift.is_zero():
            return False
    return True


# ============================================================================
# Quotients and restrictions
# ============================================================================


class Quotient(BaseModel):
    """
    Space whose outcomes are the blocks of a terminal partition.

    Sets of measures on (Omega, F_T) are computed on the quotient; a quotient
    measure is lifted back by spreading block mass proportionally to P.

    Attributes:
        base: Original space
        space: Quotient space
        blocks: Outcome block of the base space for each quotient outcome
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: FiniteFilteredSpace
    space: FiniteFilteredSpace
    blocks: Tuple[Tuple[int, ...], ...]

    def project_variable(self, rv: RandomVariable) -> RandomVariable:
        """Value of an F_T-measurable variable on each block."""
        return RandomVariable(values=tuple(rv.values[block[0]] for block in self.blocks))

    def project_process(self, p: Process) -> Process:
        return Process(values=tuple(p.values[block[0]] for block in self.blocks))

    def project_filtration(self, filtration: Filtration) -> List[Partition]:
        """Trace of coarser base partitions on the quotient outcomes."""
        return [
            partition_from_labels([p.labels()[block[0]] for block in self.blocks])
            for p in filtration
        ]

    def project_measure(self, measure: Measure) -> Measure:
        return Measure(weights=tuple(measure.mass(block) for block in self.blocks))

    def lift_variable(self, rv: RandomVariable) -> RandomVariable:
        out = [Fraction(0)] * self.base.size
        for value, block in zip(rv.values, self.blocks):
            for i in block:
                out[i] = value
        return RandomVariable(values=tuple(out))

    def lift_measure(self, measure: Measure) -> Measure:
        out = [Fraction(0)] * self.base.size
        p = self.base.measure
        for mass, block in zip(measure.weights, self.blocks):
            block_mass = p.mass(block)
            for i in block:
                out[i] = mass * p.weights[i] / block_mass
        return Measure(weights=tuple(out))


def quotient(space: FiniteFilteredSpace, filtration: Filtration) -> Quotient:
    """
    Quotient of ``space`` by the terminal partition of ``filtration``.

    The quotient carries the block masses of P and the filtration induced by
    ``filtration``.

    Raises:
        FiltrationNotRefiningError: If ``filtration`` is not a filtration
        DimensionMismatchError: If its length does not match the horizon
    """
    _check_filtration(filtration, space.size, space.horizon + 1)
    for t in range(1, len(filtration)):
        if not refines(filtration[t], filtration[t - 1]):
            raise FiltrationNotRefiningError(t)
    blocks = filtration[-1].blocks
    outcomes = ["+".join(space.outcomes[i] for i in block) for block in blocks]
    weights = tuple(space.measure.mass(block) for block in blocks)
    induced = [
        partition_from_labels([p.labels()[block[0]] for block in blocks]) for p in filtration
    ]
    reduced = build_space(outcomes, weights, induced, space.horizon)
    logger.debug("quotient of %d outcomes onto %d blocks", space.size, len(blocks))
    return Quotient(base=space, space=reduced, blocks=blocks)


class Restriction(BaseModel):
    """
    Sub-space on a subset of outcomes with the conditioned measure.

    Attributes:
        base: Original space
        space: Restricted space
        support: Base outcome index of each restricted outcome
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: FiniteFilteredSpace
    space: FiniteFilteredSpace
    support: Tuple[int, ...]

    def variable(self, rv: RandomVariable) -> RandomVariable:
        return RandomVariable(values=tuple(rv.values[i] for i in self.support))

    def process(self, p: Process) -> Process:
        return Process(values=tuple(p.values[i] for i in self.support))

    def filtration(self, filtration: Filtration) -> List[Partition]:
        return [
            partition_from_labels([p.labels()[i] for i in self.support]) for p in filtration
        ]


def restrict(
    space: FiniteFilteredSpace,
    support: Sequence[int],
    measure: Optional[Measure] = None,
) -> Restriction:
    """
    Restrict ``space`` to the outcomes in ``support``.

    Args:
        space: Base space
        support: Outcome indices to keep (each must carry positive mass)
        measure: Measure to condition (defaults to the space's measure)

    Returns:
        Restriction with the conditioned measure and the traced filtration
    """
    base_measure = measure or space.measure
    kept = tuple(sorted(set(support)))
    mass = base_measure.mass(kept)
    weights = [base_measure.weights[i] / mass for i in kept]
    traced = [partition_from_labels([p.labels()[i] for i in kept]) for p in space.filtration]
    reduced = build_space([space.outcomes[i] for i in kept], weights, traced, space.horizon)
    return Restriction(base=space, space=reduced, support=kept)


def describe_partition(partition: Partition, space: FiniteFilteredSpace) -> str:
    """Human-readable ``{a,b} {c}`` rendering using outcome labels."""
    return " ".join(
        "{" + ",".join(space.outcomes[i] for i in block) + "}" for block in partition.blocks
    )