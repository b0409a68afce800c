"""
Enlargement of Filtrations
--------------------------
Enlargement operators, the first time of strict inclusion, the immersion
equivalence and the witness certifying loss of the representation
property in an enlarged filtration.
"""

import logging
from typing import Hashable, List, Optional, Sequence

from . import linalg
from .calculus import elementary_integrals
from .exceptions import DimensionMismatchError, HypothesisViolatedError, NotAFiltrationError
from .measures import emm_set, find_equivalent_mm, render, unique_emm
from .models import (
    EnlargementReport,
    FiniteFilteredSpace,
    ImmersionReport,
    Measure,
    Partition,
    Process,
    RandomTime,
    RandomVariable,
    TheoremReport,
    WitnessReport,
)
from .representation import martingale_from_terminal, represent
from .space import (
    Filtration,
    conditional_expectation,
    is_filtration,
    is_martingale,
    is_measurable,
    is_trivial,
    join,
    meet,
    partition_from_labels,
    refines,
    restrict,
)

logger = logging.getLogger(__name__)

AFTER = "after"


def _check_lengths(F: Filtration, G: Filtration) -> None:
    if len(F) != len(G):
        raise DimensionMismatchError("filtration length", len(F), len(G))
    for a, b in zip(F, G):
        if a.size != b.size:
            raise DimensionMismatchError("partition size", a.size, b.size)


def _contains(F: Filtration, G: Filtration) -> bool:
    return all(refines(g, f) for f, g in zip(F, G))


def is_enlargement(F: Filtration, G: Filtration) -> bool:
    """True when G_t contains F_t for all t, strictly for some t."""
    _check_lengths(F, G)
    return _contains(F, G) and any(f != g for f, g in zip(F, G))


def enlarge_join(F: Filtration, F2: Filtration) -> List[Partition]:
    """Pointwise-in-time join of two filtrations."""
    _check_lengths(F, F2)
    return [join(a, b) for a, b in zip(F, F2)]


def progressive_enlargement(F: Filtration, tau: RandomTime) -> List[Partition]:
    """
    Progressive enlargement of F by a random time.

    G_t joins F_t with the events {tau = s} for s <= t, i.e. with the label
    ``tau`` if tau <= t and ``after`` otherwise.

    Raises:
        DimensionMismatchError: If tau has the wrong length or leaves the grid
    """
    horizon = len(F) - 1
    size = F[0].size
    if len(tau.values) != size:
        raise DimensionMismatchError("random time", size, len(tau.values))
    if any(v > horizon for v in tau.values):
        raise DimensionMismatchError("random time range", f"0..{horizon}", max(tau.values))
    return [
        join(F[t], partition_from_labels([v if v <= t else AFTER for v in tau.values]))
        for t in range(horizon + 1)
    ]


def initial_enlargement(F: Filtration, labels: Sequence[Hashable]) -> List[Partition]:
    """G_t = F_t joined with the partition generated by ``labels`` at every t."""
    extra = partition_from_labels(labels)
    return [join(f, extra) for f in F]


def first_strict_time(F: Filtration, G: Filtration) -> EnlargementReport:
    """
    First time u with F_u strictly contained in G_u.

    Also checks that inclusion stays strict on (u, T].

    Raises:
        DimensionMismatchError: If the filtrations have different shapes
    """
    _check_lengths(F, G)
    strict = tuple(t for t, (f, g) in enumerate(zip(F, G)) if refines(g, f) and f != g)
    u: Optional[int] = strict[0] if strict else None
    violations: tuple = ()
    if u is not None:
        violations = tuple(t for t in range(u + 1, len(F)) if t not in strict)
    return EnlargementReport(
        u=u,
        u_is_min=u is not None,
        strict_times=strict,
        g0_trivial=len(G[0].blocks) == 1,
        strict_after_u=not violations,
        violations=violations,
    )


def immersion_check(
    F: Filtration, G: Filtration, Q: Measure, space: FiniteFilteredSpace
) -> ImmersionReport:
    """
    Immersion of F in G under Q, evaluated from both sides.

    (i) every (Q, F)-martingale is a (Q, G)-martingale, tested on the
    martingales E^Q[1_B | F_t] for the blocks B of F_T;
    (ii) F_t = F_T meet G_t and E^Q[1_B | G_t] is F_T-measurable for every t.
    For a measure with null outcomes both sides are decided on its support.

    Raises:
        NotAFiltrationError: If F or G is not a filtration or G does not contain F
    """
    if not is_filtration(F):
        raise NotAFiltrationError("F", "partitions do not refine in time")
    if not is_filtration(G):
        raise NotAFiltrationError("G", "partitions do not refine in time")
    _check_lengths(F, G)
    if not _contains(F, G):
        raise NotAFiltrationError("G", "does not contain F")
    if not Q.is_equivalent():
        r = restrict(space, Q.support(), Q)
        inner = immersion_check(r.filtration(F), r.filtration(G), r.space.measure, r.space)
        return inner.model_copy(update={"name": "immersion"})

    terminal = F[-1]
    indicators = [RandomVariable.indicator(space.size, block) for block in terminal.blocks]
    condition_i = all(
        is_martingale(martingale_from_terminal(H, F, Q), G, Q) for H in indicators
    )
    condition_ii = all(meet(terminal, g) == f for f, g in zip(F, G)) and all(
        is_measurable(conditional_expectation(H, g, Q), terminal)
        for H in indicators
        for g in G
    )
    return ImmersionReport(
        name="immersion",
        conclusions={"conditions_equivalent": condition_i == condition_ii},
        condition_i=condition_i,
        condition_ii=condition_ii,
    )


def _not_measurable_block(G_u: Partition, F_u: Partition) -> Optional[tuple]:
    for block in G_u.blocks:
        if not is_measurable(RandomVariable.indicator(G_u.size, block), F_u):
            return block
    return None


def prp_loss_witness(
    X: Process, F: Filtration, G: Filtration, space: FiniteFilteredSpace
) -> WitnessReport:
    """
    Witness that X loses the representation property in G.

    With Q a martingale measure for X in G (the base measure when it is one),
    u the first strict inclusion time and A the first block of G_u that is
    not in F_u, L = 1_A - E^Q[1_A | F_u] is nonzero, Q-orthogonal to every
    G-predictable integral of X and not representable.

    Returns:
        WitnessReport; ``witness`` is None and ``failed_hypothesis`` names
        the first failed hypothesis when the hypotheses do not hold
    """
    P = space.measure
    _check_lengths(F, G)
    hypotheses = {"G_contains_F": _contains(F, G)}

    def absent(name: str) -> WitnessReport:
        logger.debug("no witness: hypothesis %s fails", name)
        return WitnessReport(name="prp loss", hypotheses=hypotheses, failed_hypothesis=name)

    if not hypotheses["G_contains_F"]:
        return absent("G_contains_F")
    hypotheses["G0_trivial"] = is_trivial(G[0], P)
    if not hypotheses["G0_trivial"]:
        return absent("G0_trivial")
    report = first_strict_time(F, G)
    hypotheses["u_exists"] = report.u is not None and report.u > 0
    if not hypotheses["u_exists"]:
        return absent("u_exists")
    u = report.u
    assert u is not None
    hypotheses["unique_martingale_measure_F"] = unique_emm([X], F, space) is not None
    if not hypotheses["unique_martingale_measure_F"]:
        return absent("unique_martingale_measure_F")
    quotient_g, poly_g = emm_set([X], G, space)
    projected_p = quotient_g.project_measure(P)
    if poly_g.contains(projected_p.weights):
        Q: Optional[Measure] = P
    else:
        found = find_equivalent_mm(poly_g)
        Q = quotient_g.lift_measure(found) if found is not None else None
    hypotheses["martingale_measure_G"] = Q is not None
    if Q is None:
        return absent("martingale_measure_G")

    block = _not_measurable_block(G[u], F[u])
    assert block is not None
    indicator = RandomVariable.indicator(space.size, block)
    L = indicator - conditional_expectation(indicator, F[u], Q)
    generators = [g.values for _, g in elementary_integrals([X], G)]
    terminal_blocks = len(G[-1].blocks)
    rank = linalg.rank([(1,) * space.size] + generators, space.size) if generators else 1
    codimension = terminal_blocks - rank
    result = represent(L, [X], G, space, Q)
    conclusions = {
        "witness_nonzero": not L.is_zero(),
        "conditional_mean_zero": conditional_expectation(L, F[u], Q).is_zero(),
        "orthogonal_to_integrals": all(
            linalg.weighted_dot(L.values, g, Q.weights) == 0 for g in generators
        ),
        "not_representable": not result.exact,
        "codimension_positive": codimension >= 1,
    }
    logger.debug("witness block %s at u=%d, codimension %d", block, u, codimension)
    return WitnessReport(
        name="prp loss",
        hypotheses=hypotheses,
        conclusions=conclusions,
        dimensions={"codimension": codimension, "span": rank - 1},
        values={"witness": render(L.values), "Q": render(Q.weights)},
        witness=L,
        block=tuple(block),
        u=u,
        codimension=codimension,
    )


def void_emm_check(
    X: Process, F: Filtration, G: Filtration, space: FiniteFilteredSpace
) -> TheoremReport:
    """
    With a unique martingale measure for F, a strict enlargement G with
    G_T = F_T admits no equivalent martingale measure for X.

    Raises:
        HypothesisViolatedError: If a hypothesis fails
    """
    hypotheses = {
        "unique_martingale_measure_F": unique_emm([X], F, space) is not None,
        "strict_enlargement": is_enlargement(F, G),
        "same_terminal_information": F[-1] == G[-1],
    }
    for name, holds in hypotheses.items():
        if not holds:
            raise HypothesisViolatedError(name)
    _, poly = emm_set([X], G, space)
    return TheoremReport(
        name="void martingale measures",
        hypotheses=hypotheses,
        conclusions={"no_equivalent_martingale_measure": find_equivalent_mm(poly) is None},
    )
