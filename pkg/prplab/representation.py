"""
Representation
--------------
Integral spans, completeness, representation solving, the orthogonal
triplet decomposition and inheritance of the predictable representation
property from a semimartingale to its martingale part.

Spans are computed over terminal values of stochastic integrals; the
measure-weighted inner product is used only where orthogonality is
claimed.
"""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .calculus import (
    Coordinate,
    are_independent,
    doleans_exponential,
    doob_decomposition,
    elementary_integrals,
    is_strongly_orthogonal,
    jump_condition,
    quadratic_covariation,
    structure_alpha,
)
from .exceptions import (
    DimensionMismatchError,
    HypothesisViolatedError,
    NotMartingaleError,
    StructureConditionFailsError,
)
from .measures import (
    measure_from_density,
    minimal_mm_check,
    product_density_measure,
    render,
    unique_emm,
)
from .models import (
    FiniteFilteredSpace,
    Integrand,
    Measure,
    Partition,
    Process,
    RandomVariable,
    RepresentationResult,
    SpanBasis,
    TheoremReport,
)
from .space import (
    Filtration,
    conditional_expectation,
    is_martingale,
    is_trivial,
    join,
    natural_filtration,
    restrict,
    with_filtration,
    with_measure,
)

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


def integral_span(
    integrators: Sequence[Process], filtration: Filtration, space: FiniteFilteredSpace
) -> SpanBasis:
    """
    Basis of the terminal values of stochastic integrals against ``integrators``.

    Generated by the elementary integrands (indicator of a block of F_{t-1})
    and reduced to an independent set by exact elimination.

    Raises:
        NotAdaptedError: If an integrator is not adapted
    """
    generators = elementary_integrals(integrators, filtration)
    if generators and generators[0][1].size != space.size:
        raise DimensionMismatchError("integrator rows", space.size, generators[0][1].size)
    kept = linalg.independent_columns([g.values for _, g in generators])
    basis = tuple(generators[i][1] for i in kept)
    logger.debug("integral span dimension %d from %d generators", len(basis), len(generators))
    return SpanBasis(basis_vectors=basis, dimension=len(basis))


def is_complete(
    integrators: Sequence[Process],
    filtration: Filtration,
    space: FiniteFilteredSpace,
    measure: Measure,
) -> bool:
    """
    True when constants plus the integral span fill L2(F_T) and F_0 is trivial.

    For a measure with null outcomes the question is decided on its support.
    """
    if not measure.is_equivalent():
        r = restrict(space, measure.support(), measure)
        return is_complete(
            [r.process(X) for X in integrators],
            r.filtration(filtration),
            r.space,
            r.space.measure,
        )
    if not is_trivial(filtration[0], measure):
        return False
    vectors = [(Fraction(1),) * space.size]
    vectors += [g.values for _, g in elementary_integrals(integrators, filtration)]
    return linalg.rank(vectors, space.size) == len(filtration[-1].blocks)


def represent(
    H: RandomVariable,
    integrators: Sequence[Process],
    filtration: Filtration,
    space: FiniteFilteredSpace,
    measure: Measure,
) -> RepresentationResult:
    """
    Represent H as constant + sum of stochastic integrals.

    Computes the measure-weighted projection of H onto constants plus the
    integral span. Among the coefficient vectors in elementary coordinates
    attaining it, the one of minimum Euclidean norm is returned; the
    residual vanishes exactly when H is representable.

    Args:
        H: Terminal random variable
        integrators: Integrator processes
        filtration: Working filtration (integrands are predictable for it)
        space: Underlying space
        measure: Measure defining the inner product

    Returns:
        RepresentationResult with constant, integrands and residual

    Raises:
        NotAdaptedError: If an integrator is not adapted
    """
    n = space.size
    if H.size != n:
        raise DimensionMismatchError("target", n, H.size)
    generators = elementary_integrals(integrators, filtration)
    columns = [(Fraction(1),) * n] + [g.values for _, g in generators]
    k = len(columns)
    w = measure.weights
    gram = [[linalg.weighted_dot(columns[a], columns[b], w) for b in range(k)] for a in range(k)]
    rhs = [linalg.weighted_dot(column, H.values, w) for column in columns]
    # minimum-norm solution of gram x = rhs lies in range(gram): x = gram y
    y = linalg.solve(linalg.matmul(gram, gram), rhs, k)
    assert y is not None
    x = linalg.matvec(gram, y)
    reconstruction = RandomVariable(
        values=tuple(sum((x[a] * columns[a][i] for a in range(k)), ZERO) for i in range(n))
    )
    coefficients: Dict[Coordinate, Fraction] = {
        coordinate: x[index + 1] for index, (coordinate, _) in enumerate(generators)
    }
    integrands = tuple(
        _integrand_from_coordinates(j, coefficients, filtration, n)
        for j in range(len(integrators))
    )
    unique = linalg.rank(gram, k) == k
    result = RepresentationResult(
        constant=x[0],
        integrands=integrands,
        reconstruction=reconstruction,
        residual=H - reconstruction,
        integrands_unique=unique,
        coordinates=tuple(x[1:]),
    )
    logger.debug("represent: exact=%s unique=%s", result.exact, unique)
    return result


def _integrand_from_coordinates(
    j: int, coefficients: Dict[Coordinate, Fraction], filtration: Filtration, n: int
) -> Integrand:
    columns = []
    for t in range(1, len(filtration)):
        column = [ZERO] * n
        for b, block in enumerate(filtration[t - 1].blocks):
            for i in block:
                column[i] = coefficients[(j, t, b)]
        columns.append(column)
    if not columns:
        return Integrand(values=((),) * n)
    return Integrand.from_columns(columns)


def martingale_from_terminal(
    H: RandomVariable, filtration: Filtration, measure: Measure
) -> Process:
    """Martingale Z_t = E[H | F_t]."""
    return Process.from_columns(
        [conditional_expectation(H, partition, measure).values for partition in filtration]
    )


# ============================================================================
# Theorem-level reports
# ============================================================================


def _joint(fa: Filtration, fb: Filtration) -> List[Partition]:
    return [join(a, b) for a, b in zip(fa, fb)]


def _indicators(partition: Partition) -> List[RandomVariable]:
    return [RandomVariable.indicator(partition.size, block) for block in partition.blocks]


def _orthogonal(u: SpanBasis, v: SpanBasis, measure: Measure) -> bool:
    return all(
        linalg.weighted_dot(a.values, b.values, measure.weights) == 0
        for a in u.basis_vectors
        for b in v.basis_vectors
    )


def _safe_orthogonal(U: Process, V: Process, filtration: Filtration, measure: Measure) -> bool:
    try:
        return is_strongly_orthogonal(U, V, filtration, measure)
    except NotMartingaleError:
        return False


def _require(hypotheses: Dict[str, bool]) -> None:
    for name, holds in hypotheses.items():
        if not holds:
            raise HypothesisViolatedError(name)


def _space_under(space: FiniteFilteredSpace, measure: Measure) -> FiniteFilteredSpace:
    return space if measure == space.measure else with_measure(space, measure)


def orthogonal_decomposition_report(
    M: Process, N: Process, space: FiniteFilteredSpace, measure: Measure
) -> TheoremReport:
    """
    Orthogonal decomposition of L2 of the joint filtration into the integral
    spans of M, N and [M, N].

    Hypotheses: M and N each have the base measure as unique martingale
    measure on their own natural filtration, and are strongly orthogonal
    under the joint filtration.

    Raises:
        HypothesisViolatedError: Naming the first hypothesis that fails
    """
    sp = _space_under(space, measure)
    fM = natural_filtration([M], sp)
    fN = natural_filtration([N], sp)
    G = _joint(fM, fN)
    hypotheses = {
        "M_unique_martingale_measure": unique_emm([M], fM, sp) == measure,
        "N_unique_martingale_measure": unique_emm([N], fN, sp) == measure,
        "strong_orthogonality": _safe_orthogonal(M, N, G, measure),
    }
    _require(hypotheses)

    QC = quadratic_covariation(M, N)
    spans = {
        "M": integral_span([M], G, sp),
        "N": integral_span([N], G, sp),
        "QC": integral_span([QC], G, sp),
    }
    blocks = len(G[-1].blocks)
    everything = [(Fraction(1),) * sp.size] + [
        v.values for span in spans.values() for v in span.basis_vectors
    ]
    total = sum(span.dimension for span in spans.values()) + 1
    conclusions = {
        "spans_pairwise_orthogonal": _orthogonal(spans["M"], spans["N"], measure)
        and _orthogonal(spans["M"], spans["QC"], measure)
        and _orthogonal(spans["N"], spans["QC"], measure),
        "direct_sum_is_everything": linalg.rank(everything, sp.size) == blocks
        and total == blocks,
        "covariation_orthogonal_to_M": _safe_orthogonal(QC, M, G, measure),
        "covariation_orthogonal_to_N": _safe_orthogonal(QC, N, G, measure),
    }
    dimensions = {name: span.dimension for name, span in spans.items()}
    dimensions.update({"constants": 1, "total": blocks})
    return TheoremReport(
        name="orthogonal decomposition",
        hypotheses=hypotheses,
        conclusions=conclusions,
        dimensions=dimensions,
    )


def _pair_hypotheses(
    X: Process, Y: Process, space: FiniteFilteredSpace, measure: Measure
) -> Tuple[Dict[str, bool], Dict[str, object]]:
    fX = natural_filtration([X], space)
    fY = natural_filtration([Y], space)
    G = _joint(fX, fY)
    hypotheses: Dict[str, bool] = {}
    context: Dict[str, object] = {"fX": fX, "fY": fY, "G": G}
    for name, Z, f in (("X", X, fX), ("Y", Y, fY)):
        emm = unique_emm([Z], f, space)
        hypotheses[f"{name}_unique_martingale_measure"] = emm is not None
        dec = doob_decomposition(Z, f, measure)
        try:
            data = structure_alpha(dec, f, measure)
            ok = data.satisfied and jump_condition(data.alpha, dec.martingale_part)
        except StructureConditionFailsError:
            ok = False
        hypotheses[f"{name}_jump_condition"] = ok
        context[f"emm_{name}"] = emm
        context[f"M_{name}"] = dec.martingale_part
    hypotheses["strong_orthogonality"] = _safe_orthogonal(
        context["M_X"], context["M_Y"], G, measure  # type: ignore[arg-type]
    )
    return hypotheses, context


def covariation_vanishing_report(
    X: Process, Y: Process, space: FiniteFilteredSpace, measure: Measure
) -> TheoremReport:
    """
    Check that [X, Y] vanishes identically exactly when the pair (X, Y) is
    complete for the joint natural filtration.

    Raises:
        HypothesisViolatedError: If the pair hypotheses fail
    """
    sp = _space_under(space, measure)
    hypotheses, context = _pair_hypotheses(X, Y, sp, measure)
    _require(hypotheses)
    G: List[Partition] = context["G"]  # type: ignore[assignment]
    vanishes = quadratic_covariation(X, Y).is_zero()
    complete = is_complete([X, Y], G, sp, measure)
    return TheoremReport(
        name="covariation vanishing",
        hypotheses=hypotheses,
        conclusions={"covariation_vanishes_iff_pair_complete": vanishes == complete},
        values={
            "covariation_vanishes": str(vanishes).lower(),
            "pair_complete": str(complete).lower(),
        },
    )


def prp_inheritance_report(X: Process, space: FiniteFilteredSpace) -> TheoremReport:
    """
    The martingale part of X inherits the representation property.

    Hypotheses: X has a unique equivalent martingale measure for its natural
    filtration and the jump condition holds for its structure alpha.

    Raises:
        HypothesisViolatedError: If a hypothesis fails
    """
    P = space.measure
    fX = natural_filtration([X], space)
    emm = unique_emm([X], fX, space)
    if emm is None:
        raise HypothesisViolatedError(
            "unique_martingale_measure", "the martingale measure for X is not unique"
        )
    dec = doob_decomposition(X, fX, P)
    try:
        data = structure_alpha(dec, fX, P)
    except StructureConditionFailsError as exc:
        raise HypothesisViolatedError("structure_condition", exc.message) from exc
    M = dec.martingale_part
    if not jump_condition(data.alpha, M):
        raise HypothesisViolatedError("jump_condition")
    L = doleans_exponential(data.alpha, M)
    minimal = measure_from_density(P, L.terminal())
    restricted = with_filtration(space, fX)
    conclusions = {
        "martingale_part_complete": is_complete([M], fX, space, P),
        "doleans_measure_is_unique_emm": minimal == emm,
        "doleans_measure_is_minimal": minimal_mm_check(minimal, M, restricted),
        "X_martingale_under_doleans_measure": is_martingale(X, fX, minimal),
    }
    span = integral_span([M], fX, space)
    return TheoremReport(
        name="representation inheritance",
        hypotheses={
            "unique_martingale_measure": True,
            "structure_condition": data.satisfied,
            "jump_condition": True,
        },
        conclusions=conclusions,
        dimensions={"M": span.dimension, "centered": len(fX[-1].blocks) - 1},
        values={"doleans_density": render(L.terminal().values), "measure": render(minimal.weights)},
    )


def triplet_representation_report(
    X: Process,
    Y: Process,
    space: FiniteFilteredSpace,
    measure: Measure,
    law: Optional[Measure] = None,
) -> TheoremReport:
    """
    Representation of the joint filtration by X, Y and [X, Y].

    With ``law`` given (the product law of the coordinates) every hypothesis
    and conclusion is evaluated under ``law``, and representability against
    (X, Y, [X, Y]) is additionally checked under ``measure``.

    Checks: the product-density measure Q = P L^X L^Y makes X and Y
    independent Q-martingales of the joint filtration; every indicator of a
    terminal block is represented against (X, Y, [X, Y]) under Q and against
    (M, N, [M, N]) under P.

    Raises:
        HypothesisViolatedError: If the pair hypotheses fail
    """
    base = law or measure
    sp = _space_under(space, base)
    hypotheses, context = _pair_hypotheses(X, Y, sp, base)
    _require(hypotheses)
    fX: List[Partition] = context["fX"]  # type: ignore[assignment]
    fY: List[Partition] = context["fY"]  # type: ignore[assignment]
    G: List[Partition] = context["G"]  # type: ignore[assignment]
    M: Process = context["M_X"]  # type: ignore[assignment]
    N: Process = context["M_Y"]  # type: ignore[assignment]
    emm_x: Measure = context["emm_X"]  # type: ignore[assignment]
    emm_y: Measure = context["emm_Y"]  # type: ignore[assignment]

    LX = emm_x.density(base)
    LY = emm_y.density(base)
    Q = product_density_measure(base, LX, LY, fX, fY)
    QC = quadratic_covariation(X, Y)
    QC_mn = quadratic_covariation(M, N)
    targets = _indicators(G[-1])

    xy = [represent(H, [X, Y, QC], G, sp, Q) for H in targets]
    mn = [represent(H, [M, N, QC_mn], G, sp, base) for H in targets]
    conclusions = {
        "Q_equivalent": Q.is_equivalent(),
        "X_Q_martingale": is_martingale(X, G, Q),
        "Y_Q_martingale": is_martingale(Y, G, Q),
        "independent_under_Q": are_independent(fX, fY, Q),
        "xy_triplet_represents_all": all(r.exact for r in xy),
        "mn_triplet_represents_all": all(r.exact for r in mn),
    }
    if law is not None:
        conclusions["representation_under_P"] = all(
            represent(H, [X, Y, QC], G, space, measure).exact for H in targets
        )
    dimensions = {
        "X": integral_span([X], G, sp).dimension,
        "Y": integral_span([Y], G, sp).dimension,
        "QC": integral_span([QC], G, sp).dimension,
        "constants": 1,
        "total": len(G[-1].blocks),
    }
    values = {
        "Q": render(Q.weights),
        "integrands_unique_xy": str(all(r.integrands_unique for r in xy)).lower(),
        "integrands_unique_mn": str(all(r.integrands_unique for r in mn)).lower(),
    }
    return TheoremReport(
        name="triplet representation",
        hypotheses=hypotheses,
        conclusions=conclusions,
        dimensions=dimensions,
        values=values,
    )
