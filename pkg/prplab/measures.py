"""
Martingale Measures
-------------------
Martingale-measure sets as polytopes: existence, equivalence, uniqueness,
extremal points, mutual singularity, the minimal martingale measure,
product densities and the fundamental-theorem reports.

"Equivalent to P" means strictly positive weights, since the base measure
charges every outcome. An empty set of equivalent martingale measures is a
value (``None``), not an error.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from . import linalg
from .calculus import are_independent, elementary_integrals
from .exceptions import (
    DimensionMismatchError,
    FiltrationsNotIndependentError,
    InfeasibleSystemError,
    NoEMMError,
    NotADensityError,
    NotAdaptedError,
    NotEquivalentError,
    NotInPolytopeError,
)
from .models import (
    FiniteFilteredSpace,
    FtapReport,
    Measure,
    MeasurePolytope,
    MeasureVerdict,
    Process,
    RandomVariable,
    TheoremReport,
    format_rational,
)
from .simplex import maximize
from .space import (
    Filtration,
    Quotient,
    conditional_expectation,
    first_unadapted_time,
    is_martingale,
    is_measurable,
    is_trivial,
    quotient,
)

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


def render(weights: Sequence[Fraction]) -> str:
    return " ".join(format_rational(w) for w in weights)


def martingale_polytope(
    processes: Sequence[Process], filtration: Filtration, space: FiniteFilteredSpace
) -> MeasurePolytope:
    """
    Constraint system whose solutions are the martingale measures.

    One row per (time t, block B of F_{t-1}, process X):
    sum over B of q_w dX_t(w) = 0, followed by the normalisation row.

    Args:
        processes: Processes required to be martingales
        filtration: Working filtration
        space: Underlying space

    Returns:
        MeasurePolytope (feasibility is not decided here)

    Raises:
        NotAdaptedError: If a process is not adapted
    """
    n = space.size
    for k, X in enumerate(processes):
        if X.size != n:
            raise DimensionMismatchError("process rows", n, X.size)
        t = first_unadapted_time(X, filtration)
        if t is not None:
            raise NotAdaptedError(f"process {k}", t)
    rows: List[Tuple[Fraction, ...]] = []
    for _, generator in elementary_integrals(processes, filtration):
        if not generator.is_zero():
            rows.append(generator.values)
    rows.append((ONE,) * n)
    rhs = (ZERO,) * (len(rows) - 1) + (ONE,)
    logger.debug("martingale polytope: %d constraints on %d outcomes", len(rows), n)
    return MeasurePolytope(constraint_matrix=tuple(rows), rhs=rhs, outcome_count=n)


def find_equivalent_mm(poly: MeasurePolytope) -> Optional[Measure]:
    """
    A strictly positive solution of the polytope, or None.

    Each coordinate is maximised in turn with the exact simplex; if some
    coordinate cannot be made positive no equivalent measure exists.
    Otherwise the average of the distinct optimal vertices is strictly
    positive and is returned.
    """
    A, b, n = poly.constraint_matrix, poly.rhs, poly.outcome_count
    optima: List[Tuple[Fraction, ...]] = []
    for i in range(n):
        objective = [ONE if j == i else ZERO for j in range(n)]
        result = maximize(A, b, objective)
        if result.status != "optimal":
            logger.debug("martingale system is infeasible")
            return None
        if result.value == 0:
            logger.debug("outcome %d is null under every martingale measure", i)
            return None
        if result.x not in optima:
            optima.append(result.x)
    count = len(optima)
    weights = tuple(sum(column, ZERO) / count for column in zip(*optima))
    return Measure(weights=weights)


def is_unique_emm(poly: MeasurePolytope) -> bool:
    """
    True when the polytope is a single strictly positive point.

    A positive-dimensional solution set meeting the open orthant contains
    infinitely many equivalent measures, so uniqueness needs full rank.
    """
    A, n = poly.constraint_matrix, poly.outcome_count
    if linalg.rank(A, n) != n:
        return False
    solution = linalg.solve(A, poly.rhs, n)
    return solution is not None and all(v > 0 for v in solution)


def extremal_points(poly: MeasurePolytope) -> List[Measure]:
    """
    All vertices of {A q = b, q >= 0}.

    Supports are searched depth-first over linearly independent column sets;
    a set whose columns already reach b is not extended, since any larger
    independent set reproduces the same solution padded with zeros.

    Returns:
        Vertices ordered by support size, then lexicographic support

    Raises:
        InfeasibleSystemError: If the polytope is empty
    """
    A, b, n = poly.constraint_matrix, poly.rhs, poly.outcome_count
    found: List[Tuple[Tuple[int, ...], List[Fraction]]] = []

    def columns(support: Sequence[int]) -> List[List[Fraction]]:
        return [[row[k] for k in support] for row in A]

    def extend(chosen: List[int], start: int) -> None:
        for j in range(start, n):
            candidate = chosen + [j]
            sub = columns(candidate)
            if linalg.rank(sub, len(candidate)) < len(candidate):
                continue
            solution = linalg.solve(sub, b, len(candidate))
            if solution is not None:
                if all(v > 0 for v in solution):
                    found.append((tuple(candidate), solution))
                continue
            extend(candidate, j + 1)

    extend([], 0)
    if not found:
        raise InfeasibleSystemError()
    found.sort(key=lambda item: (len(item[0]), item[0]))
    vertices = []
    for support, solution in found:
        weights = [ZERO] * n
        for k, value in zip(support, solution):
            weights[k] = value
        vertices.append(Measure(weights=tuple(weights)))
    logger.debug("enumerated %d vertices", len(vertices))
    return vertices


def is_extremal(q: Measure, poly: MeasurePolytope) -> bool:
    """
    True when ``q`` is a vertex of the polytope.

    Raises:
        NotInPolytopeError: If ``q`` does not solve the constraints
    """
    if not poly.contains(q.weights):
        raise NotInPolytopeError("constraint residual is nonzero")
    support = q.support()
    sub = [[row[k] for k in support] for row in poly.constraint_matrix]
    return linalg.rank(sub, len(support)) == len(support)


def pairwise_singular(measures: Sequence[Measure]) -> bool:
    """True when every pair of measures has disjoint supports."""
    supports = [set(m.support()) for m in measures]
    return all(not (a & b) for a, b in combinations(supports, 2))


def mutually_non_dominated(measures: Sequence[Measure]) -> bool:
    """
    True when no measure is absolutely continuous with respect to another.

    On a finite space this means no support contains another one. Distinct
    vertices of a martingale-measure polytope always satisfy it, while
    disjointness of supports can fail once a vertex has several up or down
    moves to choose from.
    """
    supports = [set(m.support()) for m in measures]
    return all(not (a <= b or b <= a) for a, b in combinations(supports, 2))


def minimal_mm_check(q: Measure, M: Process, space: FiniteFilteredSpace) -> bool:
    """
    Decide whether ``q`` is a minimal martingale measure for ``M``.

    ``q`` must agree with P on F_0 and every P-martingale null at 0 that is
    strongly orthogonal to M must remain a martingale under ``q``. The
    orthogonal martingales are spanned by the terminal values v solving
    E_P[v 1_B dM_t] = 0 for all blocks B of F_{t-1}, and E_P[v 1_B] = 0 on
    the blocks of F_0.

    Raises:
        NotEquivalentError: If ``q`` charges some outcome with zero weight
    """
    n = space.size
    P = space.measure
    F = space.filtration
    if q.size != n:
        raise DimensionMismatchError("measure", n, q.size)
    if not q.is_equivalent():
        raise NotEquivalentError("some outcome has zero weight")
    for block in F[0].blocks:
        if q.mass(block) != P.mass(block):
            return False
    generators = [g.values for _, g in elementary_integrals([M], F)]
    generators += [RandomVariable.indicator(n, block).values for block in F[0].blocks]
    rows = [[P.weights[i] * g[i] for i in range(n)] for g in generators]
    basis = linalg.nullspace(rows, n)
    logger.debug("orthogonal martingale space has dimension %d", len(basis))
    for vector in basis:
        terminal = RandomVariable(values=tuple(vector))
        columns = [conditional_expectation(terminal, F[t], P).values for t in space.times]
        if not is_martingale(Process.from_columns(columns), F, q):
            return False
    return True


def measure_from_density(base: Measure, L: RandomVariable) -> Measure:
    """
    Measure with density ``L`` with respect to ``base``.

    Raises:
        NotADensityError: If L is not strictly positive or E_base[L] != 1
    """
    if L.size != base.size:
        raise DimensionMismatchError("density", base.size, L.size)
    if any(v <= 0 for v in L.values):
        raise NotADensityError("density is not strictly positive")
    mean = base.expectation(L)
    if mean != 1:
        raise NotADensityError(f"density has mean {mean}")
    return Measure(weights=tuple(p * v for p, v in zip(base.weights, L.values)))


def product_density_measure(
    P: Measure,
    LX: RandomVariable,
    LY: RandomVariable,
    fx: Filtration,
    fy: Filtration,
) -> Measure:
    """
    Measure Q with dQ/dP = LX * LY.

    Args:
        P: Base measure
        LX: Density measurable for the terminal partition of ``fx``
        LY: Density measurable for the terminal partition of ``fy``
        fx: First filtration
        fy: Second filtration, independent of ``fx`` under P

    Raises:
        NotADensityError: If a factor is not a density or not measurable
        FiltrationsNotIndependentError: If fx and fy are dependent under P
    """
    measure_from_density(P, LX)
    measure_from_density(P, LY)
    if not is_measurable(LX, fx[-1]):
        raise NotADensityError("first factor is not measurable for its filtration")
    if not is_measurable(LY, fy[-1]):
        raise NotADensityError("second factor is not measurable for its filtration")
    if not are_independent(fx, fy, P):
        raise FiltrationsNotIndependentError()
    return Measure(
        weights=tuple(p * x * y for p, x, y in zip(P.weights, LX.values, LY.values))
    )


def product_law(
    space: FiniteFilteredSpace, fa: Filtration, fb: Filtration
) -> Optional[Measure]:
    """
    Product of the marginal laws of two filtrations, spread over the outcomes.

    Each nonempty intersection of terminal blocks A and B receives P(A) P(B),
    divided among its outcomes proportionally to P.

    Returns:
        The product law, or None when it charges a combination of blocks
        that no outcome realises (the law is then not equivalent to P)
    """
    P = space.measure
    weights = [ZERO] * space.size
    for a in fa[-1].blocks:
        members = set(a)
        for b in fb[-1].blocks:
            target = P.mass(a) * P.mass(b)
            joint = [i for i in b if i in members]
            if not joint:
                if target > 0:
                    return None
                continue
            joint_mass = P.mass(joint)
            for i in joint:
                weights[i] = target * P.weights[i] / joint_mass
    return Measure(weights=tuple(weights))


def no_arbitrage_check(
    processes: Sequence[Process], filtration: Filtration, measure: Measure
) -> bool:
    """
    True when no nonzero nonnegative terminal integral exists.

    Solves: maximise sum y subject to y = sum_k (c+_k - c-_k) g_k on the
    support of ``measure``, sum y + s = 1, all variables nonnegative, where
    g_k are the elementary integrals. The optimum is 0 exactly when the
    integral span meets the nonnegative cone only at zero.
    """
    generators = [g.values for _, g in elementary_integrals(processes, filtration)]
    support = measure.support()
    k, s = len(generators), len(support)
    width = 2 * k + s + 1
    rows = []
    for position, outcome in enumerate(support):
        row = [ZERO] * width
        for index, g in enumerate(generators):
            row[index] = -g[outcome]
            row[k + index] = g[outcome]
        row[2 * k + position] = ONE
        rows.append(row)
    rows.append([ZERO] * (2 * k) + [ONE] * s + [ONE])
    rhs = [ZERO] * s + [ONE]
    objective = [ZERO] * (2 * k) + [ONE] * s + [ZERO]
    result = maximize(rows, rhs, objective)
    return result.status == "optimal" and result.value == 0


def emm_set(
    processes: Sequence[Process], filtration: Filtration, space: FiniteFilteredSpace
) -> Tuple[Quotient, MeasurePolytope]:
    """
    Martingale-measure polytope for measures on (Omega, F_T).

    The polytope is built on the quotient of ``space`` by the terminal
    partition of ``filtration``.
    """
    for k, X in enumerate(processes):
        t = first_unadapted_time(X, filtration)
        if t is not None:
            raise NotAdaptedError(f"process {k}", t)
    q = quotient(space, filtration)
    projected = [q.project_process(X) for X in processes]
    return q, martingale_polytope(projected, q.space.filtration, q.space)


def unique_emm(
    processes: Sequence[Process], filtration: Filtration, space: FiniteFilteredSpace
) -> Optional[Measure]:
    """
    The unique equivalent martingale measure on F_T, lifted to the outcomes.

    Returns:
        The lifted measure, or None when the set is empty or not a singleton
    """
    q, poly = emm_set(processes, filtration, space)
    if not is_unique_emm(poly):
        return None
    point = linalg.solve(poly.constraint_matrix, poly.rhs, poly.outcome_count)
    assert point is not None
    return q.lift_measure(Measure(weights=tuple(point)))


def first_ftap_check(
    processes: Sequence[Process], filtration: Filtration, space: FiniteFilteredSpace
) -> TheoremReport:
    """No-arbitrage holds exactly when an equivalent martingale measure exists."""
    no_arbitrage = no_arbitrage_check(processes, filtration, space.measure)
    emm = find_equivalent_mm(martingale_polytope(processes, filtration, space))
    values = {"no_arbitrage": str(no_arbitrage).lower()}
    if emm is not None:
        values["emm"] = render(emm.weights)
    return TheoremReport(
        name="first fundamental theorem",
        conclusions={"no_arbitrage_iff_emm_exists": no_arbitrage == (emm is not None)},
        values=values,
    )


def _midpoints(vertices: Sequence[Measure]) -> List[Measure]:
    return [
        Measure(weights=tuple((x + y) / 2 for x, y in zip(a.weights, b.weights)))
        for a, b in combinations(vertices, 2)
    ]


def second_ftap_report(
    X: Union[Process, Sequence[Process]], filtration: Filtration, space: FiniteFilteredSpace
) -> FtapReport:
    """
    Uniqueness, completeness and extremality report.

    Evaluates on the quotient by F_T: (a) uniqueness of the equivalent
    martingale measure, (b) completeness, (c) for the found measure, every
    vertex and every midpoint of two vertices, extremality against
    "F_0 trivial under Q and PRP under Q". PRP under a non-equivalent Q is
    decided on the support of Q.

    Raises:
        NoEMMError: If no equivalent martingale measure exists
    """
    from .representation import is_complete

    processes = [X] if isinstance(X, Process) else list(X)
    q, poly = emm_set(processes, filtration, space)
    reduced = q.space
    projected = [q.project_process(p) for p in processes]
    emm = find_equivalent_mm(poly)
    if emm is None:
        raise NoEMMError()
    unique = is_unique_emm(poly)
    complete = is_complete(projected, reduced.filtration, reduced, reduced.measure)
    vertices = extremal_points(poly)

    family: List[Measure] = []
    for candidate in [emm, *vertices, *_midpoints(vertices)]:
        if candidate not in family:
            family.append(candidate)
    verdicts = []
    for measure in family:
        verdicts.append(
            MeasureVerdict(
                weights=measure.weights,
                extremal=is_extremal(measure, poly),
                f0_trivial=is_trivial(reduced.filtration[0], measure),
                prp=is_complete(projected, reduced.filtration, reduced, measure),
            )
        )
    equivalent_vertices = [v for v in vertices if v.is_equivalent()]
    conclusions = {
        "unique_iff_complete": unique == complete,
        "extremal_iff_trivial_f0_and_prp": all(v.consistent for v in verdicts),
        "at_most_one_equivalent_vertex": len(equivalent_vertices) <= 1,
        "equivalent_vertex_iff_unique": (len(equivalent_vertices) == 1) == unique,
        "vertices_mutually_non_dominated": mutually_non_dominated(vertices),
    }
    values = {
        "emm": render(q.lift_measure(emm).weights),
        "supports_disjoint": str(pairwise_singular(vertices)).lower(),
    }
    for index, vertex in enumerate(vertices):
        values[f"vertex_{index}"] = render(q.lift_measure(vertex).weights)
    logger.debug("ftap: unique=%s complete=%s vertices=%d", unique, complete, len(vertices))
    return FtapReport(
        name="second fundamental theorem",
        hypotheses={"emm_exists": True},
        conclusions=conclusions,
        dimensions={"vertices": len(vertices), "outcomes": reduced.size},
        values=values,
        unique=unique,
        complete=complete,
        measures=tuple(verdicts),
    )
