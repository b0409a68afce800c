"""
Discrete Stochastic Calculus
----------------------------
Doob decomposition, stochastic integrals, quadratic (co)variation,
compensators, the structure condition, the Doleans exponential and
orthogonality / independence tests on a finite time grid.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exceptions import (
    DimensionMismatchError,
    JumpConditionViolatedError,
    NotAdaptedError,
    NotMartingaleError,
    NotPredictableError,
    StructureConditionFailsError,
)
from .models import Decomposition, Integrand, Measure, Process, RandomVariable, StructureData
from .space import (
    Filtration,
    conditional_expectation,
    first_unadapted_time,
    first_unpredictable_time,
    is_martingale,
    is_measurable,
)

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


def _same_grid(x: Process, y: Process, what: str = "process") -> None:
    if (x.size, x.horizon) != (y.size, y.horizon):
        raise DimensionMismatchError(what, (x.size, x.horizon), (y.size, y.horizon))


def _cumulative(size: int, steps: List[RandomVariable]) -> Process:
    columns = [[ZERO] * size]
    for step in steps:
        columns.append([a + b for a, b in zip(columns[-1], step.values)])
    return Process.from_columns(columns)


def doob_decomposition(X: Process, filtration: Filtration, measure: Measure) -> Decomposition:
    """
    Canonical decomposition X = X_0 + M + A.

    The drift increments are dA_t = E[dX_t | F_{t-1}] blockwise and
    M = X - X_0 - A.

    Args:
        X: Adapted process
        filtration: Working filtration
        measure: Reference measure

    Returns:
        Decomposition with M a martingale and A predictable, both null at 0

    Raises:
        NotAdaptedError: If X is not adapted to the filtration

    Example:
        >>> X = Process.of([[1, 2], [1, "1/2"]])
        >>> dec = doob_decomposition(X, [trivial_partition(2), discrete_partition(2)],
        ...                          Measure.of(["2/3", "1/3"]))
        >>> dec.drift_part.at(1).values
        (Fraction(1, 2), Fraction(1, 2))
    """
    t = first_unadapted_time(X, filtration)
    if t is not None:
        raise NotAdaptedError("X", t)
    steps = [
        conditional_expectation(X.increment(t), filtration[t - 1], measure)
        for t in range(1, X.horizon + 1)
    ]
    A = _cumulative(X.size, steps)
    initial = X.at(0)
    start = Process.from_columns([initial.values] * (X.horizon + 1))
    M = X - start - A
    return Decomposition(initial=initial, martingale_part=M, drift_part=A)


def stochastic_integral(
    xi: Integrand, X: Process, filtration: Optional[Filtration] = None
) -> Process:
    """
    Discrete stochastic integral (xi . X)_t = sum_{s<=t} xi_s (X_s - X_{s-1}).

    Args:
        xi: Integrand, column t used over (t-1, t]
        X: Integrator
        filtration: If given, predictability of xi is enforced

    Raises:
        NotPredictableError: If xi is not predictable for ``filtration``
        DimensionMismatchError: If xi and X live on different grids
    """
    if (xi.size, xi.horizon) != (X.size, X.horizon):
        raise DimensionMismatchError("integrand", (X.size, X.horizon), (xi.size, xi.horizon))
    if filtration is not None:
        t = first_unpredictable_time(xi, filtration)
        if t is not None:
            raise NotPredictableError("xi", t)
    steps = [xi.at(t) * X.increment(t) for t in range(1, X.horizon + 1)]
    return _cumulative(X.size, steps)


def quadratic_covariation(X: Process, Y: Process) -> Process:
    """[X, Y]_t = sum_{s<=t} dX_s dY_s; there is no continuous part on a grid."""
    _same_grid(X, Y)
    steps = [X.increment(t) * Y.increment(t) for t in range(1, X.horizon + 1)]
    return _cumulative(X.size, steps)


def predictable_qv(M: Process, filtration: Filtration, measure: Measure) -> Process:
    """
    Predictable quadratic variation <M> with d<M>_t = E[(dM_t)^2 | F_{t-1}].

    Raises:
        NotMartingaleError: If M is not a martingale
    """
    if not is_martingale(M, filtration, measure):
        raise NotMartingaleError("M")
    steps = [
        conditional_expectation(M.increment(t) * M.increment(t), filtration[t - 1], measure)
        for t in range(1, M.horizon + 1)
    ]
    return _cumulative(M.size, steps)


def structure_alpha(dec: Decomposition, filtration: Filtration, measure: Measure) -> StructureData:
    """
    Predictable alpha with A = integral of alpha d<M>.

    On blocks where d<M> vanishes alpha is 0 and dA must vanish too.

    Raises:
        StructureConditionFailsError: If dA != 0 on a block where d<M> = 0
    """
    M = dec.martingale_part
    A = dec.drift_part
    qv = predictable_qv(M, filtration, measure)
    columns = []
    for t in range(1, M.horizon + 1):
        d_qv = qv.increment(t).values
        d_a = A.increment(t).values
        column = [ZERO] * M.size
        for block in filtration[t - 1].blocks:
            i = block[0]
            if d_qv[i] != 0:
                value = d_a[i] / d_qv[i]
            elif d_a[i] != 0:
                raise StructureConditionFailsError(t, list(block))
            else:
                value = ZERO
            for j in block:
                column[j] = value
        columns.append(column)
    alpha = Integrand.from_columns(columns) if columns else Integrand(values=((),) * M.size)
    satisfied = stochastic_integral(alpha, qv) == A
    logger.debug("structure condition satisfied=%s", satisfied)
    return StructureData(alpha=alpha, predictable_qv=qv, satisfied=satisfied)


def jump_condition(alpha: Integrand, M: Process) -> bool:
    """True when alpha_t dM_t < 1 at every outcome and time."""
    return all(
        a * d < 1
        for t in range(1, M.horizon + 1)
        for a, d in zip(alpha.at(t).values, M.increment(t).values)
    )


def doleans_exponential(alpha: Integrand, M: Process) -> Process:
    """
    Doleans exponential L = 1 - integral of L_- alpha dM.

    L_t = prod_{s<=t} (1 - alpha_s dM_s), strictly positive under the jump
    condition.

    Raises:
        JumpConditionViolatedError: If alpha_t dM_t >= 1 somewhere
    """
    if (alpha.size, alpha.horizon) != (M.size, M.horizon):
        raise DimensionMismatchError("alpha", (M.size, M.horizon), (alpha.size, alpha.horizon))
    columns = [[Fraction(1)] * M.size]
    for t in range(1, M.horizon + 1):
        jumps = [a * d for a, d in zip(alpha.at(t).values, M.increment(t).values)]
        for outcome, jump in enumerate(jumps):
            if jump >= 1:
                raise JumpConditionViolatedError(t, outcome, jump)
        columns.append([prev * (1 - j) for prev, j in zip(columns[-1], jumps)])
    return Process.from_columns(columns)


Coordinate = Tuple[int, int, int]


def elementary_integrals(
    integrators: Sequence[Process], filtration: Filtration
) -> List[Tuple[Coordinate, RandomVariable]]:
    """
    Terminal values of the elementary integrals 1_B dX_t.

    One generator per (integrator j, time t, block B of F_{t-1}), ordered by
    time, then block, then integrator. The coordinate is ``(j, t, b)`` with
    ``b`` the block's position in the canonical order.

    Raises:
        NotAdaptedError: If an integrator is not adapted
    """
    for j, X in enumerate(integrators):
        t = first_unadapted_time(X, filtration)
        if t is not None:
            raise NotAdaptedError(f"integrator {j}", t)
    out: List[Tuple[Coordinate, RandomVariable]] = []
    horizon = len(filtration) - 1
    increments = [[X.increment(t).values for t in range(1, horizon + 1)] for X in integrators]
    for t in range(1, horizon + 1):
        for b, block in enumerate(filtration[t - 1].blocks):
            members = set(block)
            for j in range(len(integrators)):
                step = increments[j][t - 1]
                values = tuple(step[i] if i in members else ZERO for i in range(len(step)))
                out.append(((j, t, b), RandomVariable(values=values)))
    return out


def lagged(p: Process) -> Integrand:
    """Integrand t -> p_{t-1}, the left limit used in integration by parts."""
    return Integrand.from_columns([p.at(t - 1).values for t in range(1, p.horizon + 1)])


def product(U: Process, V: Process) -> Process:
    """Pointwise product process."""
    _same_grid(U, V)
    return U * V


def _first_unpredictable_column(p: Process, filtration: Filtration) -> Optional[int]:
    if not is_measurable(p.at(0), filtration[0]):
        return 0
    for t in range(1, p.horizon + 1):
        if not is_measurable(p.at(t), filtration[t - 1]):
            return t
    return None


def is_process_predictable(p: Process, filtration: Filtration) -> bool:
    """Column 0 measurable at time 0 and column t measurable at t-1 for t >= 1."""
    return _first_unpredictable_column(p, filtration) is None


def is_strongly_orthogonal(
    U: Process, V: Process, filtration: Filtration, measure: Measure
) -> bool:
    """
    True when UV is a martingale and U_0 V_0 = 0 on every outcome.

    Raises:
        NotMartingaleError: If U or V is not a martingale
    """
    if not is_martingale(U, filtration, measure):
        raise NotMartingaleError("U")
    if not is_martingale(V, filtration, measure):
        raise NotMartingaleError("V")
    if not (U.at(0) * V.at(0)).is_zero():
        return False
    return is_martingale(product(U, V), filtration, measure)


def are_independent(fa: Filtration, fb: Filtration, measure: Measure) -> bool:
    """True when P(A and B) = P(A) P(B) for all terminal blocks A of fa and B of fb."""
    for a in fa[-1].blocks:
        pa = measure.mass(a)
        members = set(a)
        for b in fb[-1].blocks:
            joint = measure.mass([i for i in b if i in members])
            if joint != pa * measure.mass(b):
                return False
    return True


def check_yoeurp(M: Process, A: Process, filtration: Filtration, measure: Measure) -> bool:
    """
    True when [M, A] is a martingale for a martingale M and predictable A.

    Raises:
        NotMartingaleError: If M is not a martingale
        NotPredictableError: If A is not predictable or not null at 0
    """
    if not is_martingale(M, filtration, measure):
        raise NotMartingaleError("M")
    if not A.at(0).is_zero():
        raise NotPredictableError("A", 0)
    t = _first_unpredictable_column(A, filtration)
    if t is not None:
        raise NotPredictableError("A", t)
    return is_martingale(quadratic_covariation(M, A), filtration, measure)
