"""
Builtin Scenarios
-----------------
Registry of scenarios, each reproducing one statement on a bundled model
and returning a ScenarioReport checklist.

Runners are registered with the ``@scenario`` decorator and receive the
session plus a role -> entity binding. Every role binds, by default, the
model entity of the same name.
"""

import asyncio
import logging
import os
from typing import Callable, Dict, List, Optional, Sequence

from .calculus import are_independent, is_strongly_orthogonal
from .enlargement import (
    first_strict_time,
    immersion_check,
    is_enlargement,
    progressive_enlargement,
    prp_loss_witness,
    void_emm_check,
)
from .exceptions import (
    ConfigurationError,
    HypothesisViolatedError,
    NotMartingaleError,
    UnknownCommandError,
    UnknownEntityError,
)
from .measures import (
    emm_set,
    find_equivalent_mm,
    first_ftap_check,
    product_law,
    render,
    second_ftap_report,
    unique_emm,
)
from .models import (
    ScenarioDefinition,
    ScenarioRegistry,
    ScenarioReport,
    TheoremReport,
)
from .representation import (
    covariation_vanishing_report,
    orthogonal_decomposition_report,
    prp_inheritance_report,
    triplet_representation_report,
)
from .session import LabSession
from .space import natural_filtration, with_measure
from .timing import timed

logger = logging.getLogger(__name__)

MAX_CONCURRENT_ENV = "PRPLAB_MAX_CONCURRENT"
DEFAULT_MAX_CONCURRENT = 4

REGISTRY = ScenarioRegistry()

Runner = Callable[[LabSession, Dict[str, str]], ScenarioReport]


def scenario(
    name: str,
    *,
    title: str,
    model: str,
    roles: Dict[str, str],
    hypotheses: Sequence[str],
    conclusions: Sequence[str],
    aliases: Sequence[str] = (),
) -> Callable[[Runner], Runner]:
    """
    Decorator registering a scenario runner.

    Example:
        >>> @scenario("prop2", title="...", model="BIN-DRIFT", roles={"X": "process"},
        ...           hypotheses=["unique_martingale_measure"], conclusions=[...])
        ... def run_prop2(lab, roles):
        ...     ...
    """

    def decorator(func: Runner) -> Runner:
        definition = ScenarioDefinition(
            name=name,
            title=title,
            roles=dict(roles),
            hypotheses=list(hypotheses),
            conclusions=list(conclusions),
            model=model,
            aliases=list(aliases),
        )
        REGISTRY.add_scenario(definition, timed(func))
        return func

    return decorator


def builtin_scenarios() -> List[ScenarioDefinition]:
    """Descriptors of every builtin scenario, in registration order."""
    return REGISTRY.get_definitions()


def report_from_theorem(
    name: str, lab: LabSession, report: TheoremReport, **extra: str
) -> ScenarioReport:
    """Checklist report from a theorem-level report; values and dimensions become the witness."""
    witness = dict(report.values)
    witness.update({f"dim_{key}": str(value) for key, value in report.dimensions.items()})
    witness.update(extra)
    return ScenarioReport.from_checks(
        name, lab.name, report.hypotheses, report.conclusions, witness
    )


def _flag(value: bool) -> str:
    return str(value).lower()


# ============================================================================
# Enlargement
# ============================================================================


@scenario(
    "prop1",
    title="Strict inclusion persists after the first strict time",
    model="TAU",
    roles={"X": "process", "TAU": "random_time"},
    hypotheses=["unique_martingale_measure_F", "martingale_measure_G", "strict_enlargement"],
    conclusions=["u_exists", "u_is_min", "strict_after_u", "look_ahead_has_no_emm"],
)
def run_prop1(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    space = lab.space
    X = lab.process(roles["X"])
    F = natural_filtration([X], space)
    G = progressive_enlargement(F, lab.random_time(roles["TAU"]))
    _, poly = emm_set([X], G, space)
    hypotheses = {
        "unique_martingale_measure_F": unique_emm([X], F, space) is not None,
        "martingale_measure_G": find_equivalent_mm(poly) is not None,
        "strict_enlargement": is_enlargement(F, G),
    }
    report = first_strict_time(F, G)
    void = void_emm_check(X, F, [F[-1]] * len(F), space)
    conclusions = {
        "u_exists": report.u is not None,
        "u_is_min": report.u_is_min,
        "strict_after_u": report.strict_after_u,
        "look_ahead_has_no_emm": void.passed,
    }
    witness = {
        "u": "absent" if report.u is None else str(report.u),
        "strict_times": " ".join(str(t) for t in report.strict_times),
        "g0_trivial": _flag(report.g0_trivial),
    }
    return ScenarioReport.from_checks("prop1", lab.name, hypotheses, conclusions, witness)


@scenario(
    "thm2",
    title="The enlarged filtration loses the representation property",
    model="TAU",
    roles={"X": "process", "TAU": "random_time"},
    hypotheses=[
        "G_contains_F",
        "G0_trivial",
        "u_exists",
        "unique_martingale_measure_F",
        "martingale_measure_G",
    ],
    conclusions=[
        "witness_nonzero",
        "conditional_mean_zero",
        "orthogonal_to_integrals",
        "not_representable",
        "codimension_positive",
    ],
)
def run_thm2(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    space = lab.space
    X = lab.process(roles["X"])
    F = natural_filtration([X], space)
    G = progressive_enlargement(F, lab.random_time(roles["TAU"]))
    report = prp_loss_witness(X, F, G, space)
    extra = {}
    if report.block is not None:
        extra["block"] = " ".join(space.outcomes[i] for i in report.block)
        extra["u"] = str(report.u)
    if report.failed_hypothesis:
        extra["failed_hypothesis"] = report.failed_hypothesis
    return report_from_theorem("thm2", lab, report, **extra)


@scenario(
    "immersion",
    title="Immersion holds exactly when the intersection condition holds",
    model="TAU",
    roles={"X": "process", "TAU": "random_time"},
    hypotheses=["strict_enlargement"],
    conclusions=[
        "conditions_equivalent",
        "immersed",
        "look_ahead_equivalence_holds",
        "look_ahead_not_immersed",
    ],
    aliases=["thm1"],
)
def run_immersion(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    space = lab.space
    X = lab.process(roles["X"])
    F = natural_filtration([X], space)
    G = progressive_enlargement(F, lab.random_time(roles["TAU"]))
    report = immersion_check(F, G, space.measure, space)
    look_ahead = immersion_check(F, [F[-1]] * len(F), space.measure, space)
    conclusions = {
        "conditions_equivalent": report.conclusions["conditions_equivalent"],
        "immersed": report.condition_i and report.condition_ii,
        "look_ahead_equivalence_holds": look_ahead.conclusions["conditions_equivalent"],
        "look_ahead_not_immersed": not look_ahead.condition_i,
    }
    witness = {
        "condition_i": _flag(report.condition_i),
        "condition_ii": _flag(report.condition_ii),
        "look_ahead_condition_i": _flag(look_ahead.condition_i),
        "look_ahead_condition_ii": _flag(look_ahead.condition_ii),
    }
    return ScenarioReport.from_checks(
        "immersion", lab.name, {"strict_enlargement": is_enlargement(F, G)}, conclusions, witness
    )


# ============================================================================
# Orthogonal pairs
# ============================================================================


@scenario(
    "lemma1",
    title="Complete martingales are strongly orthogonal iff independent",
    model="COIN2",
    roles={"M": "process", "N": "process", "Q": "measure"},
    hypotheses=[
        "M_unique_martingale_measure",
        "N_unique_martingale_measure",
        "initial_product_zero",
    ],
    conclusions=["orthogonal_iff_independent_under_P", "orthogonal_iff_independent_under_Q"],
)
def run_lemma1(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    M = lab.process(roles["M"])
    N = lab.process(roles["N"])
    measures = {"P": lab.space.measure, "Q": lab.measure(roles["Q"])}
    spaces = {label: with_measure(lab.space, m) for label, m in measures.items()}
    fM = natural_filtration([M], lab.space)
    fN = natural_filtration([N], lab.space)
    G = natural_filtration([M, N], lab.space)
    hypotheses = {
        "M_unique_martingale_measure": all(
            unique_emm([M], fM, spaces[label]) == m for label, m in measures.items()
        ),
        "N_unique_martingale_measure": all(
            unique_emm([N], fN, spaces[label]) == m for label, m in measures.items()
        ),
        "initial_product_zero": (M.at(0) * N.at(0)).is_zero(),
    }
    conclusions: Dict[str, bool] = {}
    witness: Dict[str, str] = {}
    if all(hypotheses.values()):
        for label, measure in measures.items():
            try:
                orthogonal = is_strongly_orthogonal(M, N, G, measure)
            except NotMartingaleError:
                orthogonal = False
            independent = are_independent(fM, fN, measure)
            conclusions[f"orthogonal_iff_independent_under_{label}"] = orthogonal == independent
            witness[f"orthogonal_{label}"] = _flag(orthogonal)
            witness[f"independent_{label}"] = _flag(independent)
    return ScenarioReport.from_checks("lemma1", lab.name, hypotheses, conclusions, witness)


_PAIR_HYPOTHESES = [
    "X_unique_martingale_measure",
    "X_jump_condition",
    "Y_unique_martingale_measure",
    "Y_jump_condition",
    "strong_orthogonality",
]


@scenario(
    "thm3",
    title="Orthogonal decomposition into M, N and [M, N] integrals",
    model="COIN2",
    roles={"M": "process", "N": "process"},
    hypotheses=[
        "M_unique_martingale_measure",
        "N_unique_martingale_measure",
        "strong_orthogonality",
    ],
    conclusions=[
        "spans_pairwise_orthogonal",
        "direct_sum_is_everything",
        "covariation_orthogonal_to_M",
        "covariation_orthogonal_to_N",
    ],
)
def run_thm3(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    report = orthogonal_decomposition_report(
        lab.process(roles["M"]), lab.process(roles["N"]), lab.space, lab.space.measure
    )
    return report_from_theorem("thm3", lab, report)


@scenario(
    "cor1",
    title="[M, N] vanishes iff the pair (M, N) is complete",
    model="COIN2",
    roles={"M": "process", "N": "process"},
    hypotheses=_PAIR_HYPOTHESES,
    conclusions=["covariation_vanishes_iff_pair_complete"],
)
def run_cor1(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    report = covariation_vanishing_report(
        lab.process(roles["M"]), lab.process(roles["N"]), lab.space, lab.space.measure
    )
    return report_from_theorem("cor1", lab, report)


# ============================================================================
# Semimartingales
# ============================================================================


@scenario(
    "prop2",
    title="The martingale part inherits the representation property",
    model="BIN-DRIFT",
    roles={"X": "process"},
    hypotheses=["unique_martingale_measure", "structure_condition", "jump_condition"],
    conclusions=[
        "martingale_part_complete",
        "doleans_measure_is_unique_emm",
        "doleans_measure_is_minimal",
        "X_martingale_under_doleans_measure",
    ],
)
def run_prop2(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    return report_from_theorem("prop2", lab, prp_inheritance_report(lab.process(roles["X"]), lab.space))


_TRIPLET_CONCLUSIONS = [
    "Q_equivalent",
    "X_Q_martingale",
    "Y_Q_martingale",
    "independent_under_Q",
    "xy_triplet_represents_all",
    "mn_triplet_represents_all",
]


@scenario(
    "thm4",
    title="Unique representation against X, Y and [X, Y]",
    model="PROD2",
    roles={"X": "process", "Y": "process"},
    hypotheses=_PAIR_HYPOTHESES,
    conclusions=_TRIPLET_CONCLUSIONS,
)
def run_thm4(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    report = triplet_representation_report(
        lab.process(roles["X"]), lab.process(roles["Y"]), lab.space, lab.space.measure
    )
    return report_from_theorem("thm4", lab, report)


@scenario(
    "cor3",
    title="[X, Y] vanishes iff the pair (X, Y) is complete",
    model="PROD2",
    roles={"X": "process", "Y": "process"},
    hypotheses=_PAIR_HYPOTHESES,
    conclusions=["covariation_vanishes_iff_pair_complete"],
)
def run_cor3(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    report = covariation_vanishing_report(
        lab.process(roles["X"]), lab.process(roles["Y"]), lab.space, lab.space.measure
    )
    return report_from_theorem("cor3", lab, report)


@scenario(
    "remark-product-law",
    title="Representation under a measure equivalent to the product law",
    model="COIN2-SKEW",
    roles={"M": "process", "N": "process"},
    hypotheses=["product_law_exists", *_PAIR_HYPOTHESES],
    conclusions=["law_equivalent_to_P", *_TRIPLET_CONCLUSIONS, "representation_under_P"],
)
def run_product_law(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    space = lab.space
    M = lab.process(roles["M"])
    N = lab.process(roles["N"])
    fM = natural_filtration([M], space)
    fN = natural_filtration([N], space)
    law = product_law(space, fM, fN)
    if law is None:
        raise HypothesisViolatedError(
            "product_law_exists", "the product law charges combinations no outcome realises"
        )
    report = triplet_representation_report(M, N, space, space.measure, law=law)
    witness = dict(report.values)
    witness["law"] = render(law.weights)
    witness["independent_under_P"] = _flag(are_independent(fM, fN, space.measure))
    return ScenarioReport.from_checks(
        "remark-product-law",
        lab.name,
        {"product_law_exists": True, **report.hypotheses},
        {"law_equivalent_to_P": law.is_equivalent(), **report.conclusions},
        witness,
    )


# ============================================================================
# Martingale measures
# ============================================================================


def _ftap(lab: LabSession, roles: Dict[str, str]):
    X = lab.process(roles["X"])
    F = natural_filtration([X], lab.space)
    return X, F, second_ftap_report(X, F, lab.space)


@scenario(
    "thm5",
    title="Extremal martingale measures are those with trivial F_0 and the representation property",
    model="TRI",
    roles={"X": "process"},
    hypotheses=["emm_exists"],
    conclusions=["extremal_iff_trivial_f0_and_prp"],
)
def run_thm5(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    _, _, report = _ftap(lab, roles)
    return ScenarioReport.from_checks(
        "thm5",
        lab.name,
        report.hypotheses,
        {"extremal_iff_trivial_f0_and_prp": report.conclusions["extremal_iff_trivial_f0_and_prp"]},
        {
            **report.values,
            "measures_checked": str(len(report.measures)),
            "extremal": " ".join(_flag(m.extremal) for m in report.measures),
        },
    )


@scenario(
    "cor4",
    title="Extremal martingale measures are mutually singular",
    model="TRI",
    roles={"X": "process"},
    hypotheses=["emm_exists"],
    conclusions=["vertices_mutually_non_dominated", "at_most_one_equivalent_vertex"],
)
def run_cor4(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    _, _, report = _ftap(lab, roles)
    conclusions = {
        key: report.conclusions[key]
        for key in ("vertices_mutually_non_dominated", "at_most_one_equivalent_vertex")
    }
    witness = {k: v for k, v in report.values.items() if k.startswith("vertex_")}
    witness["supports_disjoint"] = report.values["supports_disjoint"]
    witness["vertices"] = str(report.dimensions["vertices"])
    return ScenarioReport.from_checks("cor4", lab.name, report.hypotheses, conclusions, witness)


@scenario(
    "ftap",
    title="The market is complete iff the martingale measure is unique",
    model="BIN",
    roles={"X": "process"},
    hypotheses=["emm_exists"],
    conclusions=[
        "unique_iff_complete",
        "equivalent_vertex_iff_unique",
        "no_arbitrage_iff_emm_exists",
    ],
    aliases=["thm6"],
)
def run_ftap(lab: LabSession, roles: Dict[str, str]) -> ScenarioReport:
    X, F, report = _ftap(lab, roles)
    first = first_ftap_check([X], F, lab.space)
    conclusions = {
        "unique_iff_complete": report.conclusions["unique_iff_complete"],
        "equivalent_vertex_iff_unique": report.conclusions["equivalent_vertex_iff_unique"],
        **first.conclusions,
    }
    witness = {
        "unique": _flag(report.unique),
        "complete": _flag(report.complete),
        "emm": report.values["emm"],
    }
    return ScenarioReport.from_checks("ftap", lab.name, report.hypotheses, conclusions, witness)


# ============================================================================
# Running
# ============================================================================


def _names() -> List[str]:
    return [definition.name for definition in builtin_scenarios()]


def run_scenario(
    name: str,
    model: Optional[str] = None,
    bindings: Optional[Dict[str, str]] = None,
    models_dir: Optional[str] = None,
) -> ScenarioReport:
    """
    Run one scenario.

    Args:
        name: Scenario name or alias
        model: Model path or name (defaults to the scenario's bundled model)
        bindings: Role -> entity overrides
        models_dir: Extra directory searched for model names

    Raises:
        UnknownCommandError: If the scenario does not exist
        UnknownEntityError: If a binding names an unknown role or entity
        HypothesisViolatedError: If the model is outside the statement's hypotheses
    """
    found = REGISTRY.get_scenario(name)
    if found is None:
        raise UnknownCommandError(name, _names())
    definition = found.definition
    overrides = dict(bindings or {})
    for role in overrides:
        if role not in definition.roles:
            raise UnknownEntityError("role", role)
    roles = {role: overrides.get(role, role) for role in definition.roles}
    with LabSession(model or definition.model, models_dir) as lab:
        logger.debug("running scenario %s on %s", definition.name, lab.name)
        return found.implementation(lab, roles)


def _max_concurrent_from_env() -> int:
    raw = os.getenv(MAX_CONCURRENT_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_CONCURRENT
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(MAX_CONCURRENT_ENV, f"expected an integer, got '{raw}'") from None


async def run_batch(
    names: Optional[Sequence[str]] = None,
    max_concurrent: Optional[int] = None,
    models_dir: Optional[str] = None,
) -> List[ScenarioReport]:
    """
    Run scenarios concurrently on worker threads, each on its bundled model.

    Results come back in the order of ``names`` (registry order by default).

    Args:
        names: Scenario names; all builtin scenarios when omitted
        max_concurrent: Concurrency bound (default ``$PRPLAB_MAX_CONCURRENT`` or 4)
        models_dir: Extra directory searched for model names

    Raises:
        ConfigurationError: If ``$PRPLAB_MAX_CONCURRENT`` is not an integer
    """
    selected = list(names) if names else _names()
    limit = max_concurrent or _max_concurrent_from_env()
    semaphore = asyncio.Semaphore(max(1, limit))

    async def run_one(name: str) -> ScenarioReport:
        async with semaphore:
            return await asyncio.to_thread(run_scenario, name, None, None, models_dir)

    reports = await asyncio.gather(*(run_one(name) for name in selected))
    return list(reports)
