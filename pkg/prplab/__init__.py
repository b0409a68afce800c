"""
prplab - Exact-rational representation lab
==========================================

Finite filtered probability spaces where completeness, martingale-measure
uniqueness, extremality, triplet representation and PRP loss under
enlargement of filtration are all decided exactly over the rationals.

Quick Start:
    >>> from prplab import LabSession, emm_set, is_complete, unique_emm
    >>>
    >>> # Unique martingale measure of the one-step binomial tree
    >>> with LabSession("BIN") as lab:
    ...     X, F = lab.process("X"), lab.filtration()
    ...     print(unique_emm([X], F, lab.space).weights)
    (Fraction(1, 3), Fraction(2, 3))
    >>>
    >>> # Progressive enlargement by a random time destroys the PRP
    >>> from prplab import prp_loss_witness
    >>> with LabSession("TAU") as lab:
    ...     report = prp_loss_witness(
    ...         lab.process("X"), lab.filtration(), lab.filtration("progressive:TAU"), lab.space
    ...     )
    ...     print(report.passed, report.u)
    True 1
    >>>
    >>> # Builtin scenarios
    >>> from prplab import run_scenario
    >>> run_scenario("ftap", "TRI").verdict
    'pass'
"""

from .__version__ import __author__, __description__, __version__
from .calculus import (
    are_independent,
    doleans_exponential,
    doob_decomposition,
    is_strongly_orthogonal,
    predictable_qv,
    quadratic_covariation,
    stochastic_integral,
    structure_alpha,
)
from .document import ModelDocument, emit_model, parse_model
from .enlargement import (
    first_strict_time,
    immersion_check,
    initial_enlargement,
    is_enlargement,
    progressive_enlargement,
    prp_loss_witness,
    void_emm_check,
)
from .error_handler import install_exception_handler
from .exceptions import (
    ConfigurationError,
    # Validation
    DimensionMismatchError,
    FiltrationNotRefiningError,
    # Measures
    FiltrationsNotIndependentError,
    # Hypotheses
    HypothesisViolatedError,
    InfeasibleSystemError,
    JumpConditionViolatedError,
    # Martingales
    MartingaleError,
    MeasurabilityError,
    MeasureError,
    ModelParseError,
    ModelValidationError,
    NoEMMError,
    NonPositiveProbabilityError,
    NotADensityError,
    NotAdaptedError,
    NotAFiltrationError,
    NotEquivalentError,
    NotInPolytopeError,
    NotMartingaleError,
    NotPredictableError,
    PartitionInvalidError,
    ProbabilitySumNotOneError,
    # Base
    PrpLabError,
    ReportParseError,
    # Resources
    ResourceError,
    StructureConditionFailsError,
    UnknownCommandError,
    UnknownEntityError,
    ValidationError,
)
from .measures import (
    emm_set,
    extremal_points,
    find_equivalent_mm,
    first_ftap_check,
    is_unique_emm,
    martingale_polytope,
    measure_from_density,
    minimal_mm_check,
    mutually_non_dominated,
    no_arbitrage_check,
    pairwise_singular,
    product_density_measure,
    product_law,
    second_ftap_report,
    unique_emm,
)
from .models import (
    FiniteFilteredSpace,
    Integrand,
    Measure,
    MeasurePolytope,
    Partition,
    Process,
    RandomTime,
    RandomVariable,
    RepresentationResult,
    ScenarioDefinition,
    ScenarioReport,
    TheoremReport,
)
from .representation import (
    covariation_vanishing_report,
    integral_span,
    is_complete,
    orthogonal_decomposition_report,
    prp_inheritance_report,
    represent,
    triplet_representation_report,
)
from .scenarios import builtin_scenarios, run_batch, run_scenario, scenario
from .session import LabSession
from .space import (
    build_space,
    conditional_expectation,
    is_adapted,
    is_martingale,
    is_predictable,
    natural_filtration,
)

__all__ = [
    # Session and documents
    "LabSession",
    "ModelDocument",
    "parse_model",
    "emit_model",
    # Value types
    "FiniteFilteredSpace",
    "Partition",
    "Measure",
    "Process",
    "Integrand",
    "RandomVariable",
    "RandomTime",
    "MeasurePolytope",
    "RepresentationResult",
    "TheoremReport",
    "ScenarioDefinition",
    "ScenarioReport",
    # Space
    "build_space",
    "natural_filtration",
    "conditional_expectation",
    "is_adapted",
    "is_predictable",
    "is_martingale",
    # Calculus
    "doob_decomposition",
    "stochastic_integral",
    "quadratic_covariation",
    "predictable_qv",
    "structure_alpha",
    "doleans_exponential",
    "is_strongly_orthogonal",
    "are_independent",
    # Measures
    "martingale_polytope",
    "emm_set",
    "find_equivalent_mm",
    "is_unique_emm",
    "unique_emm",
    "extremal_points",
    "pairwise_singular",
    "mutually_non_dominated",
    "minimal_mm_check",
    "measure_from_density",
    "product_density_measure",
    "product_law",
    "no_arbitrage_check",
    "first_ftap_check",
    "second_ftap_report",
    # Representation
    "integral_span",
    "is_complete",
    "represent",
    "orthogonal_decomposition_report",
    "covariation_vanishing_report",
    "prp_inheritance_report",
    "triplet_representation_report",
    # Enlargement
    "is_enlargement",
    "progressive_enlargement",
    "initial_enlargement",
    "first_strict_time",
    "immersion_check",
    "prp_loss_witness",
    "void_emm_check",
    # Scenarios
    "scenario",
    "builtin_scenarios",
    "run_scenario",
    "run_batch",
    "install_exception_handler",
    # Exceptions - Base
    "PrpLabError",
    # Exceptions - Validation
    "ValidationError",
    "NonPositiveProbabilityError",
    "ProbabilitySumNotOneError",
    "PartitionInvalidError",
    "FiltrationNotRefiningError",
    "DimensionMismatchError",
    "NotAFiltrationError",
    "ModelParseError",
    "ModelValidationError",
    "ReportParseError",
    "ConfigurationError",
    # Exceptions - Measurability
    "MeasurabilityError",
    "NotAdaptedError",
    "NotPredictableError",
    # Exceptions - Martingales
    "MartingaleError",
    "NotMartingaleError",
    "StructureConditionFailsError",
    "JumpConditionViolatedError",
    # Exceptions - Measures
    "MeasureError",
    "InfeasibleSystemError",
    "NotInPolytopeError",
    "NotEquivalentError",
    "NotADensityError",
    "FiltrationsNotIndependentError",
    "NoEMMError",
    # Exceptions - Hypotheses
    "HypothesisViolatedError",
    # Exceptions - Resources
    "ResourceError",
    "UnknownEntityError",
    "UnknownCommandError",
    # Version info
    "__version__",
    "__author__",
    "__description__",
]
