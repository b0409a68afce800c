"""
prplab Exceptions
-----------------
Exception classes for the finite filtered-space laboratory.

All exceptions inherit from PrpLabError and provide:
- Structured error messages
- Machine-readable error codes
- Contextual information
- Optional suggestions

Mathematical outcomes that are legitimately empty (no equivalent martingale
measure, no first strict time, no witness) are returned as values, never
raised.
"""

from typing import Any, Dict, Optional

# ============================================================================
# Base Exceptions
# ============================================================================


class PrpLabError(Exception):
    """Base exception for all prplab errors.

    Attributes:
        message: Human-readable error message
        error_code: Machine-readable error code
        error_type: Error category (validation_error, martingale_error, etc.)
        context: Additional error context
        suggestion: Optional suggestion for user action
    """

    def __init__(
        self,
        message: str,
        error_code: str = "UNKNOWN_ERROR",
        error_type: str = "unknown_error",
        context: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
    ) -> None:
        """Initialize prplab error.

        Args:
            message: Human-readable error message
            error_code: Machine-readable error code
            error_type: Error category
            context: Additional context for debugging
            suggestion: Optional suggestion for user
        """
        self.message = message
        self.error_code = error_code
        self.error_type = error_type
        self.context = context or {}
        self.suggestion = suggestion
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        """Structured payload used by the CLI in structured output mode."""
        payload: Dict[str, Any] = {
            "code": self.error_code,
            "message": self.message,
            "type": self.error_type,
            "context": {key: _plain(value) for key, value in self.context.items()},
        }
        if self.suggestion:
            payload["suggestion"] = self.suggestion
        return payload


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return str(value)


# ============================================================================
# Validation Errors
# ============================================================================


class ValidationError(PrpLabError):
    """Base class for input validation errors."""

    def __init__(
        self,
        message: str,
        error_code: str = "VALIDATION_ERROR",
        context: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code=error_code,
            error_type="validation_error",
            context=context,
            suggestion=suggestion,
        )


class NonPositiveProbabilityError(ValidationError):
    """Raised when an outcome is given a probability that is not strictly positive."""

    def __init__(self, outcome: str, probability: Any) -> None:
        super().__init__(
            message=f"Outcome '{outcome}' has probability {probability}; "
            "the base measure must charge every outcome",
            error_code="NON_POSITIVE_PROBABILITY",
            context={
                "invariant": "full support",
                "outcome": outcome,
                "probability": probability,
            },
            suggestion="Drop zero-probability outcomes from the space",
        )


class ProbabilitySumNotOneError(ValidationError):
    """Raised when probabilities do not sum to exactly one."""

    def __init__(self, total: Any) -> None:
        super().__init__(
            message=f"Probabilities sum to {total}, not 1",
            error_code="PROBABILITY_SUM_NOT_ONE",
            context={"invariant": "probabilities sum to 1", "total": total},
        )


class PartitionInvalidError(ValidationError):
    """Raised when a list of blocks is not a partition of the outcome indices."""

    def __init__(self, reason: str, blocks: Any = None) -> None:
        context: Dict[str, Any] = {"invariant": "partition", "reason": reason}
        if blocks is not None:
            context["blocks"] = blocks
        super().__init__(
            message=f"Invalid partition: {reason}",
            error_code="PARTITION_INVALID",
            context=context,
        )


class FiltrationNotRefiningError(ValidationError):
    """Raised when a partition sequence is not increasing in time."""

    def __init__(self, time: int) -> None:
        super().__init__(
            message=f"Partition at time {time} does not refine the partition "
            f"at time {time - 1}",
            error_code="FILTRATION_NOT_REFINING",
            context={"invariant": "filtration refines in time", "time": time},
        )


class DimensionMismatchError(ValidationError):
    """Raised when objects are defined on incompatible outcome sets or horizons."""

    def __init__(self, what: str, expected: Any, actual: Any) -> None:
        super().__init__(
            message=f"Dimension mismatch for {what}: expected {expected}, got {actual}",
            error_code="DIMENSION_MISMATCH",
            context={"what": what, "expected": expected, "actual": actual},
        )


class NotAFiltrationError(ValidationError):
    """Raised when an argument expected to be a filtration is not one."""

    def __init__(self, name: str, reason: str) -> None:
        super().__init__(
            message=f"'{name}' is not a filtration: {reason}",
            error_code="NOT_A_FILTRATION",
            context={"name": name, "reason": reason},
        )


class ModelParseError(ValidationError):
    """Raised when a model document cannot be parsed."""

    def __init__(
        self,
        reason: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field:
            where.append(f"field '{field}'")
        location = f" ({', '.join(where)})" if where else ""
        context: Dict[str, Any] = {"reason": reason}
        if line is not None:
            context["line"] = line
        if column is not None:
            context["column"] = column
        if field:
            context["field"] = field
        super().__init__(
            message=f"Cannot parse model{location}: {reason}",
            error_code="PARSE_ERROR",
            context=context,
        )
        self.line = line
        self.column = column
        self.field = field


class ModelValidationError(ValidationError):
    """Raised when a parsed model breaks a named invariant."""

    def __init__(self, invariant: str, reason: str, field: Optional[str] = None) -> None:
        context: Dict[str, Any] = {"invariant": invariant, "reason": reason}
        if field:
            context["field"] = field
        super().__init__(
            message=f"Model violates '{invariant}': {reason}",
            error_code="MODEL_VALIDATION_ERROR",
            context=context,
        )
        self.invariant = invariant


class ReportParseError(ValidationError):
    """Raised when saved structured output cannot be read back."""

    def __init__(self, reason: str, line: Optional[int] = None) -> None:
        location = f" (line {line})" if line is not None else ""
        context: Dict[str, Any] = {"reason": reason}
        if line is not None:
            context["line"] = line
        super().__init__(
            message=f"Cannot read report{location}: {reason}",
            error_code="REPORT_PARSE_ERROR",
            context=context,
            suggestion="Pass output written by a prplab command with --format structured",
        )


class ConfigurationError(ValidationError):
    """Raised when an environment setting has an invalid value."""

    def __init__(self, config_key: str, reason: str) -> None:
        super().__init__(
            message=f"Invalid configuration for '{config_key}': {reason}",
            error_code="CONFIGURATION_ERROR",
            context={"config_key": config_key, "reason": reason},
        )


# ============================================================================
# Measurability Errors
# ============================================================================


class MeasurabilityError(PrpLabError):
    """Base class for adaptedness and predictability failures."""

    def __init__(
        self,
        message: str,
        error_code: str,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code=error_code,
            error_type="measurability_error",
            context=context,
        )


class NotAdaptedError(MeasurabilityError):
    """Raised when a process is not adapted to the working filtration."""

    def __init__(self, name: str = "process", time: Optional[int] = None) -> None:
        at = f" at time {time}" if time is not None else ""
        super().__init__(
            message=f"{name} is not adapted to the filtration{at}",
            error_code="NOT_ADAPTED",
            context={"name": name, "time": time},
        )


class NotPredictableError(MeasurabilityError):
    """Raised when an integrand or drift is not predictable."""

    def __init__(self, name: str = "integrand", time: Optional[int] = None) -> None:
        at = f" at time {time}" if time is not None else ""
        super().__init__(
            message=f"{name} is not predictable{at}",
            error_code="NOT_PREDICTABLE",
            context={"name": name, "time": time},
        )


# ============================================================================
# Martingale Errors
# ============================================================================


class MartingaleError(PrpLabError):
    """Base class for martingale-structure failures."""

    def __init__(
        self,
        message: str,
        error_code: str,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code=error_code,
            error_type="martingale_error",
            context=context,
        )


class NotMartingaleError(MartingaleError):
    """Raised when a process required to be a martingale is not one."""

    def __init__(self, name: str = "process") -> None:
        super().__init__(
            message=f"{name} is not a martingale for the given filtration and measure",
            error_code="NOT_MARTINGALE",
            context={"name": name},
        )


class StructureConditionFailsError(MartingaleError):
    """Raised when the drift charges a block where the predictable variation is flat."""

    def __init__(self, time: int, block: Any) -> None:
        super().__init__(
            message=f"Structure condition fails at time {time}: drift is nonzero "
            "where the predictable quadratic variation does not move",
            error_code="STRUCTURE_CONDITION_FAILS",
            context={"time": time, "block": block},
        )


class JumpConditionViolatedError(MartingaleError):
    """Raised when alpha * dM reaches 1 somewhere."""

    def __init__(self, time: int, outcome: int, value: Any) -> None:
        super().__init__(
            message=f"alpha*dM = {value} >= 1 at time {time}, outcome {outcome}",
            error_code="JUMP_CONDITION_VIOLATED",
            context={"time": time, "outcome": outcome, "value": value},
        )


# ============================================================================
# Measure Errors
# ============================================================================


class MeasureError(PrpLabError):
    """Base class for measure and polytope errors."""

    def __init__(
        self,
        message: str,
        error_code: str,
        context: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None,
    ) -> None:
        super().__init__(
            message=message,
            error_code=error_code,
            error_type="measure_error",
            context=context,
            suggestion=suggestion,
        )


class InfeasibleSystemError(MeasureError):
    """Raised when a martingale-measure constraint system has no solution."""

    def __init__(self) -> None:
        super().__init__(
            message="The martingale-measure constraint system is infeasible",
            error_code="INFEASIBLE_SYSTEM",
        )


class NotInPolytopeError(MeasureError):
    """Raised when a measure does not solve the polytope constraints."""

    def __init__(self, reason: str) -> None:
        super().__init__(
            message=f"Measure is not in the polytope: {reason}",
            error_code="NOT_IN_POLYTOPE",
            context={"reason": reason},
        )


class NotEquivalentError(MeasureError):
    """Raised when a measure required to be equivalent has null outcomes."""

    def __init__(self, reason: str) -> None:
        super().__init__(
            message=f"Measure is not equivalent to the base measure: {reason}",
            error_code="NOT_EQUIVALENT",
            context={"reason": reason},
        )


class NotADensityError(MeasureError):
    """Raised when a random variable is not a strictly positive unit-mean density."""

    def __init__(self, reason: str) -> None:
        super().__init__(
            message=f"Not a density: {reason}",
            error_code="NOT_A_DENSITY",
            context={"reason": reason},
        )


class FiltrationsNotIndependentError(MeasureError):
    """Raised when two filtrations are required to be independent but are not."""

    def __init__(self) -> None:
        super().__init__(
            message="The filtrations are not independent under the base measure",
            error_code="FILTRATIONS_NOT_INDEPENDENT",
        )


class NoEMMError(MeasureError):
    """Raised when an operation requires an equivalent martingale measure."""

    def __init__(self) -> None:
        super().__init__(
            message="No equivalent martingale measure exists",
            error_code="NO_EMM",
            suggestion="Check the model for an arbitrage opportunity",
        )


# ============================================================================
# Hypothesis Errors
# ============================================================================


class HypothesisViolatedError(PrpLabError):
    """Raised when a report is requested outside the hypotheses of its statement."""

    def __init__(self, hypothesis: str, reason: Optional[str] = None) -> None:
        message = f"Hypothesis '{hypothesis}' is violated"
        context: Dict[str, Any] = {"hypothesis": hypothesis}
        if reason:
            message += f": {reason}"
            context["reason"] = reason
        super().__init__(
            message=message,
            error_code="HYPOTHESIS_VIOLATED",
            error_type="hypothesis_error",
            context=context,
        )
        self.hypothesis = hypothesis


# ============================================================================
# Resource Errors
# ============================================================================


class ResourceError(PrpLabError):
    """Base class for lookups of named entities and commands."""

    pass


class UnknownEntityError(ResourceError):
    """Raised when a model does not define a referenced entity."""

    def __init__(self, kind: str, name: str) -> None:
        super().__init__(
            message=f"Unknown {kind} '{name}'",
            error_code="UNKNOWN_ENTITY",
            error_type="resource_error",
            context={"kind": kind, "name": name},
        )


class UnknownCommandError(ResourceError):
    """Raised for a command or scenario name the CLI does not know."""

    def __init__(self, name: str, known: list) -> None:
        super().__init__(
            message=f"Unknown command '{name}'",
            error_code="UNKNOWN_COMMAND",
            error_type="resource_error",
            context={"name": name, "known": known},
            suggestion=f"Use one of: {', '.join(known)}",
        )


# ============================================================================
# Error Code to Exception Mapping
# ============================================================================


ERROR_CODE_MAP = {
    "NON_POSITIVE_PROBABILITY": NonPositiveProbabilityError,
    "PROBABILITY_SUM_NOT_ONE": ProbabilitySumNotOneError,
    "PARTITION_INVALID": PartitionInvalidError,
    "FILTRATION_NOT_REFINING": FiltrationNotRefiningError,
    "DIMENSION_MISMATCH": DimensionMismatchError,
    "NOT_A_FILTRATION": NotAFiltrationError,
    "PARSE_ERROR": ModelParseError,
    "MODEL_VALIDATION_ERROR": ModelValidationError,
    "REPORT_PARSE_ERROR": ReportParseError,
    "CONFIGURATION_ERROR": ConfigurationError,
    "NOT_ADAPTED": NotAdaptedError,
    "NOT_PREDICTABLE": NotPredictableError,
    "NOT_MARTINGALE": NotMartingaleError,
    "STRUCTURE_CONDITION_FAILS": StructureConditionFailsError,
    "JUMP_CONDITION_VIOLATED": JumpConditionViolatedError,
    "INFEASIBLE_SYSTEM": InfeasibleSystemError,
    "NOT_IN_POLYTOPE": NotInPolytopeError,
    "NOT_EQUIVALENT": NotEquivalentError,
    "NOT_A_DENSITY": NotADensityError,
    "FILTRATIONS_NOT_INDEPENDENT": FiltrationsNotIndependentError,
    "NO_EMM": NoEMMError,
    "HYPOTHESIS_VIOLATED": HypothesisViolatedError,
    "UNKNOWN_ENTITY": UnknownEntityError,
    "UNKNOWN_COMMAND": UnknownCommandError,
}


def create_exception_from_error_response(error_data: Dict[str, Any]) -> PrpLabError:
    """
    Create appropriate exception from a structured error payload.

    Args:
        error_data: Payload produced by ``PrpLabError.to_dict``

    Returns:
        Appropriate PrpLabError subclass instance

    Example:
        >>> exc = create_exception_from_error_response(
        ...     {"code": "UNKNOWN_ENTITY", "message": "Unknown process 'H'",
        ...      "type": "resource_error", "context": {"kind": "process", "name": "H"}}
        ... )
        >>> isinstance(exc, UnknownEntityError)
        True
    """
    error_code = error_data.get("code", "UNKNOWN_ERROR")
    message = error_data.get("message", "An unknown error occurred")
    error_type = error_data.get("type", "unknown_error")
    context = error_data.get("context", {})
    suggestion = error_data.get("suggestion")

    exception_class = ERROR_CODE_MAP.get(error_code)

    if exception_class:
        try:
            if error_code == "UNKNOWN_ENTITY":
                return exception_class(
                    kind=context.get("kind", ""), name=context.get("name", "")
                )
            elif error_code == "UNKNOWN_COMMAND":
                return exception_class(
                    name=context.get("name", ""), known=context.get("known", [])
                )
            elif error_code == "HYPOTHESIS_VIOLATED":
                return exception_class(
                    hypothesis=context.get("hypothesis", ""), reason=context.get("reason")
                )
            elif error_code == "NOT_MARTINGALE":
                return exception_class(name=context.get("name", "process"))
            elif error_code in ("NOT_ADAPTED", "NOT_PREDICTABLE"):
                return exception_class(
                    name=context.get("name", "process"), time=context.get("time")
                )
            elif error_code == "MODEL_VALIDATION_ERROR":
                return exception_class(
                    invariant=context.get("invariant", ""),
                    reason=context.get("reason", message),
                    field=context.get("field"),
                )
            elif error_code == "REPORT_PARSE_ERROR":
                return exception_class(
                    reason=context.get("reason", message), line=context.get("line")
                )
            elif error_code == "CONFIGURATION_ERROR":
                return exception_class(
                    config_key=context.get("config_key", ""),
                    reason=context.get("reason", message),
                )
            elif error_code == "PARSE_ERROR":
                return exception_class(
                    reason=context.get("reason", message),
                    line=context.get("line"),
                    column=context.get("column"),
                    field=context.get("field"),
                )
            elif error_code in (
                "INFEASIBLE_SYSTEM",
                "FILTRATIONS_NOT_INDEPENDENT",
                "NO_EMM",
            ):
                return exception_class()
            elif error_code in ("NOT_IN_POLYTOPE", "NOT_EQUIVALENT", "NOT_A_DENSITY"):
                return exception_class(reason=context.get("reason", message))
        except (TypeError, KeyError):
            pass

    return PrpLabError(
        message=message,
        error_code=error_code,
        error_type=error_type,
        context=context,
        suggestion=suggestion,
    )
