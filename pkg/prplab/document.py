"""
Model Documents
---------------
JSON model files: parsing with positional diagnostics, resolution into a
validated space with its named entities, and byte-stable emission.

A document looks like::

    {
      "name": "BIN",
      "space": {"outcomes": ["up", "down"], "probabilities": ["1/2", "1/2"],
                "horizon": 1},
      "processes": {"X": [["1", "2"], ["1", "1/2"]]}
    }

Rationals are strings ``"p/q"`` or ``"p"`` in lowest terms; the document
stores them canonically so that emitting and re-parsing is stable.
"""

import json
import logging
import re
from collections import Counter
from fractions import Fraction
from math import gcd
from typing import Annotated, Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ModelParseError, ModelValidationError
from .models import (
    FiniteFilteredSpace,
    Measure,
    Partition,
    Process,
    RandomTime,
    RandomVariable,
)
from .space import build_space, is_adapted, is_filtration, natural_filtration, trivial_partition

logger = logging.getLogger(__name__)

RATIONAL_PATTERN = re.compile(r"-?\d+(/\d+)?")


def _rational_string(value: Any) -> str:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return str(value)
    if not isinstance(value, str) or not RATIONAL_PATTERN.fullmatch(value):
        raise ValueError(f"{value!r} is not a rational string 'p/q'")
    numerator, _, denominator = value.partition("/")
    if denominator:
        if int(denominator) == 0:
            raise ValueError(f"{value!r} has a zero denominator")
        if gcd(int(numerator), int(denominator)) != 1:
            raise ValueError(f"{value!r} is not in lowest terms")
    return str(Fraction(value))


RationalString = Annotated[str, BeforeValidator(_rational_string)]
ExplicitFiltration = List[List[List[str]]]


class SpaceSection(BaseModel):
    """Outcomes, base probabilities and horizon."""

    model_config = ConfigDict(extra="forbid")

    outcomes: List[str] = Field(..., min_length=1, description="Outcome labels")
    probabilities: List[RationalString] = Field(..., description="P per outcome")
    horizon: int = Field(..., ge=0, description="Time horizon T")


class FiltrationSection(BaseModel):
    """Either the natural filtration of named processes or explicit partitions."""

    model_config = ConfigDict(extra="forbid")

    natural: Optional[List[str]] = Field(None, description="Processes generating it")
    explicit: Optional[ExplicitFiltration] = Field(
        None, description="Blocks of outcome labels per time"
    )

    @model_validator(mode="after")
    def _one_form(self) -> "FiltrationSection":
        if (self.natural is None) == (self.explicit is None):
            raise ValueError("give exactly one of 'natural' or 'explicit'")
        return self


class ResolvedModel(BaseModel):
    """A validated space with its named processes, variables, times and measures."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    space: FiniteFilteredSpace
    processes: Dict[str, Process] = Field(default_factory=dict)
    random_variables: Dict[str, RandomVariable] = Field(default_factory=dict)
    random_times: Dict[str, RandomTime] = Field(default_factory=dict)
    filtrations: Dict[str, Tuple[Partition, ...]] = Field(default_factory=dict)
    measures: Dict[str, Measure] = Field(default_factory=dict)


class ModelDocument(BaseModel):
    """
    Parsed model file.

    Attributes:
        name: Model name
        description: Free text
        space: Space section
        filtration: Working filtration; natural filtration of every process if absent
        processes: Name -> rows of rationals, one column per time
        random_variables: Name -> rational per outcome
        random_times: Name -> integer time per outcome
        filtrations: Name -> explicit partitions, for enlargements
        measures: Name -> rational weight per outcome
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    description: str = ""
    space: SpaceSection
    filtration: Optional[FiltrationSection] = None
    processes: Dict[str, List[List[RationalString]]] = Field(default_factory=dict)
    random_variables: Dict[str, List[RationalString]] = Field(default_factory=dict)
    random_times: Dict[str, List[int]] = Field(default_factory=dict)
    filtrations: Dict[str, ExplicitFiltration] = Field(default_factory=dict)
    measures: Dict[str, List[RationalString]] = Field(default_factory=dict)

    def _explicit(self, partitions: ExplicitFiltration, field: str) -> List[Partition]:
        index = {label: i for i, label in enumerate(self.space.outcomes)}
        if len(partitions) != self.space.horizon + 1:
            raise ModelValidationError(
                "one partition per time",
                f"expected {self.space.horizon + 1} partitions, got {len(partitions)}",
                field,
            )
        out = []
        for t, blocks in enumerate(partitions):
            unknown = [label for block in blocks for label in block if label not in index]
            if unknown:
                raise ModelValidationError(
                    "known outcomes", f"unknown outcome {unknown[0]!r}", f"{field}.{t}"
                )
            listed = Counter(label for block in blocks for label in block)
            repeated = [label for label, count in listed.items() if count > 1]
            if repeated:
                raise ModelValidationError(
                    "each outcome in one block",
                    f"outcome {repeated[0]!r} is listed more than once",
                    f"{field}.{t}",
                )
            missing = [label for label in self.space.outcomes if label not in listed]
            if missing:
                raise ModelValidationError(
                    "partitions cover the outcomes",
                    f"outcome {missing[0]!r} is in no block",
                    f"{field}.{t}",
                )
            out.append(
                Partition(blocks=tuple(tuple(index[label] for label in b) for b in blocks))
            )
        if not is_filtration(out):
            raise ModelValidationError(
                "filtration refines in time", "a partition is coarser than its predecessor", field
            )
        return out

    def _vector(self, values: List[Any], field: str) -> None:
        n = len(self.space.outcomes)
        if len(values) != n:
            raise ModelValidationError(
                "one value per outcome", f"expected {n} values, got {len(values)}", field
            )

    def resolve(self) -> ResolvedModel:
        """
        Build the validated space and every named entity.

        Raises:
            ModelValidationError: If an entity breaks a named invariant
            ValidationError: If the space itself is invalid
        """
        outcomes = self.space.outcomes
        n, horizon = len(outcomes), self.space.horizon
        if len(set(outcomes)) != n:
            raise ModelValidationError("distinct outcomes", "outcome labels repeat", "space.outcomes")

        processes: Dict[str, Process] = {}
        for name, rows in self.processes.items():
            field = f"processes.{name}"
            if len(rows) != n:
                raise ModelValidationError(
                    "one row per outcome", f"expected {n} rows, got {len(rows)}", field
                )
            for i, row in enumerate(rows):
                if len(row) != horizon + 1:
                    raise ModelValidationError(
                        "one column per time",
                        f"row {i} has {len(row)} values, expected {horizon + 1}",
                        field,
                    )
            processes[name] = Process.of(rows)

        provisional = build_space(
            outcomes, self.space.probabilities, [trivial_partition(n)] * (horizon + 1), horizon
        )
        if self.filtration is None:
            working = natural_filtration(list(processes.values()), provisional)
        elif self.filtration.natural is not None:
            missing = [p for p in self.filtration.natural if p not in processes]
            if missing:
                raise ModelValidationError(
                    "known processes", f"unknown process {missing[0]!r}", "filtration.natural"
                )
            working = natural_filtration(
                [processes[p] for p in self.filtration.natural], provisional
            )
        else:
            assert self.filtration.explicit is not None
            working = self._explicit(self.filtration.explicit, "filtration.explicit")
        space = build_space(outcomes, self.space.probabilities, working, horizon)

        for name, process in processes.items():
            if not is_adapted(process, space.filtration):
                raise ModelValidationError(
                    "adapted processes", f"process {name!r} is not adapted", f"processes.{name}"
                )

        variables = {}
        for name, values in self.random_variables.items():
            self._vector(values, f"random_variables.{name}")
            variables[name] = RandomVariable.of(values)
        times = {}
        for name, ints in self.random_times.items():
            field = f"random_times.{name}"
            self._vector(ints, field)
            if any(v < 0 or v > horizon for v in ints):
                raise ModelValidationError("times within the grid", f"values outside 0..{horizon}", field)
            times[name] = RandomTime.of(ints)
        filtrations = {
            name: tuple(self._explicit(parts, f"filtrations.{name}"))
            for name, parts in self.filtrations.items()
        }
        measures = {}
        for name, weights in self.measures.items():
            self._vector(weights, f"measures.{name}")
            measures[name] = Measure.of(weights)

        logger.debug("resolved model %s: %d outcomes, horizon %d", self.name, n, horizon)
        return ResolvedModel(
            name=self.name,
            space=space,
            processes=processes,
            random_variables=variables,
            random_times=times,
            filtrations=filtrations,
            measures=measures,
        )


def parse_model(text: str) -> ModelDocument:
    """
    Parse and validate a JSON model document.

    Args:
        text: Document text

    Returns:
        ModelDocument whose entities resolve without error

    Raises:
        ModelParseError: On malformed JSON (with line and column) or a
            malformed field (with its dotted location)
        ModelValidationError: If a resolved entity breaks an invariant
        ValidationError: If the space is invalid (probabilities, partitions)

    Example:
        >>> doc = parse_model(open("BIN.json").read())
        >>> doc.resolve().space.size
        2
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise ModelParseError("top level must be an object", line=1, column=1)
    try:
        document = ModelDocument.model_validate(data)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ModelParseError(first["msg"], field=field or None) from exc
    document.resolve()
    return document


def emit_model(document: ModelDocument) -> str:
    """Canonical JSON text of a document, newline terminated."""
    payload = document.model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, indent=2) + "\n"
