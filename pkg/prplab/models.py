"""
prplab Models
-------------
Pydantic value types for finite filtered probability spaces, processes,
measures and the reports produced by the library.

All values are immutable after construction and hold exact rationals
(``fractions.Fraction``). Numeric fields accept ints, Fractions and rational
strings such as ``"1/3"`` and are normalised to Fractions on construction.
"""

from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import (
    DimensionMismatchError,
    PartitionInvalidError,
    ProbabilitySumNotOneError,
    ValidationError,
)

Rational = Union[Fraction, int, str]


def to_fraction(value: Any) -> Fraction:
    """Convert an int, Fraction or rational string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Canonical string form of a rational (``"p/q"`` or ``"p"``)."""
    return str(value)


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ============================================================================
# Partitions and spaces
# ============================================================================


class Partition(_Frozen):
    """
    Partition of the outcome indices ``0..n-1`` into disjoint nonempty blocks.

    Blocks are stored canonically: each block sorted, blocks ordered by their
    least element. Finite sigma-algebras are represented by their atoms, so
    inclusion of sigma-algebras is refinement of partitions.

    Attributes:
        blocks: Canonically ordered blocks of outcome indices
    """

    blocks: Tuple[Tuple[int, ...], ...] = Field(
        ..., description="Disjoint nonempty blocks covering range(n)"
    )

    @model_validator(mode="before")
    @classmethod
    def _canonical(cls, data: Any) -> Any:
        if isinstance(data, dict) and "blocks" in data:
            raw = [list(block) for block in data["blocks"]]
            seen: set = set()
            for block in raw:
                if not block:
                    raise PartitionInvalidError("empty block", raw)
                for index in block:
                    if not isinstance(index, int) or index < 0:
                        raise PartitionInvalidError(f"bad outcome index {index!r}", raw)
                    if index in seen:
                        raise PartitionInvalidError(
                            f"outcome {index} appears in two blocks", raw
                        )
                    seen.add(index)
            if seen != set(range(len(seen))):
                raise PartitionInvalidError(
                    f"blocks do not cover outcomes 0..{len(seen) - 1}", raw
                )
            blocks = sorted((tuple(sorted(block)) for block in raw), key=lambda b: b[0])
            return {**data, "blocks": tuple(blocks)}
        return data

    @property
    def size(self) -> int:
        """Number of outcomes covered."""
        return sum(len(block) for block in self.blocks)

    def labels(self) -> Tuple[int, ...]:
        """Block index of every outcome."""
        out = [0] * self.size
        for position, block in enumerate(self.blocks):
            for index in block:
                out[index] = position
        return tuple(out)

    def block_of(self, outcome: int) -> Tuple[int, ...]:
        """Block containing ``outcome``."""
        return self.blocks[self.labels()[outcome]]


class Measure(_Frozen):
    """Probability weights per outcome (nonnegative, summing to one)."""

    weights: Tuple[Fraction, ...] = Field(..., description="Weight per outcome")

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        return tuple(to_fraction(v) for v in value)

    @model_validator(mode="after")
    def _check(self) -> "Measure":
        for index, weight in enumerate(self.weights):
            if weight < 0:
                raise ValidationError(
                    f"Weight of outcome {index} is negative ({weight})",
                    error_code="NEGATIVE_WEIGHT",
                    context={"outcome": index, "weight": weight},
                )
        total = sum(self.weights, Fraction(0))
        if total != 1:
            raise ProbabilitySumNotOneError(total)
        return self

    @classmethod
    def of(cls, weights: Sequence[Rational]) -> "Measure":
        return cls(weights=tuple(weights))

    @property
    def size(self) -> int:
        return len(self.weights)

    def support(self) -> Tuple[int, ...]:
        """Outcomes carrying positive weight."""
        return tuple(i for i, w in enumerate(self.weights) if w > 0)

    def is_equivalent(self) -> bool:
        """True when every outcome is charged (equivalence to a full-support base)."""
        return all(w > 0 for w in self.weights)

    def mass(self, block: Sequence[int]) -> Fraction:
        return sum((self.weights[i] for i in block), Fraction(0))

    def expectation(self, rv: "RandomVariable") -> Fraction:
        if len(rv.values) != self.size:
            raise DimensionMismatchError("random variable", self.size, len(rv.values))
        return sum((w * v for w, v in zip(self.weights, rv.values)), Fraction(0))

    def density(self, base: "Measure") -> "RandomVariable":
        """Radon-Nikodym density with respect to a full-support ``base``."""
        return RandomVariable(
            values=tuple(q / p for q, p in zip(self.weights, base.weights))
        )


class FiniteFilteredSpace(_Frozen):
    """
    Finite filtered probability space (outcomes, P, horizon, filtration).

    Attributes:
        outcomes: Outcome labels
        measure: Base measure P, strictly positive on every outcome
        horizon: Last time T of the grid 0..T
        filtration: T+1 partitions, refining weakly in time
    """

    outcomes: Tuple[str, ...] = Field(..., description="Outcome labels")
    measure: Measure = Field(..., description="Full-support base measure")
    horizon: int = Field(..., ge=0, description="Time horizon T")
    filtration: Tuple[Partition, ...] = Field(
        ..., description="Partition at each time 0..T"
    )

    @property
    def size(self) -> int:
        return len(self.outcomes)

    @property
    def times(self) -> range:
        return range(self.horizon + 1)

    @property
    def terminal(self) -> Partition:
        return self.filtration[-1]


# ============================================================================
# Processes and random variables
# ============================================================================


def _scalar_or_values(other: Any, size: int) -> Tuple[Fraction, ...]:
    if isinstance(other, RandomVariable):
        if len(other.values) != size:
            raise DimensionMismatchError("random variable", size, len(other.values))
        return other.values
    value = to_fraction(other)
    return (value,) * size


class RandomVariable(_Frozen):
    """Rational value per outcome, with pointwise arithmetic."""

    values: Tuple[Fraction, ...] = Field(..., description="Value per outcome")

    @field_validator("values", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        return tuple(to_fraction(v) for v in value)

    @classmethod
    def of(cls, values: Sequence[Rational]) -> "RandomVariable":
        return cls(values=tuple(values))

    @classmethod
    def constant(cls, size: int, value: Rational = 0) -> "RandomVariable":
        return cls(values=(to_fraction(value),) * size)

    @classmethod
    def indicator(cls, size: int, event: Sequence[int]) -> "RandomVariable":
        members = set(event)
        return cls(values=tuple(Fraction(int(i in members)) for i in range(size)))

    @property
    def size(self) -> int:
        return len(self.values)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def __getitem__(self, index: int) -> Fraction:
        return self.values[index]

    def __add__(self, other: Any) -> "RandomVariable":
        rhs = _scalar_or_values(other, self.size)
        return RandomVariable(values=tuple(a + b for a, b in zip(self.values, rhs)))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RandomVariable":
        rhs = _scalar_or_values(other, self.size)
        return RandomVariable(values=tuple(a - b for a, b in zip(self.values, rhs)))

    def __rsub__(self, other: Any) -> "RandomVariable":
        return (-self) + other

    def __mul__(self, other: Any) -> "RandomVariable":
        rhs = _scalar_or_values(other, self.size)
        return RandomVariable(values=tuple(a * b for a, b in zip(self.values, rhs)))

    __rmul__ = __mul__

    def __neg__(self) -> "RandomVariable":
        return RandomVariable(values=tuple(-a for a in self.values))


class Process(_Frozen):
    """
    Outcome x time matrix of rationals for times 0..T.

    Row ``i`` is the trajectory of outcome ``i``.
    """

    values: Tuple[Tuple[Fraction, ...], ...] = Field(
        ..., description="One row per outcome, one column per time 0..T"
    )

    @field_validator("values", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        rows = tuple(tuple(to_fraction(v) for v in row) for row in value)
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise DimensionMismatchError(
                "process rows", len(rows[0]), sorted({len(r) for r in rows})
            )
        return rows

    @classmethod
    def of(cls, rows: Sequence[Sequence[Rational]]) -> "Process":
        return cls(values=tuple(tuple(row) for row in rows))

    @classmethod
    def constant(cls, size: int, horizon: int, value: Rational = 0) -> "Process":
        v = to_fraction(value)
        return cls(values=tuple((v,) * (horizon + 1) for _ in range(size)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction]]) -> "Process":
        return cls(values=tuple(zip(*columns)))

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def horizon(self) -> int:
        return len(self.values[0]) - 1 if self.values else 0

    def at(self, t: int) -> RandomVariable:
        return RandomVariable(values=tuple(row[t] for row in self.values))

    def increment(self, t: int) -> RandomVariable:
        """X_t - X_{t-1} for t >= 1."""
        return RandomVariable(values=tuple(row[t] - row[t - 1] for row in self.values))

    def terminal(self) -> RandomVariable:
        return self.at(self.horizon)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.values for v in row)

    def _combine(self, other: Any, op: Callable[[Fraction, Fraction], Fraction]) -> "Process":
        if isinstance(other, Process):
            if (other.size, other.horizon) != (self.size, self.horizon):
                raise DimensionMismatchError(
                    "process", (self.size, self.horizon), (other.size, other.horizon)
                )
            return Process(
                values=tuple(
                    tuple(op(a, b) for a, b in zip(r, s))
                    for r, s in zip(self.values, other.values)
                )
            )
        scalar = to_fraction(other)
        return Process(
            values=tuple(tuple(op(a, scalar) for a in row) for row in self.values)
        )

    def __add__(self, other: Any) -> "Process":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: Any) -> "Process":
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other: Any) -> "Process":
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self) -> "Process":
        return self * -1


class Integrand(_Frozen):
    """
    Predictable process: column ``t-1`` holds the value used over (t-1, t].

    Use ``at(t)`` with ``t`` in ``1..T``.
    """

    values: Tuple[Tuple[Fraction, ...], ...] = Field(
        ..., description="One row per outcome, one column per time 1..T"
    )

    @field_validator("values", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        rows = tuple(tuple(to_fraction(v) for v in row) for row in value)
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise DimensionMismatchError(
                "integrand rows", len(rows[0]), sorted({len(r) for r in rows})
            )
        return rows

    @classmethod
    def of(cls, rows: Sequence[Sequence[Rational]]) -> "Integrand":
        return cls(values=tuple(tuple(row) for row in rows))

    @classmethod
    def constant(cls, size: int, horizon: int, value: Rational = 1) -> "Integrand":
        v = to_fraction(value)
        return cls(values=tuple((v,) * horizon for _ in range(size)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction]]) -> "Integrand":
        return cls(values=tuple(zip(*columns)))

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def horizon(self) -> int:
        return len(self.values[0]) if self.values else 0

    def at(self, t: int) -> RandomVariable:
        return RandomVariable(values=tuple(row[t - 1] for row in self.values))

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.values for v in row)


class RandomTime(_Frozen):
    """Integer time in ``0..T`` per outcome."""

    values: Tuple[int, ...] = Field(..., description="Time per outcome")

    @field_validator("values")
    @classmethod
    def _nonnegative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(v < 0 for v in value):
            raise ValidationError(
                "Random times must be nonnegative",
                error_code="NEGATIVE_TIME",
                context={"values": list(value)},
            )
        return value

    @classmethod
    def of(cls, values: Sequence[int]) -> "RandomTime":
        return cls(values=tuple(values))


# ============================================================================
# Calculus, measures and representation values
# ============================================================================


class Decomposition(_Frozen):
    """Doob decomposition X = X_0 + M + A."""

    initial: RandomVariable = Field(..., description="X_0 per outcome")
    martingale_part: Process = Field(..., description="M with M_0 = 0")
    drift_part: Process = Field(..., description="Predictable A with A_0 = 0")

    def total_variation(self) -> Process:
        """|A|_t = sum over s <= t of |A_s - A_{s-1}|."""
        a = self.drift_part
        columns = [[Fraction(0)] * a.size]
        for t in range(1, a.horizon + 1):
            step = a.increment(t).values
            columns.append([c + abs(d) for c, d in zip(columns[-1], step)])
        return Process.from_columns(columns)


class StructureData(_Frozen):
    """Structure condition A = integral of alpha d<M>."""

    alpha: Integrand
    predictable_qv: Process
    satisfied: bool


class MeasurePolytope(_Frozen):
    """
    Constraint system {A q = b, q >= 0}. The last row of ``constraint_matrix``
    is the normalisation row of ones.
    """

    constraint_matrix: Tuple[Tuple[Fraction, ...], ...]
    rhs: Tuple[Fraction, ...]
    outcome_count: int

    def residual(self, weights: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        return tuple(
            sum((a * q for a, q in zip(row, weights)), Fraction(0)) - b
            for row, b in zip(self.constraint_matrix, self.rhs)
        )

    def contains(self, weights: Sequence[Fraction]) -> bool:
        return (
            len(weights) == self.outcome_count
            and all(q >= 0 for q in weights)
            and all(r == 0 for r in self.residual(weights))
        )


class SpanBasis(_Frozen):
    """Independent terminal values of stochastic integrals."""

    basis_vectors: Tuple[RandomVariable, ...]
    dimension: int


class RepresentationResult(_Frozen):
    """
    H = constant + sum_j (integral of integrand_j d integrator_j)_T + residual.

    ``coordinates`` lists the coefficients of the elementary integrands
    (integrator, time, block) in the order they were generated.
    """

    constant: Fraction
    integrands: Tuple[Integrand, ...]
    reconstruction: RandomVariable
    residual: RandomVariable
    integrands_unique: bool
    coordinates: Tuple[Fraction, ...] = ()

    @property
    def exact(self) -> bool:
        """True when the target is represented with zero residual."""
        return self.residual.is_zero()


class EnlargementReport(_Frozen):
    """First strict inclusion time of an enlargement."""

    u: Optional[int]
    u_is_min: bool
    strict_times: Tuple[int, ...]
    g0_trivial: bool
    strict_after_u: bool = Field(
        True, description="Strict inclusion holds at every t in (u, T]"
    )
    violations: Tuple[int, ...] = Field(
        (), description="Times in (u, T] without strict inclusion"
    )


class TheoremReport(_Frozen):
    """
    Checklist produced by a theorem-level report.

    Attributes:
        name: Short statement name
        hypotheses: Hypothesis name -> verdict
        conclusions: Conclusion name -> verdict
        dimensions: Named span dimensions
        values: Named witness values rendered as rational strings
    """

    name: str
    hypotheses: Dict[str, bool] = Field(default_factory=dict)
    conclusions: Dict[str, bool] = Field(default_factory=dict)
    dimensions: Dict[str, int] = Field(default_factory=dict)
    values: Dict[str, str] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.hypotheses.values()) and all(self.conclusions.values())


class WitnessReport(TheoremReport):
    """PRP-loss witness for an enlargement; ``witness`` is None when absent."""

    witness: Optional[RandomVariable] = None
    block: Optional[Tuple[int, ...]] = None
    u: Optional[int] = None
    codimension: Optional[int] = None
    failed_hypothesis: Optional[str] = None


class ImmersionReport(TheoremReport):
    """Both sides of the immersion equivalence."""

    condition_i: bool
    condition_ii: bool


class MeasureVerdict(_Frozen):
    """Extremality and its characterisation for one martingale measure."""

    weights: Tuple[Fraction, ...]
    extremal: bool
    f0_trivial: bool
    prp: bool

    @property
    def consistent(self) -> bool:
        return self.extremal == (self.f0_trivial and self.prp)


class FtapReport(TheoremReport):
    """Uniqueness / completeness / extremality report."""

    unique: bool
    complete: bool
    measures: Tuple[MeasureVerdict, ...] = ()


# ============================================================================
# Scenarios
# ============================================================================


class ScenarioReport(BaseModel):
    """
    Result of a command or builtin scenario run.

    ``verdict`` is ``"pass"`` only if every hypothesis and every conclusion
    holds exactly.
    """

    name: str = Field(..., description="Scenario or command name")
    model: str = Field(..., description="Model the scenario was run on")
    hypotheses: Dict[str, bool] = Field(default_factory=dict)
    conclusions: Dict[str, bool] = Field(default_factory=dict)
    witness: Dict[str, str] = Field(default_factory=dict)
    verdict: str = Field("pass", description="pass or fail")

    @classmethod
    def from_checks(
        cls,
        name: str,
        model: str,
        hypotheses: Optional[Dict[str, bool]] = None,
        conclusions: Optional[Dict[str, bool]] = None,
        witness: Optional[Dict[str, str]] = None,
    ) -> "ScenarioReport":
        hypotheses = hypotheses or {}
        conclusions = conclusions or {}
        ok = all(hypotheses.values()) and all(conclusions.values())
        return cls(
            name=name,
            model=model,
            hypotheses=hypotheses,
            conclusions=conclusions,
            witness=witness or {},
            verdict="pass" if ok else "fail",
        )

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


class ScenarioDefinition(BaseModel):
    """
    Descriptor of a builtin scenario.

    Attributes:
        name: Unique scenario identifier
        title: Statement being reproduced
        roles: Role name -> entity kind the scenario binds (process, random_time, ...)
        hypotheses: Names of the hypotheses evaluated
        conclusions: Names of the conclusions evaluated
        model: Bundled model the scenario runs on by default
        aliases: Alternative names accepted by the CLI
    """

    name: str = Field(..., description="Unique scenario identifier")
    title: str = Field(..., description="Statement being reproduced")
    roles: Dict[str, str] = Field(default_factory=dict)
    hypotheses: List[str] = Field(default_factory=list)
    conclusions: List[str] = Field(default_factory=list)
    model: str = Field(..., description="Bundled model name")
    aliases: List[str] = Field(default_factory=list)


class Scenario(BaseModel):
    """Scenario definition plus its runner."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    definition: ScenarioDefinition
    implementation: Callable[..., ScenarioReport]


class ScenarioRegistry(BaseModel):
    """Registry of scenarios keyed by name, preserving registration order."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenarios: Dict[str, Scenario] = Field(default_factory=dict)

    def add_scenario(
        self, definition: ScenarioDefinition, implementation: Callable[..., ScenarioReport]
    ) -> None:
        """
        Add a scenario to the registry.

        Args:
            definition: Scenario descriptor
            implementation: Runner taking a session and role bindings
        """
        self.scenarios[definition.name] = Scenario(
            definition=definition, implementation=implementation
        )

    def get_definitions(self) -> List[ScenarioDefinition]:
        """All descriptors in registration order."""
        return [s.definition for s in self.scenarios.values()]

    def get_scenario(self, name: str) -> Optional[Scenario]:
        """
        Get a scenario by name or alias.

        Args:
            name: Scenario name or alias

        Returns:
            Scenario or None if not found
        """
        found = self.scenarios.get(name)
        if found is not None:
            return found
        for candidate in self.scenarios.values():
            if name in candidate.definition.aliases:
                return candidate
        return None
