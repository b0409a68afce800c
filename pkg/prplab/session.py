"""
Lab Session
-----------
Context manager holding one resolved model and resolving entity
specifiers (processes, integrators, filtrations, measures) against it.
"""

import logging
import os
import re
from importlib import resources
from pathlib import Path
from typing import List, Optional, Union

from .calculus import quadratic_covariation
from .document import ModelDocument, ResolvedModel, parse_model
from .enlargement import initial_enlargement, progressive_enlargement
from .exceptions import UnknownEntityError
from .measures import measure_from_density
from .models import FiniteFilteredSpace, Measure, Partition, Process, RandomTime, RandomVariable
from .space import natural_filtration

logger = logging.getLogger(__name__)

MODELS_DIR_ENV = "PRPLAB_MODELS_DIR"

_INTEGRATOR = re.compile(r"QC\([^)]*\)|[^,\s]+")
_COVARIATION = re.compile(r"QC\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)")


def bundled_models() -> List[str]:
    """Names of the models shipped with the package, sorted."""
    directory = resources.files("prplab") / "data" / "models"
    return sorted(
        entry.name[: -len(".json")]
        for entry in directory.iterdir()
        if entry.name.endswith(".json")
    )


def read_model_text(model: Union[str, Path], models_dir: Optional[str] = None) -> str:
    """
    Text of a model given as a path or a model name.

    Names are looked up in ``models_dir`` (default: ``$PRPLAB_MODELS_DIR``)
    before the bundled directory.

    Raises:
        UnknownEntityError: If no such file or model exists
    """
    path = Path(model)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    name = str(model)
    extra = models_dir or os.getenv(MODELS_DIR_ENV)
    if extra:
        candidate = Path(extra) / f"{name}.json"
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8")
    bundled = resources.files("prplab") / "data" / "models" / f"{name}.json"
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise UnknownEntityError("model", name)


class LabSession:
    """Resolved model plus entity lookup.

    Args:
        model: Path, model name or an already parsed ModelDocument
        models_dir: Extra directory searched for model names

    Example:
        >>> with LabSession("BIN") as lab:
        ...     X = lab.process("X")
        ...     F = lab.filtration()
    """

    def __init__(
        self,
        model: Union[str, Path, ModelDocument],
        models_dir: Optional[str] = None,
    ) -> None:
        self._source = model
        self._models_dir = models_dir
        self._document: Optional[ModelDocument] = None
        self._resolved: Optional[ResolvedModel] = None

    def __enter__(self) -> "LabSession":
        self.load()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        return None

    def load(self) -> "LabSession":
        """Parse and resolve the model; idempotent."""
        if self._resolved is not None:
            return self
        if isinstance(self._source, ModelDocument):
            document = self._source
        else:
            document = parse_model(read_model_text(self._source, self._models_dir))
        self._document = document
        self._resolved = document.resolve()
        logger.debug("session loaded model %s", document.name)
        return self

    @property
    def document(self) -> ModelDocument:
        self.load()
        assert self._document is not None
        return self._document

    @property
    def model(self) -> ResolvedModel:
        self.load()
        assert self._resolved is not None
        return self._resolved

    @property
    def name(self) -> str:
        return self.model.name

    @property
    def space(self) -> FiniteFilteredSpace:
        return self.model.space

    # ------------------------------------------------------------------
    # Entities
    # ------------------------------------------------------------------

    def process(self, spec: str) -> Process:
        """A named process, or ``QC(A,B)`` for the covariation of two of them."""
        spec = spec.strip()
        match = _COVARIATION.fullmatch(spec)
        if match:
            return quadratic_covariation(self.process(match.group(1)), self.process(match.group(2)))
        found = self.model.processes.get(spec)
        if found is None:
            raise UnknownEntityError("process", spec)
        return found

    def integrators(self, spec: str) -> List[Process]:
        """Comma-separated process specifiers, e.g. ``X,Y,QC(X,Y)``."""
        names = _INTEGRATOR.findall(spec)
        if not names:
            raise UnknownEntityError("integrators", spec)
        return [self.process(name) for name in names]

    def random_variable(self, name: str) -> RandomVariable:
        found = self.model.random_variables.get(name)
        if found is None:
            raise UnknownEntityError("random variable", name)
        return found

    def random_time(self, name: str) -> RandomTime:
        found = self.model.random_times.get(name)
        if found is None:
            raise UnknownEntityError("random time", name)
        return found

    def filtration(self, spec: Optional[str] = None) -> List[Partition]:
        """
        Resolve a filtration specifier.

        Accepted forms: ``model`` (or None), ``natural:X,Y``, ``named:G``,
        ``progressive:TAU`` and ``initial:V``; the last two enlarge the
        model filtration.

        Raises:
            UnknownEntityError: For an unknown form or entity
        """
        base = list(self.space.filtration)
        if spec is None or spec == "model":
            return base
        kind, _, argument = spec.partition(":")
        if kind == "natural" and argument:
            return natural_filtration(self.integrators(argument), self.space)
        if kind == "named":
            found = self.model.filtrations.get(argument)
            if found is None:
                raise UnknownEntityError("filtration", argument)
            return list(found)
        if kind == "progressive":
            return progressive_enlargement(base, self.random_time(argument))
        if kind == "initial":
            return initial_enlargement(base, self.random_variable(argument).values)
        raise UnknownEntityError("filtration", spec)

    def measure(self, spec: Optional[str] = None) -> Measure:
        """``P`` (or None), a named measure, or ``density:V`` relative to P."""
        if spec is None or spec == "P":
            return self.space.measure
        if spec.startswith("density:"):
            return measure_from_density(self.space.measure, self.random_variable(spec[8:]))
        found = self.model.measures.get(spec)
        if found is None:
            raise UnknownEntityError("measure", spec)
        return found
