"""
Command Line
------------
``prplab <command> <model> [target] [options]``: dispatches commands to the
library, runs builtin scenarios and prints reports as text or JSON.
``prplab show FILE`` reads structured output back and renders it again.

Exit status: 0 when the verdict is pass, 1 when a verdict fails, 2 for any
input error.
"""

import argparse
import asyncio
import json
import logging
import os
import sys
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import BaseModel, Field
from pydantic import ValidationError as PydanticValidationError

from . import linalg
from .__version__ import __version__
from .calculus import (
    doleans_exponential,
    doob_decomposition,
    elementary_integrals,
    is_process_predictable,
    jump_condition,
    structure_alpha,
)
from .document import emit_model
from .enlargement import first_strict_time, immersion_check, is_enlargement, prp_loss_witness
from .error_handler import EXIT_INPUT_ERROR, format_error, install_exception_handler
from .exceptions import (
    ConfigurationError,
    PrpLabError,
    ReportParseError,
    StructureConditionFailsError,
    UnknownCommandError,
    UnknownEntityError,
    create_exception_from_error_response,
)
from .measures import (
    emm_set,
    extremal_points,
    find_equivalent_mm,
    first_ftap_check,
    is_unique_emm,
    measure_from_density,
    minimal_mm_check,
    mutually_non_dominated,
    pairwise_singular,
    render,
)
from .models import FiniteFilteredSpace, Process, RandomVariable, ScenarioReport
from .representation import integral_span, is_complete, represent
from .scenarios import builtin_scenarios, report_from_theorem, run_batch, run_scenario
from .session import LabSession, bundled_models
from .space import describe_partition, is_martingale, with_filtration, with_measure

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1


class OutputFormat(str, Enum):
    """Report rendering."""

    TEXT = "text"
    STRUCTURED = "structured"


class CommandOptions(BaseModel):
    """Options shared by every command."""

    target: Optional[str] = Field(None, description="Process or random variable the command acts on")
    filtration: Optional[str] = Field(None, description="Working filtration specifier")
    enlarged: Optional[str] = Field(None, description="Enlarged filtration specifier")
    integrators: Optional[str] = Field(None, description="Comma list, QC(A,B) allowed")
    measure: Optional[str] = Field(None, description="P, a named measure or density:V")
    scenario: Optional[str] = Field(None, description="Scenario name or 'all'")
    bindings: Dict[str, str] = Field(default_factory=dict, description="Role -> entity")


def _flag(value: bool) -> str:
    return str(value).lower()


def _space(lab: LabSession, options: CommandOptions) -> FiniteFilteredSpace:
    if options.measure is None:
        return lab.space
    return with_measure(lab.space, lab.measure(options.measure))


def _single_process(lab: LabSession, options: CommandOptions) -> Process:
    if options.target:
        return lab.process(options.target)
    if not lab.model.processes:
        raise UnknownEntityError("process", "<none>")
    return next(iter(lab.model.processes.values()))


def _integrators(lab: LabSession, options: CommandOptions) -> List[Process]:
    if options.integrators:
        return lab.integrators(options.integrators)
    if options.target:
        return [lab.process(options.target)]
    if not lab.model.processes:
        raise UnknownEntityError("process", "<none>")
    return list(lab.model.processes.values())


def _enlarged(lab: LabSession, options: CommandOptions):
    if not options.enlarged:
        raise UnknownEntityError("filtration", "--enlarged")
    return lab.filtration(options.enlarged)


def _target_variable(lab: LabSession, name: Optional[str]) -> RandomVariable:
    if not name:
        raise UnknownEntityError("random variable", "<none>")
    if name in lab.model.random_variables:
        return lab.random_variable(name)
    if name in lab.model.processes:
        return lab.process(name).terminal()
    raise UnknownEntityError("random variable", name)


# ============================================================================
# Commands
# ============================================================================


def _decompose(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    space = _space(lab, options)
    X = _single_process(lab, options)
    F = lab.filtration(options.filtration)
    dec = doob_decomposition(X, F, space.measure)
    M, A = dec.martingale_part, dec.drift_part
    start = Process.from_columns([dec.initial.values] * (X.horizon + 1))
    conclusions = {
        "reconstructs_X": start + M + A == X,
        "martingale_part_is_martingale": is_martingale(M, F, space.measure),
        "drift_part_predictable": is_process_predictable(A, F),
    }
    witness = {"X_0": render(dec.initial.values)}
    for t in range(1, X.horizon + 1):
        witness[f"M_{t}"] = render(M.at(t).values)
        witness[f"A_{t}"] = render(A.at(t).values)
    witness["total_variation"] = render(dec.total_variation().terminal().values)
    return ScenarioReport.from_checks("decompose", lab.name, {}, conclusions, witness)


def _structure(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    space = _space(lab, options)
    X = _single_process(lab, options)
    F = lab.filtration(options.filtration)
    dec = doob_decomposition(X, F, space.measure)
    try:
        data = structure_alpha(dec, F, space.measure)
    except StructureConditionFailsError as exc:
        return ScenarioReport.from_checks(
            "structure",
            lab.name,
            {},
            {"structure_condition": False},
            {"failure": exc.message},
        )
    witness = {}
    for t in range(1, X.horizon + 1):
        witness[f"alpha_{t}"] = render(data.alpha.at(t).values)
        witness[f"predictable_qv_{t}"] = render(data.predictable_qv.at(t).values)
    conclusions = {
        "structure_condition": data.satisfied,
        "jump_condition": jump_condition(data.alpha, dec.martingale_part),
    }
    return ScenarioReport.from_checks("structure", lab.name, {}, conclusions, witness)


def _doleans(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    space = _space(lab, options)
    X = _single_process(lab, options)
    F = lab.filtration(options.filtration)
    P = space.measure
    dec = doob_decomposition(X, F, P)
    data = structure_alpha(dec, F, P)
    L = doleans_exponential(data.alpha, dec.martingale_part)
    Q = measure_from_density(P, L.terminal())
    conclusions = {
        "density_positive": all(v > 0 for v in L.terminal().values),
        "X_martingale_under_doleans_measure": is_martingale(X, F, Q),
        "doleans_measure_is_minimal": minimal_mm_check(
            Q, dec.martingale_part, with_filtration(space, F)
        ),
    }
    witness = {"density": render(L.terminal().values), "measure": render(Q.weights)}
    return ScenarioReport.from_checks("doleans", lab.name, {}, conclusions, witness)


def _emm(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    space = _space(lab, options)
    processes = _integrators(lab, options)
    F = lab.filtration(options.filtration)
    q, poly = emm_set(processes, F, space)
    found = find_equivalent_mm(poly)
    unique = found is not None and is_unique_emm(poly)
    witness = {
        "emm": "absent" if found is None else render(q.lift_measure(found).weights),
        "unique": _flag(unique),
    }
    first = first_ftap_check(processes, F, space)
    witness["no_arbitrage"] = first.values["no_arbitrage"]
    return ScenarioReport.from_checks("emm", lab.name, {}, first.conclusions, witness)


def _extremals(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    space = _space(lab, options)
    q, poly = emm_set(_integrators(lab, options), lab.filtration(options.filtration), space)
    vertices = [q.lift_measure(v) for v in extremal_points(poly)]
    equivalent = [v for v in vertices if v.is_equivalent()]
    conclusions = {
        "vertices_mutually_non_dominated": mutually_non_dominated(vertices),
        "at_most_one_equivalent_vertex": len(equivalent) <= 1,
    }
    witness = {f"vertex_{i}": render(v.weights) for i, v in enumerate(vertices)}
    witness["supports_disjoint"] = _flag(pairwise_singular(vertices))
    witness["vertices"] = str(len(vertices))
    return ScenarioReport.from_checks("extremals", lab.name, {}, conclusions, witness)


def _complete(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    integrators = _integrators(lab, options)
    F = lab.filtration(options.filtration)
    Q = lab.measure(options.measure)
    complete = is_complete(integrators, F, lab.space, Q)
    span = integral_span(integrators, F, lab.space)
    witness = {
        "complete": _flag(complete),
        "span_dimension": str(span.dimension),
        "l2_dimension": str(len(F[-1].blocks)),
    }
    conclusions = {}
    if Q.is_equivalent():
        _, poly = emm_set(integrators, F, lab.space)
        if find_equivalent_mm(poly) is not None:
            unique = is_unique_emm(poly)
            witness["unique_emm"] = _flag(unique)
            conclusions["complete_iff_unique_emm"] = complete == unique
    return ScenarioReport.from_checks("complete", lab.name, {}, conclusions, witness)


def _represent(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    H = _target_variable(lab, options.target)
    integrators = _integrators(lab, options.model_copy(update={"target": None}))
    F = lab.filtration(options.filtration)
    Q = lab.measure(options.measure)
    result = represent(H, integrators, F, lab.space, Q)
    generators = [(Fraction(1),) * lab.space.size]
    generators += [g.values for _, g in elementary_integrals(integrators, F)]
    conclusions = {
        "residual_orthogonal_to_span": all(
            linalg.weighted_dot(result.residual.values, g, Q.weights) == 0 for g in generators
        )
    }
    witness = {
        "representable": _flag(result.exact),
        "integrands_unique": _flag(result.integrands_unique),
        "constant": str(result.constant),
    }
    for j, xi in enumerate(result.integrands):
        for t in range(1, xi.horizon + 1):
            witness[f"integrand_{j}_{t}"] = render(xi.at(t).values)
    witness["residual"] = render(result.residual.values)
    return ScenarioReport.from_checks("represent", lab.name, {}, conclusions, witness)


def _enlarge(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    F = lab.filtration(options.filtration)
    G = _enlarged(lab, options)
    report = first_strict_time(F, G)
    witness = {
        "is_enlargement": _flag(is_enlargement(F, G)),
        "u": "absent" if report.u is None else str(report.u),
        "strict_times": " ".join(str(t) for t in report.strict_times),
        "g0_trivial": _flag(report.g0_trivial),
        "strict_after_u": _flag(report.strict_after_u),
    }
    if report.u is not None:
        witness["F_u"] = describe_partition(F[report.u], lab.space)
        witness["G_u"] = describe_partition(G[report.u], lab.space)
    return ScenarioReport.from_checks("enlarge", lab.name, {}, {}, witness)


def _witness(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    X = _single_process(lab, options)
    F = lab.filtration(options.filtration)
    report = prp_loss_witness(X, F, _enlarged(lab, options), lab.space)
    extra = {}
    if report.block is not None:
        extra["block"] = " ".join(lab.space.outcomes[i] for i in report.block)
        extra["u"] = str(report.u)
    if report.failed_hypothesis:
        extra["failed_hypothesis"] = report.failed_hypothesis
    return report_from_theorem("witness", lab, report, **extra)


def _immersion(lab: LabSession, options: CommandOptions) -> ScenarioReport:
    F = lab.filtration(options.filtration)
    report = immersion_check(F, _enlarged(lab, options), lab.measure(options.measure), lab.space)
    witness = {
        "condition_i": _flag(report.condition_i),
        "condition_ii": _flag(report.condition_ii),
    }
    return ScenarioReport.from_checks("immersion", lab.name, {}, report.conclusions, witness)


COMMANDS: Dict[str, Callable[[LabSession, CommandOptions], ScenarioReport]] = {
    "decompose": _decompose,
    "structure": _structure,
    "doleans": _doleans,
    "emm": _emm,
    "extremals": _extremals,
    "complete": _complete,
    "represent": _represent,
    "enlarge": _enlarge,
    "witness": _witness,
    "immersion": _immersion,
}

KNOWN_COMMANDS = [*COMMANDS, "scenario", "list", "emit", "show"]


def run_command(
    command: str, model: Optional[str], options: Optional[CommandOptions] = None
) -> ScenarioReport:
    """
    Run one command against a model.

    Args:
        command: Command name (``scenario`` runs ``options.scenario``)
        model: Model path or name; optional for ``scenario``
        options: Command options

    Returns:
        ScenarioReport for the command

    Raises:
        UnknownCommandError: For an unknown command or scenario
        UnknownEntityError: If the command references an undefined entity
    """
    options = options or CommandOptions()
    if command == "scenario":
        if not options.scenario:
            raise UnknownCommandError("<none>", [d.name for d in builtin_scenarios()])
        return run_scenario(options.scenario, model, options.bindings)
    handler = COMMANDS.get(command)
    if handler is None:
        raise UnknownCommandError(command, KNOWN_COMMANDS)
    if model is None:
        raise UnknownEntityError("model", "<none>")
    with LabSession(model) as lab:
        logger.debug("running %s on %s", command, lab.name)
        return handler(lab, options)


# ============================================================================
# Rendering
# ============================================================================


def render_text(report: ScenarioReport) -> str:
    """Human-readable checklist."""
    lines = [f"{report.name} on {report.model}"]
    for title, checks in (("hypotheses", report.hypotheses), ("conclusions", report.conclusions)):
        if checks:
            lines.append(f"{title}:")
            lines.extend(f"  [{'pass' if ok else 'FAIL'}] {name}" for name, ok in checks.items())
    if report.witness:
        lines.append("witness:")
        width = max(len(key) for key in report.witness)
        lines.extend(f"  {key:<{width}}  {value}" for key, value in report.witness.items())
    lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines)


def render_structured(reports: Sequence[ScenarioReport]) -> str:
    """JSON text; a single report is emitted as an object, a batch as a list."""
    payload = [report.model_dump() for report in reports]
    return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2)


def read_structured(text: str) -> List[ScenarioReport]:
    """
    Read back output written with ``--format structured``.

    Args:
        text: A report object, a list of reports or an ``{"error": ...}`` payload

    Returns:
        The reports, in order

    Raises:
        PrpLabError: The recorded error, rebuilt from an error payload
        ReportParseError: If the text is not structured prplab output
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportParseError(exc.msg, line=exc.lineno) from None
    if isinstance(payload, dict) and "error" in payload:
        if not isinstance(payload["error"], dict):
            raise ReportParseError("'error' must be an object")
        raise create_exception_from_error_response(payload["error"])
    items = payload if isinstance(payload, list) else [payload]
    if not items:
        raise ReportParseError("no reports")
    try:
        return [ScenarioReport.model_validate(item) for item in items]
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ReportParseError(f"{where}: {first['msg']}" if where else first["msg"]) from None


def _read_source(source: Optional[str]) -> str:
    if not source:
        raise UnknownEntityError("report", "<none>")
    if source == "-":
        return sys.stdin.read()
    try:
        with open(source, encoding="utf-8") as handle:
            return handle.read()
    except OSError:
        raise UnknownEntityError("report", source) from None


def _render_listing(fmt: OutputFormat) -> str:
    definitions = builtin_scenarios()
    models = bundled_models()
    if fmt is OutputFormat.STRUCTURED:
        return json.dumps(
            {"scenarios": [d.model_dump() for d in definitions], "models": models}, indent=2
        )
    width = max(len(d.name) for d in definitions)
    lines = ["scenarios:"]
    for d in definitions:
        aliases = f" (alias {', '.join(d.aliases)})" if d.aliases else ""
        lines.append(f"  {d.name:<{width}}  {d.model:<10}  {d.title}{aliases}")
    lines.append("models:")
    lines.extend(f"  {name}" for name in models)
    return "\n".join(lines)


# ============================================================================
# Entry point
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prplab",
        description="Exact-rational checks of representation properties on finite filtered spaces.",
    )
    parser.add_argument("command", help=f"One of: {', '.join(KNOWN_COMMANDS)}")
    parser.add_argument(
        "model", nargs="?", help="Model file or bundled model name; for show, a report file or -"
    )
    parser.add_argument("target", nargs="?", help="Process or random variable")
    parser.add_argument("--filtration", help="model | natural:X,Y | named:G | progressive:T | initial:V")
    parser.add_argument("--enlarged", help="Enlarged filtration specifier")
    parser.add_argument("--integrators", help="Comma list of processes, QC(A,B) allowed")
    parser.add_argument("--measure", help="P | measure name | density:V")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat])
    parser.add_argument("--scenario", help="Scenario name or 'all'")
    parser.add_argument(
        "--bind", action="append", default=[], metavar="ROLE=ENTITY", help="Rebind a scenario role"
    )
    parser.add_argument("--parallel", action="store_true", help="Run 'all' scenarios concurrently")
    parser.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging threshold"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _bindings(raw: Sequence[str]) -> Dict[str, str]:
    out = {}
    for item in raw:
        role, sep, entity = item.partition("=")
        if not sep or not role or not entity:
            raise UnknownEntityError("binding", item)
        out[role] = entity
    return out


def _configure_logging(level: Optional[str]) -> None:
    name = (level or os.getenv("PRPLAB_LOG_LEVEL") or "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _output_format(flag: Optional[str]) -> OutputFormat:
    raw = flag or os.getenv("PRPLAB_FORMAT") or OutputFormat.TEXT.value
    try:
        return OutputFormat(raw)
    except ValueError:
        choices = ", ".join(f.value for f in OutputFormat)
        raise ConfigurationError("PRPLAB_FORMAT", f"'{raw}' is not one of {choices}") from None


def _execute(args: argparse.Namespace) -> List[ScenarioReport]:
    model, target, scenario = args.model, args.target, args.scenario
    if args.command == "scenario" and not scenario:
        # prplab scenario NAME [MODEL]
        scenario, model, target = model, target, None
    options = CommandOptions(
        target=target,
        filtration=args.filtration,
        enlarged=args.enlarged,
        integrators=args.integrators,
        measure=args.measure,
        scenario=scenario,
        bindings=_bindings(args.bind),
    )
    if args.command == "scenario" and scenario == "all":
        names = [d.name for d in builtin_scenarios()]
        if args.parallel:
            return asyncio.run(run_batch(names))
        return [run_scenario(name) for name in names]
    return [run_command(args.command, model, options)]


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI entry point.

    Returns:
        0 when every verdict passes, 1 when one fails, 2 on input errors
    """
    install_exception_handler()
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_level)
    fmt = OutputFormat.TEXT
    try:
        fmt = _output_format(args.format)
        if args.command == "list":
            print(_render_listing(fmt))
            return EXIT_PASS
        if args.command == "emit":
            with LabSession(args.model or "") as lab:
                sys.stdout.write(emit_model(lab.document))
            return EXIT_PASS
        if args.command == "show":
            reports = read_structured(_read_source(args.model))
        else:
            reports = _execute(args)
    except PrpLabError as exc:
        if fmt is OutputFormat.STRUCTURED:
            print(json.dumps({"error": exc.to_dict()}, indent=2))
        else:
            print(format_error(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR

    if fmt is OutputFormat.STRUCTURED:
        print(render_structured(reports))
    else:
        print("\n\n".join(render_text(report) for report in reports))
    return EXIT_PASS if all(report.passed for report in reports) else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
