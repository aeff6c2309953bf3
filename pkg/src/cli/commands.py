"""
Command Handlers

One handler per subcommand. Results go to standard output, diagnostics and
errors to standard error, and every failure is mapped to an exit code.
"""

import asyncio
import logging
import os
import sys
from enum import IntEnum
from pathlib import Path
from typing import List, Optional, Tuple

from .parser import build_parser
from ..aml.compiler import compile_model
from ..models.config import AppSettings, RateTable, SettingsError, Strategy, load_settings
from ..models.flat import SolveOptions, SolveStatus
from ..models.loop import LoopOutcome
from ..services.ai_service import BackendAuthError, BackendError, create_backend
from ..services.data_service import SuiteFormatError, benchmark_data_service
from ..services.evaluation_service import EvaluationService
from ..services.modelling_service import ModellingLoopService
from ..services.retrieval_service import KnowledgeBaseError, create_provider, index_knowledge_base
from ..solver.branch_and_bound import solve_milp
from ..solver.lp_format import export_lp_format
from ..utils.excel_utils import ReportExporter

# Setup logging
logger = logging.getLogger(__name__)

SETTINGS_FLAGS = (
    "model", "budget", "k", "kb_path", "backend", "backend_url", "script_path", "rates_path",
    "strategy", "embedding", "embedding_url", "final_assessment", "parallelism",
    "grammar", "retrieval", "alignment", "literate",
)
ENV_DEFAULTS = {
    "model": "OPLFORGE_MODEL",
    "kb_path": "OPLFORGE_KB_PATH",
    "rates_path": "OPLFORGE_RATES_PATH",
}


class ExitCode(IntEnum):
    """Process exit codes."""
    OK = 0
    COMPILE_ERRORS = 1
    USAGE = 2
    NOT_OPTIMAL = 3
    BUDGET_EXHAUSTED = 4
    AUTH = 5
    BACKEND = 6
    INTERNAL = 7


class UsageError(Exception):
    """Custom exception for unusable command-line input."""
    pass


def _read_text(path: str, what: str) -> str:
    file_path = Path(path)
    if not file_path.is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    try:
        return file_path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise UsageError(f"{what} file {path} is not UTF-8 text: {e}")


def _read_pair(model_path: str, data_path: str) -> Tuple[str, str]:
    return _read_text(model_path, "Model"), _read_text(data_path, "Data")


def _number(value: float) -> str:
    if abs(value) < 1e-9:
        value = 0.0
    return f"{value + 0.0:.10g}"


def settings_from_args(args) -> AppSettings:
    """Settings from flags, environment defaults and the --config file, file values winning."""
    overrides = {name: getattr(args, name, None) for name in SETTINGS_FLAGS}
    for name, variable in ENV_DEFAULTS.items():
        if overrides[name] is None and os.getenv(variable):
            overrides[name] = os.getenv(variable)
    if getattr(args, "temperature", None) is not None:
        overrides["decoding"] = {"temperature": args.temperature}
    return load_settings(getattr(args, "config", None), overrides)


def build_loop(settings: AppSettings) -> ModellingLoopService:
    """
    Construct the modelling loop named by the settings.

    Raises:
        KnowledgeBaseError: the knowledge-base directory is missing or empty
        SettingsError: the rate file is invalid
        BackendAuthError: no API key for the OpenAI backend
    """
    provider = create_provider(settings.embedding.value, settings.embedding_url, settings.embedding_model)
    kb = None
    if settings.strategy == Strategy.GUIDED and settings.retrieval:
        kb = index_knowledge_base(settings.kb_path, provider, use_cache=True)
    try:
        rates = RateTable.load(settings.rates_path)
    except ValueError as e:
        raise SettingsError(f"Invalid rate file {settings.rates_path}: {e}")
    backend = create_backend(settings)
    return ModellingLoopService(
        backend,
        kb=kb,
        provider=provider,
        k=settings.k,
        params=settings.decoding,
        rates=rates,
        strategy=settings.strategy,
        final_assessment=settings.final_assessment,
        grammar=settings.grammar,
        retrieval=settings.retrieval,
        alignment=settings.alignment,
        literate=settings.literate,
    )


def cmd_compile(args) -> ExitCode:
    """Compile a model/data pair; exit 0 iff there are no error diagnostics."""
    model_text, data_text = _read_pair(args.model, args.data)
    result = compile_model(model_text, data_text)
    rendered = result.render(include_warnings=args.warnings)
    if rendered:
        print(rendered, file=sys.stderr)
    if not result.compiled:
        print(f"{len(result.errors)} error(s)", file=sys.stderr)
        return ExitCode.COMPILE_ERRORS
    print(f"Compiled {args.model}: {len(result.flat.variables)} variable(s), "
          f"{len(result.flat.constraints)} constraint(s)")
    return ExitCode.OK


def cmd_solve(args) -> ExitCode:
    """Compile and solve, or print the LP export with --emit-lp."""
    model_text, data_text = _read_pair(args.model, args.data)
    result = compile_model(model_text, data_text)
    if not result.compiled:
        print(result.render(), file=sys.stderr)
        return ExitCode.COMPILE_ERRORS

    if args.emit_lp:
        sys.stdout.write(export_lp_format(result.flat))
        return ExitCode.OK

    limits = {}
    if args.node_limit:
        limits["node_limit"] = args.node_limit
    if args.time_limit:
        limits["time_limit"] = args.time_limit
    solution = solve_milp(result.flat, SolveOptions(**limits))

    print(f"Status: {solution.status.value}")
    if solution.status != SolveStatus.OPTIMAL:
        if solution.incumbent_value is not None:
            print(f"Incumbent: {_number(solution.incumbent_value)}")
        return ExitCode.NOT_OPTIMAL
    print(f"Objective: {_number(solution.objective_value)}")
    for name, value in solution.assignment.items():
        if args.show_all or value != 0.0:
            print(f"  {name} = {_number(value)}")
    return ExitCode.OK


def cmd_run(args) -> ExitCode:
    """Run the modelling loop on one problem and persist its artifacts."""
    problem = _read_text(args.problem, "Problem")
    if not problem.strip():
        raise UsageError(f"Problem file is empty: {args.problem}")
    settings = settings_from_args(args)
    loop = build_loop(settings)
    output_dir = args.output_dir or str(Path("runs") / Path(args.problem).stem)

    result = asyncio.run(loop.run(problem, budget=settings.budget, output_dir=output_dir))

    telemetry = result.telemetry
    print(f"Outcome: {result.outcome.value}")
    print(f"Iterations: {telemetry.iterations}")
    print(f"Tokens: {telemetry.prompt_tokens} prompt, {telemetry.completion_tokens} completion")
    print(f"Cost: ${telemetry.cost:.6f}")
    print(f"Artifacts: {output_dir}")
    if result.final_assessment:
        print(f"Assessment: {result.final_assessment}")
    return ExitCode.OK if result.outcome == LoopOutcome.ALIGNED else ExitCode.BUDGET_EXHAUSTED


def cmd_eval(args) -> ExitCode:
    """Run a suite and write its report."""
    benchmark_data_service.load_suite(args.suite, force_reload=True)
    settings = settings_from_args(args)
    loop = build_loop(settings)
    output_dir = args.output_dir or str(Path("runs") / Path(args.suite).stem)
    service = EvaluationService(loop, parallelism=settings.parallelism)

    report, records = asyncio.run(service.run_suite(args.suite, budget=settings.budget,
                                                    repetitions=args.repetitions, output_dir=output_dir))

    print(ReportExporter.format_table(report))
    for record in records:
        observed = "null" if record.observed_objective is None else _number(record.observed_objective)
        expected = "null" if record.expected_objective is None else _number(record.expected_objective)
        print(f"  {record.instance_id}#{record.repetition}: {record.outcome.value} "
              f"(observed {observed}, expected {expected})")
    print(f"Report: {output_dir}")
    return ExitCode.OK


def cmd_kb_index(args) -> ExitCode:
    """Index the knowledge base and write its cache."""
    kb_path = args.kb_path or os.getenv("OPLFORGE_KB_PATH") or "knowledge_base"
    provider = create_provider(args.embedding, args.embedding_url)
    kb = index_knowledge_base(kb_path, provider, use_cache=args.use_cache)
    print(f"Indexed {len(kb)} exemplar(s) from {kb_path} with {kb.provider_id}")
    return ExitCode.OK


def cmd_suite_convert(args) -> ExitCode:
    """Convert a public benchmark file into the suite format."""
    instances = benchmark_data_service.convert(args.source, args.destination, layout=args.layout,
                                               prefix=args.prefix)
    print(f"Wrote {len(instances)} instance(s) to {args.destination}")
    return ExitCode.OK


def _handler(args):
    if args.command == "kb":
        return cmd_kb_index
    if args.command == "suite":
        return cmd_suite_convert
    return {
        "compile": cmd_compile,
        "solve": cmd_solve,
        "run": cmd_run,
        "eval": cmd_eval,
    }[args.command]


def dispatch(args) -> int:
    """
    Run the selected command and map failures to exit codes.

    Returns:
        int: process exit code
    """
    try:
        return int(_handler(args)(args))
    except (FileNotFoundError, UsageError, SettingsError, SuiteFormatError, KnowledgeBaseError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return ExitCode.USAGE
    except BackendAuthError as e:
        logger.error(f"Authentication failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return ExitCode.AUTH
    except BackendError as e:
        logger.error(f"Backend failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return ExitCode.BACKEND
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}")
        print(f"Internal error: {e}", file=sys.stderr)
        return ExitCode.INTERNAL


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and dispatch without touching logging configuration."""
    args = build_parser().parse_args(argv)
    return dispatch(args)
