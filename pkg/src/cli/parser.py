"""
Command-Line Parser

Argument definitions for the compile, solve, run, eval, kb and suite
subcommands.
"""

import argparse

from ..models.config import BackendKind, EmbeddingKind, Strategy

EXIT_CODES_HELP = """exit codes:
  0  success (compiled, optimal, aligned or suite finished)
  1  compile errors
  2  usage error, missing input file or empty suite
  3  solve finished without an optimum
  4  loop budget exhausted without an aligned model
  5  backend credentials missing or rejected
  6  backend failure after retries
  7  internal error
"""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a value of at least 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got '{text}'")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _add_settings_arguments(parser: argparse.ArgumentParser):
    """Flags shared by run and eval; every default is None so unset flags do not override."""
    group = parser.add_argument_group("loop settings")
    group.add_argument("--config", help="JSON settings file; its values override these flags")
    group.add_argument("--model", help="backend model id (default: $OPLFORGE_MODEL or gpt-4.1)")
    group.add_argument("--budget", type=_positive_int, help="maximum loop iterations (default: 5)")
    group.add_argument("--k", type=_positive_int, help="few-shot exemplars per request (default: 3)")
    group.add_argument("--kb", dest="kb_path", help="knowledge-base directory (default: $OPLFORGE_KB_PATH or knowledge_base)")
    group.add_argument("--backend", choices=[b.value for b in BackendKind], help="LLM backend (default: openai)")
    group.add_argument("--backend-url", help="OpenAI-compatible base URL (default: $OPENAI_BASE_URL)")
    group.add_argument("--script", dest="script_path", help="JSONL replies for the scripted backend")
    group.add_argument("--rates", dest="rates_path", help="cost-rate JSON file (default: $OPLFORGE_RATES_PATH)")
    group.add_argument("--temperature", type=float, help="sampling temperature (default: 1.0)")
    group.add_argument("--strategy", choices=[s.value for s in Strategy],
                       help="prompting strategy; baselines run a single generation (default: guided)")
    group.add_argument("--embedding", choices=[e.value for e in EmbeddingKind],
                       help="embedding provider for retrieval (default: hashing)")
    group.add_argument("--embedding-url", help="OpenAI-compatible embeddings base URL")
    group.add_argument("--no-final-assessment", dest="final_assessment", action="store_false", default=None,
                       help="skip the assessment call after budget exhaustion")
    group.add_argument("--no-grammar", dest="grammar", action="store_false", default=None,
                       help="leave the language reference out of prompts")
    group.add_argument("--no-retrieval", dest="retrieval", action="store_false", default=None,
                       help="do not add retrieved exemplars to prompts")
    group.add_argument("--no-alignment", dest="alignment", action="store_false", default=None,
                       help="accept the first compiling attempt without a judge call")
    group.add_argument("--no-literate", dest="literate", action="store_false", default=None,
                       help="do not ask for comments; strip comments from exemplars")


def build_parser() -> argparse.ArgumentParser:
    """
    Build the top-level parser.

    Returns:
        argparse.ArgumentParser: parser with one subparser per command
    """
    parser = argparse.ArgumentParser(
        prog="oplforge",
        description="Compile, solve and generate OPL-style optimisation models.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for INFO, -vv for DEBUG logging (default: $OPLFORGE_LOG_LEVEL or WARNING)")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    compile_parser = subparsers.add_parser("compile", help="compile a model/data pair and print diagnostics")
    compile_parser.add_argument("model", help="model file (.mod)")
    compile_parser.add_argument("data", help="data file (.dat)")
    compile_parser.add_argument("--warnings", action="store_true", help="also print warnings")

    solve_parser = subparsers.add_parser("solve", help="compile and solve a model/data pair")
    solve_parser.add_argument("model", help="model file (.mod)")
    solve_parser.add_argument("data", help="data file (.dat)")
    solve_parser.add_argument("--emit-lp", action="store_true", help="print the LP-format export instead of solving")
    solve_parser.add_argument("--node-limit", type=_positive_int, help="branch-and-bound node limit (default: 1000000)")
    solve_parser.add_argument("--time-limit", type=_positive_float, help="solve time limit in seconds (default: 60)")
    solve_parser.add_argument("--all", dest="show_all", action="store_true", help="print zero-valued variables too")

    run_parser = subparsers.add_parser("run", help="generate a model for one problem description")
    run_parser.add_argument("problem", help="text file with the problem description")
    run_parser.add_argument("--out", dest="output_dir", help="run directory (default: runs/<problem name>)")
    _add_settings_arguments(run_parser)

    eval_parser = subparsers.add_parser("eval", help="run a benchmark suite and report accuracy and cost")
    eval_parser.add_argument("suite", help="JSONL suite with id, description, expected_objective")
    eval_parser.add_argument("--out", dest="output_dir", help="report directory (default: runs/<suite name>)")
    eval_parser.add_argument("--repetitions", type=_positive_int, default=1, help="runs per instance (default: 1)")
    eval_parser.add_argument("--parallelism", type=_positive_int, help="concurrent runs (default: 1)")
    _add_settings_arguments(eval_parser)

    kb_parser = subparsers.add_parser("kb", help="knowledge-base maintenance")
    kb_commands = kb_parser.add_subparsers(dest="kb_command", metavar="KB_COMMAND")
    kb_commands.required = True
    index_parser = kb_commands.add_parser("index", help="embed the exemplar triplets and write the cache")
    index_parser.add_argument("--kb", dest="kb_path", help="knowledge-base directory (default: $OPLFORGE_KB_PATH or knowledge_base)")
    index_parser.add_argument("--embedding", choices=[e.value for e in EmbeddingKind], default=EmbeddingKind.HASHING.value)
    index_parser.add_argument("--embedding-url", help="OpenAI-compatible embeddings base URL")
    index_parser.add_argument("--no-cache", dest="use_cache", action="store_false", help="do not write manifest.json/vectors.npy")

    suite_parser = subparsers.add_parser("suite", help="benchmark suite utilities")
    suite_commands = suite_parser.add_subparsers(dest="suite_command", metavar="SUITE_COMMAND")
    suite_commands.required = True
    convert_parser = suite_commands.add_parser("convert", help="convert a public benchmark file into a suite")
    convert_parser.add_argument("source", help=".json, .jsonl or .xlsx benchmark file")
    convert_parser.add_argument("destination", help="JSONL suite to write")
    convert_parser.add_argument("--layout", choices=["en", "qa", "ground_truth", "suite"],
                                help="source layout (default: detected from the columns)")
    convert_parser.add_argument("--prefix", help="id prefix when the source has no id column")

    return parser
