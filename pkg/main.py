"""
OPLForge - Command-Line Entry Point

This application compiles and solves OPL-style optimisation models and drives
an LLM through the generate, compile, assess and revise loop that writes them.
"""

import logging
import os
import sys

from dotenv import load_dotenv

# Add src to path for imports
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

# Load environment variables
load_dotenv()

from src.cli.commands import dispatch
from src.cli.parser import build_parser

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity: int = 0):
    """
    Configure the root logger.

    Args:
        verbosity (int): 0 uses $OPLFORGE_LOG_LEVEL (default WARNING), 1 INFO, 2+ DEBUG
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, os.getenv("OPLFORGE_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    # Keep HTTP client chatter out of INFO output
    for noisy in ("httpx", "openai"):
        logging.getLogger(noisy).setLevel(max(level, logging.WARNING))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
