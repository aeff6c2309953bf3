"""
Compile Facade

This module runs the whole front end on a model/data pair: lexing, parsing,
semantic analysis and expansion. Failures are returned as data.
"""

import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .errors import AmlSyntaxError, CompilationFailed
from .instantiate import expand
from .lexer import tokenize
from .parser import parse_data, parse_model
from .semantics import analyze
from ..models.diagnostics import Diagnostic, SourceKind, render_diagnostics, sort_diagnostics
from ..models.flat import FlatModel, NameMap

# Setup logging
logger = logging.getLogger(__name__)


class CompileOutcome(BaseModel):
    """Compile result b and diagnostics E; compiled is true iff no errors."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    compiled: bool = Field(..., description="True iff no error-severity diagnostics")
    diagnostics: List[Diagnostic] = Field(default_factory=list, description="Errors and warnings, model file first")
    flat: Optional[FlatModel] = Field(None, description="Flat programme when compiled")
    name_map: Optional[NameMap] = Field(None, description="Flat positions to source names")

    @property
    def errors(self) -> List[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    @property
    def warnings(self) -> List[Diagnostic]:
        return [d for d in self.diagnostics if not d.is_error]

    def render(self, include_warnings: bool = False) -> str:
        """Errors (and optionally warnings) in the line-oriented surface form."""
        return render_diagnostics(self.diagnostics if include_warnings else self.errors)


def compile_model(model_text: str, data_text: str) -> CompileOutcome:
    """
    Compile a model and its data into a flat programme.

    Args:
        model_text (str): contents of the .mod file
        data_text (str): contents of the .dat file

    Returns:
        CompileOutcome: never raises for malformed input
    """
    diagnostics: List[Diagnostic] = []
    model = data = None

    # Step 1: syntax of both files
    try:
        model = parse_model(tokenize(model_text, SourceKind.MODEL))
    except AmlSyntaxError as exc:
        diagnostics.append(exc.diagnostic)
    try:
        data = parse_data(tokenize(data_text, SourceKind.DATA))
    except AmlSyntaxError as exc:
        diagnostics.append(exc.diagnostic)
    if model is None or data is None:
        logger.info(f"Compilation failed with {len(diagnostics)} syntax error(s)")
        return CompileOutcome(compiled=False, diagnostics=sort_diagnostics(diagnostics))

    # Step 2: semantics and expansion
    try:
        typed = analyze(model, data)
        flat, name_map = expand(typed, typed.env)
    except CompilationFailed as exc:
        logger.info(f"Compilation failed with {len(exc.errors)} error(s)")
        return CompileOutcome(compiled=False, diagnostics=exc.diagnostics)

    diagnostics = sort_diagnostics(typed.warnings)
    logger.info(f"Compiled {len(flat.variables)} variables and {len(flat.constraints)} rows "
                f"with {len(diagnostics)} warning(s)")
    return CompileOutcome(compiled=True, diagnostics=diagnostics, flat=flat, name_map=name_map)
