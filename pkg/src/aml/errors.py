"""
Compiler exceptions. Each carries catalogued diagnostics.
"""

from typing import List

from ..models.diagnostics import Diagnostic, sort_diagnostics


class AmlSyntaxError(Exception):
    """Raised by the lexer and parsers on the first syntax error."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


class CompilationFailed(Exception):
    """Raised when analysis or instantiation finds error diagnostics."""

    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = sort_diagnostics(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        super().__init__(f"{len(errors)} error(s): " + "; ".join(d.render() for d in errors[:3]))

    @property
    def errors(self) -> List[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]
