"""
Diagnostic Models

Pydantic models for coded, line-anchored compiler diagnostics.
"""

from typing import Optional
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Severity(str, Enum):
    """Diagnostic severity levels."""
    ERROR = "error"
    WARNING = "warning"


class SourceKind(str, Enum):
    """Which input file a diagnostic points into."""
    MODEL = "model"
    DATA = "data"


class Diagnostic(BaseModel):
    """A catalogued compiler message with remedy text."""
    model_config = ConfigDict(frozen=True)

    code: str = Field(..., description="Stable catalogue code, e.g. SEM-CHAINED-CMP")
    severity: Severity = Field(Severity.ERROR, description="Error or warning")
    line: Optional[int] = Field(None, ge=1, description="1-based line in the source file")
    column: Optional[int] = Field(None, ge=1, description="1-based column in the source file")
    source: Optional[SourceKind] = Field(None, description="File the line refers to")
    message: str = Field(..., min_length=1, description="What is wrong")
    remedy: str = Field("", description="How to resolve it")

    @model_validator(mode="after")
    def _errors_carry_remedy(self) -> "Diagnostic":
        if self.severity == Severity.ERROR and not self.remedy.strip():
            raise ValueError(f"error diagnostic {self.code} requires remedy text")
        return self

    @property
    def is_error(self) -> bool:
        return self.severity == Severity.ERROR

    def render(self) -> str:
        """
        Render in the line-oriented surface form.

        Returns:
            str: e.g. "Semantic Error (Line 34): message remedy"
        """
        label = "Semantic Error" if self.is_error else "Semantic Warning"
        head = f"{label} (Line {self.line})" if self.line is not None else label
        text = f"{self.message} {self.remedy}".strip()
        return f"{head}: {text}"

    def to_record(self) -> dict:
        """Structured record form for logs and prompts."""
        return {
            "code": self.code,
            "severity": self.severity.value,
            "line": self.line,
            "source": self.source.value if self.source else None,
            "message": self.message,
            "remedy": self.remedy,
        }


def render_diagnostics(diagnostics) -> str:
    """Join rendered diagnostics one per line."""
    return "\n".join(d.render() for d in diagnostics)


def sort_diagnostics(diagnostics):
    """Order by file (model first) and then by line; stable otherwise."""
    def key(d: Diagnostic):
        file_rank = 1 if d.source == SourceKind.DATA else 0
        return (file_rank, d.line or 0, d.column or 0)
    return sorted(diagnostics, key=key)
