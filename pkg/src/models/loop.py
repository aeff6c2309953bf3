"""
Modelling Loop Models

Pydantic models for the state carried between loop iterations, backend
exchanges and the telemetry of a run.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from .config import DecodingParams
from .diagnostics import Diagnostic


class Attempt(BaseModel):
    """One candidate model/data pair."""
    model: str = Field(..., description="Model file text")
    data: str = Field(..., description="Data file text")


class RevisionKind(str, Enum):
    """What a revision prompt asks the backend to fix."""
    SYNTAX = "syntax"
    ALIGNMENT = "alignment"


class TaskContext(BaseModel):
    """Everything the prompts need for one request."""
    problem_text: str = Field(..., description="Natural-language problem description")
    grammar_reference: str = Field(..., description="Language reference in Markdown")
    few_shots: str = Field("", description="Formatted few-shot block, may be empty")
    last_attempt: Optional[Attempt] = Field(None)
    compiler_errors: List[Diagnostic] = Field(default_factory=list)
    assessment: Optional[str] = Field(None, description="Latest alignment assessment")

    @field_validator("grammar_reference")
    @classmethod
    def _grammar_present(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("grammar reference must be non-empty")
        return v


class AlignmentVerdict(BaseModel):
    """Judge output."""
    aligned: bool = Field(..., description="Artifacts match the problem intent")
    assessment: str = Field(..., min_length=1, description="Short critical assessment")


class ExchangeKind(str, Enum):
    """Purpose of a backend call."""
    GENERATION = "generation"
    REVISION = "revision"
    ALIGNMENT = "alignment"
    FINAL_ASSESSMENT = "final_assessment"


class BackendResponse(BaseModel):
    """Text and usage returned by a backend."""
    text: str = Field("", description="Completion text")
    prompt_tokens: int = Field(0, ge=0)
    completion_tokens: int = Field(0, ge=0)
    latency: float = Field(0.0, ge=0.0, description="Seconds")
    estimated: bool = Field(False, description="Token counts estimated from text length")


class BackendExchange(BaseModel):
    """One request/response pair, as written to the audit log."""
    iteration: int = Field(..., ge=1)
    kind: ExchangeKind
    system: str = Field("", description="System text")
    user: str = Field(..., description="User text")
    params: DecodingParams = Field(default_factory=DecodingParams)
    response: BackendResponse


class Telemetry(BaseModel):
    """Per-request usage totals."""
    iterations: int = Field(0, ge=0)
    prompt_tokens: int = Field(0, ge=0)
    completion_tokens: int = Field(0, ge=0)
    latency: float = Field(0.0, ge=0.0, description="Wall-clock seconds")
    cost: float = Field(0.0, ge=0.0, description="Dollars")

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


class LoopOutcome(str, Enum):
    """How a run ended."""
    ALIGNED = "aligned"
    BUDGET_EXHAUSTED = "budgetExhausted"


class IterationRecord(BaseModel):
    """What happened in one iteration."""
    iteration: int = Field(..., ge=1)
    revision: Optional[RevisionKind] = Field(None, description="None for the first generation")
    parsed: bool = Field(..., description="Response held a valid model/data object")
    compiled: bool = Field(False)
    error_count: int = Field(0, ge=0)
    aligned: Optional[bool] = Field(None, description="None when no alignment call was made")


class LoopResult(BaseModel):
    """Result of one modelling run."""
    model_text: str = Field("", description="Last model text")
    data_text: str = Field("", description="Last data text")
    final_assessment: str = Field("", description="Last assessment text")
    telemetry: Telemetry = Field(default_factory=Telemetry)
    outcome: LoopOutcome
    compiled: bool = Field(False, description="Last attempt compiled")
    iterations: List[IterationRecord] = Field(default_factory=list)
    exchanges: List[BackendExchange] = Field(default_factory=list)
