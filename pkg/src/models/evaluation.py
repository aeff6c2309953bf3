"""
Evaluation Models

Benchmark instances, per-run records and the aggregated suite report.
"""

from datetime import datetime
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field

from .flat import SolveStatus
from .loop import LoopOutcome, Telemetry


class Outcome(str, Enum):
    """Outcome classes of a benchmark run."""
    AC = "AC"
    CE = "CE"
    RE = "RE"
    WA = "WA"


class BenchmarkInstance(BaseModel):
    """One problem of a suite."""
    id: str = Field(..., min_length=1, description="Unique within a suite")
    description: str = Field(..., description="Problem text")
    expected_objective: Optional[float] = Field(None, description="Ground truth, null when none")


class RunRecord(BaseModel):
    """Result of one repetition of one instance."""
    instance_id: str
    repetition: int = Field(1, ge=1)
    outcome: Outcome
    observed_objective: Optional[float] = None
    expected_objective: Optional[float] = None
    compiled: bool = False
    solve_status: Optional[SolveStatus] = None
    loop_outcome: Optional[LoopOutcome] = None
    telemetry: Telemetry = Field(default_factory=Telemetry)
    error: Optional[str] = Field(None, description="Failure message when the run raised")


class Report(BaseModel):
    """Suite-level metrics averaged over all records."""
    suite: str = Field(..., description="Suite name")
    created_at: datetime = Field(default_factory=datetime.now)
    instances: int = Field(0, ge=0)
    repetitions: int = Field(1, ge=1)
    records: int = Field(0, ge=0)
    accuracy: float = Field(0.0, ge=0.0, le=1.0)
    ce_rate: float = Field(0.0, ge=0.0, le=1.0)
    re_rate: float = Field(0.0, ge=0.0, le=1.0)
    wa_rate: float = Field(0.0, ge=0.0, le=1.0)
    avg_prompt_tokens: float = 0.0
    avg_completion_tokens: float = 0.0
    avg_latency: float = 0.0
    avg_cost: float = 0.0
    avg_iterations: float = 0.0

    @classmethod
    def from_records(cls, suite: str, records: List[RunRecord], instances: int, repetitions: int) -> "Report":
        """Aggregate records; rates are fractions of all records."""
        n = len(records)
        if n == 0:
            return cls(suite=suite, instances=instances, repetitions=repetitions)

        def rate(outcome: Outcome) -> float:
            return sum(1 for r in records if r.outcome == outcome) / n

        def mean(values) -> float:
            return sum(values) / n

        return cls(
            suite=suite,
            instances=instances,
            repetitions=repetitions,
            records=n,
            accuracy=rate(Outcome.AC),
            ce_rate=rate(Outcome.CE),
            re_rate=rate(Outcome.RE),
            wa_rate=rate(Outcome.WA),
            avg_prompt_tokens=mean(r.telemetry.prompt_tokens for r in records),
            avg_completion_tokens=mean(r.telemetry.completion_tokens for r in records),
            avg_latency=mean(r.telemetry.latency for r in records),
            avg_cost=mean(r.telemetry.cost for r in records),
            avg_iterations=mean(r.telemetry.iterations for r in records),
        )
