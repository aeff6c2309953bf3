"""
Flat Programme Models

Pydantic models for the instantiated linear programme, the source name map
and solver results.
"""

import math
from typing import Dict, List, Optional, Tuple
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class VarDomain(str, Enum):
    """Flat variable domains."""
    CONTINUOUS = "continuous"
    INTEGER = "integer"
    BINARY = "binary"


class Relation(str, Enum):
    """Row relations."""
    LE = "<="
    GE = ">="
    EQ = "=="


class ObjectiveSense(str, Enum):
    """Optimisation direction."""
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class FlatVariable(BaseModel):
    """A decision variable with concrete indices."""
    name: str = Field(..., description="Source name with concrete indices, e.g. x[1]")
    domain: VarDomain = Field(VarDomain.CONTINUOUS, description="Variable domain")
    lower: float = Field(0.0, description="Lower bound, may be -inf")
    upper: float = Field(math.inf, description="Upper bound, may be +inf")

    @model_validator(mode="after")
    def _bounds_ordered(self) -> "FlatVariable":
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError(f"bounds of {self.name} must not be NaN")
        if self.lower > self.upper:
            raise ValueError(f"lower bound exceeds upper bound for {self.name}")
        return self


class FlatConstraint(BaseModel):
    """One row: sum(coefficients[j] * x_j) relation rhs."""
    name: str = Field(..., description="Label with concrete indices")
    coefficients: Dict[int, float] = Field(default_factory=dict, description="Sparse row")
    relation: Relation = Field(..., description="<=, >= or ==")
    rhs: float = Field(0.0, description="Right-hand side")

    @field_validator("coefficients")
    @classmethod
    def _finite_coefficients(cls, v: Dict[int, float]) -> Dict[int, float]:
        for value in v.values():
            if not math.isfinite(value):
                raise ValueError("row coefficients must be finite")
        return v


class FlatModel(BaseModel):
    """The fully instantiated mathematical programme."""
    name: str = Field("model", description="Programme name")
    sense: ObjectiveSense = Field(ObjectiveSense.MINIMIZE, description="Objective sense")
    objective_label: str = Field("obj", description="Objective label")
    objective: Dict[int, float] = Field(default_factory=dict, description="Sparse objective")
    objective_constant: float = Field(0.0, description="Constant term of the objective")
    variables: List[FlatVariable] = Field(default_factory=list)
    constraints: List[FlatConstraint] = Field(default_factory=list)

    @model_validator(mode="after")
    def _rows_reference_variables(self) -> "FlatModel":
        n = len(self.variables)
        for j in self.objective:
            if not 0 <= j < n:
                raise ValueError(f"objective references unknown variable {j}")
        for row in self.constraints:
            for j in row.coefficients:
                if not 0 <= j < n:
                    raise ValueError(f"row {row.name} references unknown variable {j}")
        return self

    @property
    def has_integers(self) -> bool:
        return any(v.domain != VarDomain.CONTINUOUS for v in self.variables)

    def objective_value(self, assignment: Dict[str, float]) -> float:
        """Evaluate the objective at a named assignment."""
        total = self.objective_constant
        for j, coef in self.objective.items():
            total += coef * assignment[self.variables[j].name]
        return total


class SymbolOrigin(BaseModel):
    """Source-level identity of a flat variable or row."""
    model_config = ConfigDict(frozen=True)

    position: int = Field(..., ge=0)
    symbol: str = Field(..., description="Declared name or constraint label")
    index: Tuple = Field(default_factory=tuple, description="Concrete index tuple")
    line: Optional[int] = Field(None, description="Declaration or constraint line")


class NameMap(BaseModel):
    """Bijection between flat positions and source names."""
    variables: List[SymbolOrigin] = Field(default_factory=list)
    constraints: List[SymbolOrigin] = Field(default_factory=list)
    variable_names: List[str] = Field(default_factory=list)
    constraint_names: List[str] = Field(default_factory=list)

    def variable_position(self, name: str) -> int:
        return self.variable_names.index(name)

    def constraint_position(self, name: str) -> int:
        return self.constraint_names.index(name)

    def variable_origin(self, name: str) -> SymbolOrigin:
        return self.variables[self.variable_position(name)]

    def constraint_origin(self, name: str) -> SymbolOrigin:
        return self.constraints[self.constraint_position(name)]


class SolveStatus(str, Enum):
    """Solver termination states."""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NODE_LIMIT = "nodeLimit"
    NUMERICAL_FAILURE = "numericalFailure"


class SolveOptions(BaseModel):
    """Solver tolerances and limits."""
    feasibility_tolerance: float = Field(1e-9, gt=0)
    integrality_tolerance: float = Field(1e-6, gt=0)
    node_limit: int = Field(10 ** 6, gt=0)
    time_limit: float = Field(60.0, gt=0, description="Seconds")


class Solution(BaseModel):
    """Solver result."""
    status: SolveStatus
    objective_value: Optional[float] = Field(None, description="Present iff status is optimal")
    assignment: Dict[str, float] = Field(default_factory=dict)
    incumbent_value: Optional[float] = Field(None, description="Best integer objective on nodeLimit")
    nodes: int = Field(0, ge=0, description="Branch-and-bound nodes explored")
    iterations: int = Field(0, ge=0, description="Simplex pivots")

    @model_validator(mode="after")
    def _objective_iff_optimal(self) -> "Solution":
        if (self.objective_value is not None) != (self.status == SolveStatus.OPTIMAL):
            raise ValueError("objective_value is present iff status is optimal")
        return self
