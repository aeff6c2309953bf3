"""
Syntax tree nodes for model and data files.

Nodes are frozen dataclasses. Spans and comments are excluded from equality,
so two trees compare equal when they have the same structure.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .tokens import Comment, Span

NO_SPAN = Span(1, 1, 0)


# Expressions

@dataclass(frozen=True)
class NumberLit:
    value: Union[int, float]
    span: Span = field(default=NO_SPAN, compare=False)

    @property
    def is_int(self) -> bool:
        return isinstance(self.value, int)


@dataclass(frozen=True)
class StringLit:
    value: str
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Name:
    ident: str
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Index:
    """``base[i][j]``; base is always a Name."""
    base: "Name"
    indices: Tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class FieldAccess:
    base: "Expr"
    field_name: str
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Logical:
    op: str  # && or ||
    left: "Expr"
    right: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Compare:
    """Comparison chain: operands[0] ops[0] operands[1] ops[1] ..."""
    ops: Tuple[str, ...]
    operands: Tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)

    @property
    def is_chain(self) -> bool:
        return len(self.ops) > 1


@dataclass(frozen=True)
class Paren:
    inner: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class RangeExpr:
    low: "Expr"
    high: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Binder:
    """``name in domain``; domain is a Name or a RangeExpr."""
    name: str
    domain: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Aggregate:
    kind: str  # sum, min or max
    binders: Tuple[Binder, ...]
    condition: Optional["Expr"]
    body: "Expr"
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class ArrayLiteral:
    items: Tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class SetLiteral:
    items: Tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class TupleLiteral:
    items: Tuple["Expr", ...]
    span: Span = field(default=NO_SPAN, compare=False)


Expr = Union[
    NumberLit, StringLit, BoolLit, Name, Index, FieldAccess, BinOp, Neg, Not,
    Logical, Compare, Paren, RangeExpr, Aggregate, Call, ArrayLiteral,
    SetLiteral, TupleLiteral,
]


# Declarations

@dataclass(frozen=True)
class ParamDecl:
    """``float c[I][J] = ...;`` or ``int n = 3;``. external means '= ...' or no initializer."""
    type_name: str
    name: str
    dims: Tuple[Expr, ...]
    init: Optional[Expr]
    external: bool
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class RangeDecl:
    name: str
    low: Optional[Expr]
    high: Optional[Expr]
    external: bool
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class SetDecl:
    elem_type: str
    name: str
    init: Optional[Expr]
    external: bool
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class TupleField:
    type_name: str
    name: str
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class TupleDecl:
    name: str
    fields: Tuple[TupleField, ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class DvarDecl:
    """``dvar float+ x[I] in 0..10;``"""
    type_name: str  # float, int or boolean
    nonneg: bool
    name: str
    dims: Tuple[Expr, ...]
    bounds: Optional[RangeExpr]
    span: Span = field(default=NO_SPAN, compare=False)


Declaration = Union[ParamDecl, RangeDecl, SetDecl, TupleDecl, DvarDecl]


# Objective and constraints

@dataclass(frozen=True)
class Objective:
    sense: str  # minimize or maximize
    label: Optional[str]
    expr: Expr
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Constraint:
    label: Optional[str]
    body: Expr
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class ForallBlock:
    """``forall (binders : cond) item`` or ``forall (...) { items }``."""
    binders: Tuple[Binder, ...]
    condition: Optional[Expr]
    items: Tuple["ConstraintItem", ...]
    braced: bool
    span: Span = field(default=NO_SPAN, compare=False)


ConstraintItem = Union[Constraint, ForallBlock]


@dataclass(frozen=True)
class ModelAst:
    declarations: Tuple[Declaration, ...]
    objectives: Tuple[Objective, ...]
    constraints: Tuple[ConstraintItem, ...]
    comments: Tuple[Comment, ...] = field(default=(), compare=False)

    @property
    def objective(self) -> Optional[Objective]:
        return self.objectives[0] if self.objectives else None


# Data literals

@dataclass(frozen=True)
class ScalarLit:
    value: Union[int, float, str, bool]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class ArrayLit:
    items: Tuple["DataLiteral", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class SetLit:
    items: Tuple["DataLiteral", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class TupleLit:
    items: Tuple["DataLiteral", ...]
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class RangeLit:
    low: int
    high: int
    span: Span = field(default=NO_SPAN, compare=False)


DataLiteral = Union[ScalarLit, ArrayLit, SetLit, TupleLit, RangeLit]


@dataclass(frozen=True)
class DataAssignment:
    name: str
    value: DataLiteral
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class DataAst:
    assignments: Tuple[DataAssignment, ...]
    comments: Tuple[Comment, ...] = field(default=(), compare=False)

    def get(self, name: str) -> Optional[DataAssignment]:
        for assignment in self.assignments:
            if assignment.name == name:
                return assignment
        return None
