"""
Expression evaluation over realized data.

Constant subexpressions fold to Python numbers; anything touching a decision
variable becomes a LinearExpr. The same evaluator realizes initializers during
analysis and expands rows during instantiation.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Optional, Tuple, Union

from . import nodes as ast
from .tokens import Span
from .values import ArrayValue, RangeValue, SetValue, TupleValue, format_value, is_number


class EvaluationError(Exception):
    """A catalogued failure while evaluating; callers add the context."""

    def __init__(self, code: str, span: Optional[Span] = None, **params):
        super().__init__(code)
        self.code = code
        self.span = span
        self.params = params


class Unrealized(Exception):
    """Raised when an expression depends on a symbol that could not be realized."""


@dataclass
class LinearExpr:
    """Affine form: sum(terms[j] * x_j) + constant."""
    terms: Dict[int, float] = field(default_factory=dict)
    constant: float = 0.0

    @classmethod
    def variable(cls, position: int) -> "LinearExpr":
        return cls({position: 1.0}, 0.0)

    @property
    def is_constant(self) -> bool:
        return not any(self.terms.values())

    def scaled(self, factor: float) -> "LinearExpr":
        return LinearExpr({j: c * factor for j, c in self.terms.items()}, self.constant * factor)

    def plus(self, other: "LinearExpr", sign: float = 1.0) -> "LinearExpr":
        terms = dict(self.terms)
        for j, c in other.terms.items():
            terms[j] = terms.get(j, 0.0) + sign * c
        return LinearExpr(terms, self.constant + sign * other.constant)


Numeric = Union[int, float, LinearExpr]


@dataclass
class VariableBlock:
    """Flat positions of one indexed decision variable."""
    name: str
    domains: Tuple[Tuple[Any, ...], ...]
    positions: Dict[Tuple[Any, ...], int]
    lower: Optional[float] = None
    upper: Optional[float] = None


@dataclass
class Environment:
    """Realized values plus the flat layout of decision variables."""
    values: Dict[str, Any] = field(default_factory=dict)
    variables: Dict[str, VariableBlock] = field(default_factory=dict)
    variable_count: int = 0

    def domain_elements(self, name: str) -> Tuple[Any, ...]:
        value = self.values.get(name)
        if isinstance(value, (RangeValue, SetValue)):
            return value.elements
        raise Unrealized(name)


def _as_linear(value: Numeric) -> LinearExpr:
    if isinstance(value, LinearExpr):
        return value
    return LinearExpr({}, float(value))


def _fold(value: LinearExpr) -> Numeric:
    return value.constant if value.is_constant else value


class Evaluator:
    """Evaluate expressions under index bindings."""

    def __init__(self, env: Environment):
        self.env = env

    def evaluate(self, expr: ast.Expr, bindings: Dict[str, Any]) -> Any:
        method = getattr(self, f"_eval_{type(expr).__name__}")
        try:
            return method(expr, bindings)
        except OverflowError:
            raise EvaluationError("EXP-NONFINITE", expr.span, value="overflow")

    def constant(self, expr: ast.Expr, bindings: Dict[str, Any]) -> Any:
        value = self.evaluate(expr, bindings)
        if isinstance(value, LinearExpr):
            if not value.is_constant:
                raise EvaluationError("SEM-DVAR-IN-CONSTANT", expr.span, name="?")
            return value.constant
        return value

    def iterate(self, binders, condition, bindings: Dict[str, Any]) -> Iterator[Dict[str, Any]]:
        """Yield one binding dict per tuple of the index domains passing the filter."""
        def walk(position: int, current: Dict[str, Any]):
            if position == len(binders):
                if condition is None or self.constant(condition, current) is True:
                    yield current
                return
            binder = binders[position]
            for element in self.domain(binder.domain, current):
                yield from walk(position + 1, {**current, binder.name: element})
        return walk(0, dict(bindings))

    def domain(self, expr: ast.Expr, bindings: Dict[str, Any]) -> Tuple[Any, ...]:
        value = self.evaluate(expr, bindings)
        if isinstance(value, (RangeValue, SetValue)):
            return value.elements
        raise EvaluationError("SEM-BAD-DOMAIN", expr.span, name=format_value(value), kind="value")

    # Literals and names

    def _eval_NumberLit(self, expr: ast.NumberLit, bindings):
        return expr.value

    def _eval_StringLit(self, expr: ast.StringLit, bindings):
        return expr.value

    def _eval_BoolLit(self, expr: ast.BoolLit, bindings):
        return expr.value

    def _eval_Name(self, expr: ast.Name, bindings):
        if expr.ident in bindings:
            return bindings[expr.ident]
        block = self.env.variables.get(expr.ident)
        if block is not None:
            return LinearExpr.variable(block.positions[()])
        if expr.ident not in self.env.values:
            raise Unrealized(expr.ident)
        return self.env.values[expr.ident]

    def _eval_Index(self, expr: ast.Index, bindings):
        name = expr.base.ident
        key = tuple(self.constant(index, bindings) for index in expr.indices)
        block = self.env.variables.get(name)
        if block is not None:
            position = block.positions.get(key)
            if position is None:
                raise EvaluationError("EXP-INDEX-OUT-OF-RANGE", expr.span,
                                      value=_format_key(key), name=name)
            return LinearExpr.variable(position)
        array = self.env.values.get(name)
        if not isinstance(array, ArrayValue):
            raise Unrealized(name)
        try:
            return array.get(key)
        except KeyError:
            raise EvaluationError("EXP-INDEX-OUT-OF-RANGE", expr.span,
                                  value=_format_key(key), name=name)

    def _eval_FieldAccess(self, expr: ast.FieldAccess, bindings):
        base = self.constant(expr.base, bindings)
        return base.field(expr.field_name)

    def _eval_Paren(self, expr: ast.Paren, bindings):
        return self.evaluate(expr.inner, bindings)

    # Arithmetic

    def _eval_BinOp(self, expr: ast.BinOp, bindings):
        left = self.evaluate(expr.left, bindings)
        right = self.evaluate(expr.right, bindings)
        op = expr.op
        if not isinstance(left, LinearExpr) and not isinstance(right, LinearExpr):
            left, right = _number(left), _number(right)
            if op == "+":
                return left + right
            if op == "-":
                return left - right
            if op == "*":
                return left * right
            if right == 0:
                raise EvaluationError("EXP-DIV-ZERO", expr.span)
            return left / right
        if op in ("+", "-"):
            return _fold(_as_linear(left).plus(_as_linear(right), 1.0 if op == "+" else -1.0))
        if op == "*":
            if isinstance(left, LinearExpr) and isinstance(right, LinearExpr):
                if not left.is_constant and not right.is_constant:
                    raise EvaluationError("SEM-NONLINEAR", expr.span,
                                          detail="product of two decision-variable expressions")
            if isinstance(left, LinearExpr) and not left.is_constant:
                return _fold(left.scaled(float(_constant_of(right))))
            return _fold(_as_linear(right).scaled(float(_constant_of(left))))
        divisor = _constant_of(right) if not isinstance(right, LinearExpr) or right.is_constant else None
        if divisor is None:
            raise EvaluationError("SEM-DVAR-DIVISOR", expr.span)
        if divisor == 0:
            raise EvaluationError("EXP-DIV-ZERO", expr.span)
        return _fold(_as_linear(left).scaled(1.0 / divisor))

    def _eval_Neg(self, expr: ast.Neg, bindings):
        value = self.evaluate(expr.operand, bindings)
        if isinstance(value, LinearExpr):
            return value.scaled(-1.0)
        return -_number(value)

    # Logic

    def _eval_Not(self, expr: ast.Not, bindings):
        return not self.constant(expr.operand, bindings)

    def _eval_Logical(self, expr: ast.Logical, bindings):
        left = self.constant(expr.left, bindings)
        if expr.op == "&&":
            return bool(left) and bool(self.constant(expr.right, bindings))
        return bool(left) or bool(self.constant(expr.right, bindings))

    def _eval_Compare(self, expr: ast.Compare, bindings):
        values = [self.constant(operand, bindings) for operand in expr.operands]
        for op, left, right in zip(expr.ops, values, values[1:]):
            if not _compare(op, left, right):
                return False
        return True

    # Aggregates and functions

    def _eval_Aggregate(self, expr: ast.Aggregate, bindings):
        items = [self.evaluate(expr.body, inner) for inner in self.iterate(expr.binders, expr.condition, bindings)]
        if expr.kind == "sum":
            total = LinearExpr()
            for item in items:
                total = total.plus(_as_linear(item))
            if not total.is_constant:
                return total
            if all(isinstance(item, int) and not isinstance(item, bool) for item in items):
                return int(total.constant)
            return total.constant
        numbers = [_number(_constant_of(item)) for item in items]
        if not numbers:
            return math.inf if expr.kind == "min" else -math.inf
        return min(numbers) if expr.kind == "min" else max(numbers)

    def _eval_Call(self, expr: ast.Call, bindings):
        if expr.func == "card":
            value = self.evaluate(expr.args[0], bindings)
            return len(value)
        args = [_number(self.constant(arg, bindings)) for arg in expr.args]
        if expr.func == "abs":
            return abs(args[0])
        if expr.func == "floor":
            return math.floor(args[0])
        if expr.func == "ceil":
            return math.ceil(args[0])
        if expr.func == "minl":
            return min(args)
        if expr.func == "maxl":
            return max(args)
        raise EvaluationError("SEM-UNKNOWN-FUNCTION", expr.span, name=expr.func)

    # Structured literals

    def _eval_RangeExpr(self, expr: ast.RangeExpr, bindings):
        low = self.constant(expr.low, bindings)
        high = self.constant(expr.high, bindings)
        bounds = []
        for bound in (low, high):
            if not is_number(bound) or float(bound) != math.floor(bound) or not math.isfinite(bound):
                raise EvaluationError("SEM-RANGE-NONINT", expr.span)
            bounds.append(int(bound))
        return RangeValue(bounds[0], bounds[1])

    def _eval_ArrayLiteral(self, expr: ast.ArrayLiteral, bindings):
        return [self.constant(item, bindings) for item in expr.items]

    def _eval_SetLiteral(self, expr: ast.SetLiteral, bindings):
        return SetValue(tuple(self.constant(item, bindings) for item in expr.items))

    def _eval_TupleLiteral(self, expr: ast.TupleLiteral, bindings):
        return tuple(self.constant(item, bindings) for item in expr.items)


def _number(value: Any):
    if isinstance(value, bool):
        return int(value)
    if is_number(value):
        return value
    raise TypeError(f"not a number: {value!r}")


def _constant_of(value: Numeric):
    if isinstance(value, LinearExpr):
        return value.constant
    return _number(value)


def _compare(op: str, left: Any, right: Any) -> bool:
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    if op == "<=":
        return left <= right
    if op == ">=":
        return left >= right
    if op == "<":
        return left < right
    return left > right


def _format_key(key: Tuple[Any, ...]) -> str:
    if len(key) == 1:
        return format_value(key[0])
    return "[" + ",".join(format_value(k) for k in key) + "]"


def product_keys(domains) -> Iterator[Tuple[Any, ...]]:
    """Row-major index tuples over realized domains."""
    return itertools.product(*domains)
