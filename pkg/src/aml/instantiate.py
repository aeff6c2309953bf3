"""
Instantiation

This module binds data to an analyzed model and expands forall blocks and
aggregates into a flat linear programme with a source name map.
"""

import logging
import math
from typing import Any, Dict, List, Tuple

from . import nodes as ast
from .catalog import make_diagnostic
from .errors import CompilationFailed
from .evaluator import Environment, EvaluationError, Evaluator, LinearExpr
from .semantics import TypedModel, analyze
from .values import flat_name, format_value
from ..models.diagnostics import Diagnostic, SourceKind
from ..models.flat import (
    FlatConstraint, FlatModel, FlatVariable, NameMap, ObjectiveSense, Relation, SymbolOrigin, VarDomain,
)

# Setup logging
logger = logging.getLogger(__name__)

RELATIONS = {"<=": Relation.LE, ">=": Relation.GE, "==": Relation.EQ}
DOMAINS = {"float": VarDomain.CONTINUOUS, "int": VarDomain.INTEGER, "boolean": VarDomain.BINARY}


def bind_data(typed: TypedModel, data: ast.DataAst) -> Environment:
    """
    Bind a data file to an analyzed model.

    The data is checked again in full (presence, extra names, shapes,
    element types), so a model analyzed once can be bound to other data.

    Raises:
        CompilationFailed: when the data does not conform
    """
    if data is typed.data:
        return typed.env
    return analyze(typed.model, data).env


def _as_linear(value: Any) -> LinearExpr:
    if isinstance(value, LinearExpr):
        return value
    try:
        return LinearExpr({}, float(value))
    except OverflowError:
        raise EvaluationError("EXP-NONFINITE", value="overflow")


class Expander:
    """Unrolls one typed model over one environment."""

    def __init__(self, typed: TypedModel, env: Environment):
        self.typed = typed
        self.env = env
        self.evaluator = Evaluator(env)
        self.diagnostics: List[Diagnostic] = []
        self.variables: List[FlatVariable] = []
        self.variable_origins: List[SymbolOrigin] = []
        self.constraints: List[FlatConstraint] = []
        self.constraint_origins: List[SymbolOrigin] = []
        self.auto_labels: Dict[int, str] = {}

    def report(self, exc: EvaluationError, node, context: str):
        span = exc.span or node.span
        self.diagnostics.append(make_diagnostic(exc.code, span.line, span.column, SourceKind.MODEL,
                                                context=context, **exc.params))

    def run(self) -> Tuple[FlatModel, NameMap]:
        self.expand_variables()
        sense, label, objective, constant = self.expand_objective()
        for item in self.typed.model.constraints:
            self.expand_item(item, {}, ())
        if any(d.is_error for d in self.diagnostics):
            raise CompilationFailed(self.diagnostics)

        flat = FlatModel(
            sense=sense,
            objective_label=label,
            objective=objective,
            objective_constant=constant,
            variables=self.variables,
            constraints=self.constraints,
        )
        name_map = NameMap(
            variables=self.variable_origins,
            constraints=self.constraint_origins,
            variable_names=[v.name for v in self.variables],
            constraint_names=[c.name for c in self.constraints],
        )
        return flat, name_map

    # Step 1: variables, in declaration order then row-major over domains

    def expand_variables(self):
        for decl in self.typed.model.declarations:
            if not isinstance(decl, ast.DvarDecl):
                continue
            block = self.env.variables[decl.name]
            domain = DOMAINS[decl.type_name]
            if decl.type_name == "boolean":
                lower, upper = 0.0, 1.0
            else:
                lower = 0.0 if decl.nonneg else -math.inf
                upper = math.inf
                if block.lower is not None:
                    lower = max(lower, block.lower)
                    upper = block.upper
            if lower > upper:
                self.diagnostics.append(make_diagnostic(
                    "SEM-DVAR-BOUNDS", decl.span.line, decl.span.column, SourceKind.MODEL, name=decl.name,
                    detail=f"the '+' domain excludes the declared bounds up to {format_value(upper)}"))
                continue
            for key, position in block.positions.items():
                name = flat_name(decl.name, key)
                self.variables.append(FlatVariable(name=name, domain=domain, lower=lower, upper=upper))
                self.variable_origins.append(
                    SymbolOrigin(position=position, symbol=decl.name, index=key, line=decl.span.line))

    # Step 2: objective

    def expand_objective(self):
        objective = self.typed.model.objective
        label = objective.label or "obj"
        sense = ObjectiveSense(objective.sense)
        try:
            value = _as_linear(self.evaluator.evaluate(objective.expr, {}))
        except EvaluationError as exc:
            self.report(exc, objective, label)
            return sense, label, {}, 0.0
        terms = {j: c for j, c in sorted(value.terms.items()) if c != 0.0}
        if not self._finite(value, objective, label):
            return sense, label, {}, 0.0
        return sense, label, terms, value.constant

    def _finite(self, value: LinearExpr, node, context: str) -> bool:
        for number in list(value.terms.values()) + [value.constant]:
            if not math.isfinite(number):
                self.report(EvaluationError("EXP-NONFINITE", node.span, value=format_value(number)), node, context)
                return False
        return True

    # Step 3: constraints

    def label_for(self, constraint: ast.Constraint) -> str:
        if constraint.label:
            return constraint.label
        key = id(constraint)
        if key not in self.auto_labels:
            self.auto_labels[key] = f"_c{len(self.auto_labels) + 1}"
        return self.auto_labels[key]

    def expand_item(self, item: ast.ConstraintItem, bindings: Dict[str, Any], key: Tuple[Any, ...]):
        if isinstance(item, ast.Constraint):
            self.expand_constraint(item, bindings, key)
            return
        try:
            combos = list(self.evaluator.iterate(item.binders, item.condition, bindings))
        except EvaluationError as exc:
            self.report(exc, item, "forall")
            return
        for inner in combos:
            inner_key = key + tuple(inner[b.name] for b in item.binders)
            for nested in item.items:
                self.expand_item(nested, inner, inner_key)

    def expand_constraint(self, constraint: ast.Constraint, bindings: Dict[str, Any], key: Tuple[Any, ...]):
        name = flat_name(self.label_for(constraint), key)
        body = constraint.body
        while isinstance(body, ast.Paren):
            body = body.inner
        try:
            left = _as_linear(self.evaluator.evaluate(body.operands[0], bindings))
            right = _as_linear(self.evaluator.evaluate(body.operands[1], bindings))
        except EvaluationError as exc:
            self.report(exc, constraint, name)
            return
        difference = left.plus(right, -1.0)
        if not self._finite(difference, constraint, name):
            return
        coefficients = {j: c for j, c in sorted(difference.terms.items()) if c != 0.0}
        self.constraints.append(FlatConstraint(
            name=name, coefficients=coefficients, relation=RELATIONS[body.ops[0]], rhs=-difference.constant))
        self.constraint_origins.append(SymbolOrigin(
            position=len(self.constraint_origins), symbol=self.label_for(constraint), index=key,
            line=constraint.span.line))


def expand(typed: TypedModel, env: Environment) -> Tuple[FlatModel, NameMap]:
    """
    Expand a typed model into a flat programme.

    Args:
        typed (TypedModel): analyzed model
        env (Environment): realized data from bind_data

    Returns:
        tuple: (FlatModel, NameMap)

    Raises:
        CompilationFailed: on evaluation errors (index out of range, division by zero, non-finite values)
    """
    flat, name_map = Expander(typed, env).run()
    logger.debug(f"Expanded {len(flat.variables)} variables and {len(flat.constraints)} rows")
    return flat, name_map


class PointEvaluator(Evaluator):
    """Evaluates expressions with decision variables replaced by numbers."""

    def __init__(self, env: Environment, point: Dict[int, float]):
        super().__init__(env)
        self.point = point

    def _eval_Name(self, expr: ast.Name, bindings):
        block = self.env.variables.get(expr.ident)
        if block is not None and expr.ident not in bindings:
            return self.point[block.positions[()]]
        return super()._eval_Name(expr, bindings)

    def _eval_Index(self, expr: ast.Index, bindings):
        block = self.env.variables.get(expr.base.ident)
        if block is not None:
            key = tuple(self.constant(index, bindings) for index in expr.indices)
            return self.point[block.positions[key]]
        return super()._eval_Index(expr, bindings)


def evaluate_objective_at(typed: TypedModel, env: Environment, point: Dict[int, float]) -> float:
    """Objective value at a point, evaluated on the unexpanded expression tree."""
    return float(PointEvaluator(env, point).evaluate(typed.model.objective.expr, {}))
