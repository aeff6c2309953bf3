"""
Semantic Analysis

This module type-checks a parsed model against its parsed data: typed set
validation, index typing, array shape checks, linearity and structural rules.
Every problem found is reported, not just the first; an expression whose
operands already failed does not report again.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple

from . import nodes as ast
from .catalog import make_diagnostic
from .errors import CompilationFailed
from .evaluator import Environment, EvaluationError, Evaluator, Unrealized
from .printer import expr_text
from .realize import DataRealizer
from .symbols import SCALAR_TYPES, ExprType, SymbolInfo, SymbolKind, SymbolTable
from .values import format_value
from ..models.diagnostics import Diagnostic, SourceKind, sort_diagnostics

# Setup logging
logger = logging.getLogger(__name__)

# name -> (minimum, maximum) argument count; None means unbounded
FUNCTIONS = {
    "card": (1, 1),
    "abs": (1, 1),
    "floor": (1, 1),
    "ceil": (1, 1),
    "minl": (2, None),
    "maxl": (2, None),
}


@dataclass
class Scope:
    """Index bindings visible at a point, plus the evaluation context."""
    bindings: Dict[str, Optional[ExprType]] = field(default_factory=dict)
    elements: Dict[str, Optional[Tuple[Any, ...]]] = field(default_factory=dict)
    domains: Dict[str, str] = field(default_factory=dict)  # index -> domain source text
    limit: Optional[int] = None  # only declarations before this position are visible
    constant: Optional[str] = None  # set when decision variables are forbidden, names the context

    def within(self, constant: Optional[str]) -> "Scope":
        return Scope(self.bindings, self.elements, self.domains, self.limit, constant)


@dataclass
class TypedModel:
    """A model that passed analysis, with its symbols, types and realized data."""
    model: ast.ModelAst
    data: ast.DataAst
    symbols: SymbolTable
    expr_types: Dict[int, ExprType]
    env: Environment
    warnings: List[Diagnostic] = field(default_factory=list)

    def type_of(self, expr: ast.Expr) -> Optional[ExprType]:
        return self.expr_types.get(id(expr))


def is_literal_only(expr: ast.Expr) -> bool:
    """True for expressions built from number literals alone."""
    if isinstance(expr, ast.NumberLit):
        return True
    if isinstance(expr, (ast.Paren,)):
        return is_literal_only(expr.inner)
    if isinstance(expr, ast.Neg):
        return is_literal_only(expr.operand)
    if isinstance(expr, ast.BinOp):
        return is_literal_only(expr.left) and is_literal_only(expr.right)
    return False


class SemanticAnalyzer:
    """Single-use analyzer over one model/data pair."""

    def __init__(self, model: ast.ModelAst, data: ast.DataAst):
        self.model = model
        self.data = data
        self.symbols = SymbolTable()
        self.diagnostics: List[Diagnostic] = []
        self.broken: Set[str] = set()
        self.used: Set[str] = set()
        self.expr_types: Dict[int, ExprType] = {}
        self.env = Environment()
        self.assignments: Dict[str, ast.DataAssignment] = {}

    # Reporting

    def report(self, code: str, node, source: SourceKind = SourceKind.MODEL, **params):
        span = getattr(node, "span", None)
        line = span.line if span is not None else None
        column = span.column if span is not None else None
        self.diagnostics.append(make_diagnostic(code, line, column, source, **params))

    @property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.is_error)

    # Driver

    def run(self) -> TypedModel:
        self.declare_symbols()
        self.check_declarations()
        self.check_data_assignments()
        self.realize()
        self.check_objectives()
        self.check_constraints()
        self.check_labels()
        self.check_unused()

        diagnostics = sort_diagnostics(self.diagnostics)
        if any(d.is_error for d in diagnostics):
            logger.debug(f"Analysis failed with {self.error_count} error(s)")
            raise CompilationFailed(diagnostics)
        return TypedModel(self.model, self.data, self.symbols, self.expr_types, self.env, diagnostics)

    # Step 1: declarations

    def declare_symbols(self):
        for order, decl in enumerate(self.model.declarations):
            symbol = self._symbol_for(decl, order)
            existing = self.symbols.declare(symbol)
            if existing is not None:
                self.report("SEM-DUPLICATE-DECL", decl, name=decl.name, first=existing.line)

    def _symbol_for(self, decl: ast.Declaration, order: int) -> SymbolInfo:
        if isinstance(decl, ast.TupleDecl):
            fields = tuple((f.type_name, f.name) for f in decl.fields)
            return SymbolInfo(decl.name, SymbolKind.TUPLE, decl.name, decl, order, fields=fields)
        if isinstance(decl, ast.RangeDecl):
            return SymbolInfo(decl.name, SymbolKind.RANGE, "int", decl, order, external=decl.external)
        if isinstance(decl, ast.SetDecl):
            return SymbolInfo(decl.name, SymbolKind.SET, decl.elem_type, decl, order, external=decl.external)
        if isinstance(decl, ast.DvarDecl):
            return SymbolInfo(decl.name, SymbolKind.DVAR, decl.type_name, decl, order, dims=decl.dims)
        return SymbolInfo(decl.name, SymbolKind.PARAMETER, decl.type_name, decl, order,
                          dims=decl.dims, external=decl.external)

    def _known_type(self, type_name: str, order: int) -> bool:
        if type_name in SCALAR_TYPES:
            return True
        tuple_symbol = self.symbols.tuple_type(type_name)
        return tuple_symbol is not None and tuple_symbol.order < order

    # Step 2: declaration expressions

    def check_declarations(self):
        for order, decl in enumerate(self.model.declarations):
            symbol = self.symbols.lookup(decl.name)
            if symbol is None or symbol.decl is not decl:
                continue
            scope = Scope(limit=order)
            errors_before = self.error_count
            if isinstance(decl, ast.TupleDecl):
                self._check_tuple(decl, order)
            elif isinstance(decl, ast.RangeDecl):
                if not decl.external:
                    self.check_range_bounds(decl.low, decl.high, scope)
            elif isinstance(decl, ast.SetDecl):
                if not self._known_type(decl.elem_type, order):
                    self.report("SEM-UNKNOWN-TYPE", decl, name=decl.elem_type)
                elif decl.init is not None:
                    self.check_initializer(decl.init, scope.within(f"the initializer of '{decl.name}'"))
            elif isinstance(decl, ast.ParamDecl):
                self._check_param(decl, order, scope)
            elif isinstance(decl, ast.DvarDecl):
                self._check_dvar(decl, scope)
            if self.error_count > errors_before:
                self.broken.add(decl.name)

    def _check_tuple(self, decl: ast.TupleDecl, order: int):
        seen = set()
        for tuple_field in decl.fields:
            if tuple_field.name in seen:
                self.report("SEM-DUPLICATE-FIELD", tuple_field, tuple=decl.name, field=tuple_field.name)
            seen.add(tuple_field.name)
            if not self._known_type(tuple_field.type_name, order):
                self.report("SEM-UNKNOWN-TYPE", tuple_field, name=tuple_field.type_name)

    def _check_param(self, decl: ast.ParamDecl, order: int, scope: Scope):
        if not self._known_type(decl.type_name, order):
            self.report("SEM-UNKNOWN-TYPE", decl, name=decl.type_name)
            return
        for dim in decl.dims:
            self.check_domain(dim, scope)
        if decl.init is None:
            return
        init_scope = scope.within(f"the initializer of '{decl.name}'")
        if decl.dims:
            self.check_initializer(decl.init, init_scope)
            return
        if isinstance(decl.init, (ast.ArrayLiteral, ast.SetLiteral)):
            got = "array" if isinstance(decl.init, ast.ArrayLiteral) else "set"
            self.report("SEM-TYPE-MISMATCH-INIT", decl, name=decl.name, got=got, expected=decl.type_name)
            return
        if isinstance(decl.init, ast.TupleLiteral):
            self.check_initializer(decl.init, init_scope)
            return
        got = self.infer(decl.init, init_scope)
        if got is not None and not self._assignable(got, decl.type_name):
            self.report("SEM-TYPE-MISMATCH-INIT", decl, name=decl.name, got=got.base, expected=decl.type_name)

    @staticmethod
    def _assignable(got: ExprType, expected: str) -> bool:
        if expected == "float":
            return got.base in ("int", "float")
        return got.base == expected

    def _check_dvar(self, decl: ast.DvarDecl, scope: Scope):
        for dim in decl.dims:
            self.check_domain(dim, scope)
        if decl.type_name == "boolean" and decl.nonneg:
            self.report("SEM-DVAR-BOUNDS", decl, name=decl.name, detail="boolean variables cannot be declared '+'")
            return
        if decl.bounds is None:
            return
        if decl.type_name == "boolean":
            self.report("SEM-DVAR-BOUNDS", decl.bounds, name=decl.name, detail="boolean variables take no bounds")
            return
        bound_scope = scope.within(f"the bounds of '{decl.name}'")
        for bound in (decl.bounds.low, decl.bounds.high):
            got = self.infer(bound, bound_scope)
            if got is not None and got.base not in ("int", "float"):
                self.report("SEM-DVAR-BOUNDS", bound, name=decl.name, detail="bounds must be numeric")

    def check_initializer(self, expr: ast.Expr, scope: Scope):
        if isinstance(expr, (ast.ArrayLiteral, ast.SetLiteral, ast.TupleLiteral)):
            for item in expr.items:
                self.check_initializer(item, scope)
        elif isinstance(expr, ast.RangeExpr):
            self.check_range_bounds(expr.low, expr.high, scope)
        else:
            self.infer(expr, scope)

    def check_range_bounds(self, low: ast.Expr, high: ast.Expr, scope: Scope) -> bool:
        """Type-check range bounds; literal bounds are also value-checked."""
        bound_scope = scope.within("a range bound")
        ok = True
        for bound in (low, high):
            got = self.infer(bound, bound_scope)
            if got is None:
                ok = False
                continue
            if got.base not in ("int", "float"):
                self.report("SEM-RANGE-NONINT", bound)
                return False
            if is_literal_only(bound):
                try:
                    value = Evaluator(Environment()).constant(bound, {})
                except EvaluationError:
                    continue
                if isinstance(value, float) and not value.is_integer():
                    self.report("SEM-RANGE-NONINT", bound)
                    return False
        return ok

    # Step 3: data assignments

    def check_data_assignments(self):
        for assignment in self.data.assignments:
            name = assignment.name
            if name in self.assignments:
                self.report("SEM-DATA-DUPLICATE", assignment, SourceKind.DATA, name=name)
                continue
            self.assignments[name] = assignment
            symbol = self.symbols.lookup(name)
            if symbol is None or symbol.kind == SymbolKind.TUPLE:
                self.report("SEM-EXTRA-DATA", assignment, SourceKind.DATA, name=name)
            elif symbol.kind == SymbolKind.DVAR:
                self.report("SEM-DATA-FOR-DVAR", assignment, SourceKind.DATA, name=name)
            elif symbol.kind == SymbolKind.RANGE:
                self.report("SEM-RANGE-IN-DAT", assignment, SourceKind.DATA, name=name)
                self.broken.add(name)
            elif not symbol.external:
                self.report("SEM-DATA-FOR-INITIALIZED", assignment, SourceKind.DATA, name=name)

    # Step 4: realization

    def realize(self):
        realizer = DataRealizer(self.model, self.symbols, self.assignments, self.broken)
        self.env, diagnostics = realizer.run()
        self.diagnostics.extend(diagnostics)
        self.broken |= realizer.unrealized

    def static_elements(self, domain: ast.Expr) -> Optional[Tuple[Any, ...]]:
        """Elements of a domain when they are known without index bindings."""
        try:
            return Evaluator(self.env).domain(domain, {})
        except (EvaluationError, Unrealized, TypeError, KeyError, AttributeError):
            return None

    # Step 5: objective and constraints

    def check_objectives(self):
        objectives = self.model.objectives
        if not objectives:
            self.report("SEM-OBJ-MISSING", None)
        elif len(objectives) > 1:
            self.report("SEM-OBJ-MULTIPLE", objectives[1], count=len(objectives))
        for objective in objectives:
            if objective.label is None:
                self.report("SEM-UNLABELLED-OBJECTIVE", objective)
            got = self.infer(objective.expr, Scope())
            if got is not None:
                self.require_numeric(got, objective.expr)

    def check_constraints(self):
        for item in self.model.constraints:
            self.check_constraint_item(item, Scope())

    def check_constraint_item(self, item: ast.ConstraintItem, scope: Scope):
        if isinstance(item, ast.ForallBlock):
            inner = self.bind(item.binders, item.condition, scope)
            for nested in item.items:
                self.check_constraint_item(nested, inner)
            return
        self.check_constraint(item, scope)

    def check_constraint(self, constraint: ast.Constraint, scope: Scope):
        if constraint.label is None:
            self.report("SEM-UNLABELLED-CONSTRAINT", constraint)
        body = constraint.body
        while isinstance(body, ast.Paren):
            body = body.inner
        if not isinstance(body, ast.Compare):
            self.infer(body, scope)
            self.report("SEM-NOT-A-CONSTRAINT", constraint)
            return
        types = [self.infer(operand, scope) for operand in body.operands]
        if body.is_chain:
            self.report("SEM-CHAINED-CMP", body)
            return
        op = body.ops[0]
        if op in ("<", ">"):
            self.report("SEM-STRICT-INEQUALITY", body, op=op)
            return
        if op == "!=":
            self.report("SEM-NOT-A-CONSTRAINT", constraint)
            return
        if any(t is None for t in types):
            return
        for got, operand in zip(types, body.operands):
            if not self.require_numeric(got, operand):
                return
        if all(t.degree == 0 for t in types):
            self.report("SEM-CONSTANT-CONSTRAINT", constraint, label=constraint.label or "(unlabelled)")

    # Step 6: labels and unused symbols

    def check_labels(self):
        first: Dict[str, int] = {}
        labelled = [(o.label, o) for o in self.model.objectives if o.label]
        labelled += [(c.label, c) for c in self._constraints(self.model.constraints) if c.label]
        for label, node in labelled:
            if label in first:
                self.report("SEM-DUPLICATE-LABEL", node, label=label, first=first[label])
            else:
                first[label] = node.span.line

    def _constraints(self, items) -> List[ast.Constraint]:
        found = []
        for item in items:
            if isinstance(item, ast.ForallBlock):
                found.extend(self._constraints(item.items))
            else:
                found.append(item)
        return found

    def check_unused(self):
        for symbol in self.symbols.symbols.values():
            if symbol.kind == SymbolKind.TUPLE or symbol.name in self.used:
                continue
            self.report("SEM-UNUSED-SYMBOL", symbol.decl, name=symbol.name)

    # Index binders and domains

    def bind(self, binders, condition: Optional[ast.Expr], scope: Scope) -> Scope:
        inner = Scope(dict(scope.bindings), dict(scope.elements), dict(scope.domains), scope.limit, scope.constant)
        names = set()
        for binder in binders:
            if binder.name in names:
                self.report("SEM-DUPLICATE-INDEX", binder, name=binder.name)
            elif binder.name in scope.bindings:
                self.report("SEM-SHADOWED-INDEX", binder, name=binder.name, what="an enclosing index")
            elif binder.name in self.symbols:
                kind = self.symbols.lookup(binder.name).kind.value
                self.report("SEM-SHADOWED-INDEX", binder, name=binder.name, what=f"a declared {kind}")
            names.add(binder.name)
            elem_type = self.check_domain(binder.domain, inner)
            inner.bindings[binder.name] = ExprType(elem_type) if elem_type else None
            # Filtered binders iterate a subset, so no domain-inclusion check applies
            inner.elements[binder.name] = None if condition is not None else self.static_elements(binder.domain)
            inner.domains[binder.name] = expr_text(binder.domain)
        if condition is not None:
            got = self.infer(condition, inner.within("a filter"))
            if got is not None and got.base != "boolean":
                self.report("SEM-FILTER-NOT-BOOLEAN", condition, got=got.base)
        return inner

    def check_domain(self, domain: ast.Expr, scope: Scope) -> Optional[str]:
        """Check an index domain; returns its element type."""
        if isinstance(domain, ast.RangeExpr):
            return "int" if self.check_range_bounds(domain.low, domain.high, scope) else None
        if not isinstance(domain, ast.Name):
            self.report("SEM-BAD-DOMAIN", domain, name=expr_text(domain), kind="expression")
            return None
        if domain.ident in scope.bindings:
            self.report("SEM-BAD-DOMAIN", domain, name=domain.ident, kind="index")
            return None
        symbol = self.resolve(domain, scope)
        if symbol is None:
            return None
        if symbol.kind == SymbolKind.RANGE:
            return "int"
        if symbol.kind == SymbolKind.SET:
            return symbol.type_name if self._known_type(symbol.type_name, symbol.order) else None
        self.report("SEM-BAD-DOMAIN", domain, name=domain.ident, kind=symbol.kind.value)
        return None

    def domain_type(self, domain: ast.Expr) -> Optional[str]:
        """Element type of a declared dimension, without reporting."""
        if isinstance(domain, ast.RangeExpr):
            return "int"
        if isinstance(domain, ast.Name):
            symbol = self.symbols.lookup(domain.ident)
            if symbol is not None and symbol.kind == SymbolKind.RANGE:
                return "int"
            if symbol is not None and symbol.kind == SymbolKind.SET:
                return symbol.type_name
        return None

    def resolve(self, node: ast.Name, scope: Scope) -> Optional[SymbolInfo]:
        symbol = self.symbols.lookup(node.ident)
        if symbol is None or (scope.limit is not None and symbol.order >= scope.limit):
            self.report("SEM-UNDECLARED", node, name=node.ident)
            return None
        self.used.add(symbol.name)
        return symbol

    # Expression typing

    def require_numeric(self, got: ExprType, expr: ast.Expr) -> bool:
        if got.is_numeric:
            return True
        if got.base == "string":
            self.report("SEM-STRING-ARITH", expr, expr=expr_text(expr))
        else:
            self.report("SEM-NOT-A-VALUE", expr, name=expr_text(expr), kind=got.base)
        return False

    def infer(self, expr: ast.Expr, scope: Scope) -> Optional[ExprType]:
        method = getattr(self, f"_infer_{type(expr).__name__}")
        got = method(expr, scope)
        if got is not None:
            self.expr_types[id(expr)] = got
        return got

    def _infer_NumberLit(self, expr: ast.NumberLit, scope: Scope):
        return ExprType("int" if expr.is_int else "float")

    def _infer_StringLit(self, expr, scope):
        return ExprType("string")

    def _infer_BoolLit(self, expr, scope):
        return ExprType("boolean")

    def _infer_Name(self, expr: ast.Name, scope: Scope):
        if expr.ident in scope.bindings:
            return scope.bindings[expr.ident]
        symbol = self.resolve(expr, scope)
        if symbol is None:
            return None
        if symbol.kind in (SymbolKind.RANGE, SymbolKind.SET, SymbolKind.TUPLE):
            self.report("SEM-NOT-A-VALUE", expr, name=expr.ident, kind=symbol.kind.value)
            return None
        if symbol.dimension:
            self.report("SEM-MISSING-INDEX", expr, name=expr.ident)
            return None
        return self._symbol_value(symbol, expr, scope)

    def _symbol_value(self, symbol: SymbolInfo, expr: ast.Expr, scope: Scope) -> Optional[ExprType]:
        if symbol.kind == SymbolKind.DVAR:
            if scope.constant is not None:
                self.report("SEM-DVAR-IN-CONSTANT", expr, name=symbol.name, context=scope.constant)
                return ExprType(symbol.type_name)
            return ExprType(symbol.type_name, 1)
        if not self._known_type(symbol.type_name, symbol.order):
            return None
        return ExprType(symbol.type_name)

    def _infer_Index(self, expr: ast.Index, scope: Scope):
        name = expr.base.ident
        if name in scope.bindings:
            self.report("SEM-NOT-INDEXABLE", expr, name=name, kind="index")
            return None
        symbol = self.resolve(expr.base, scope)
        if symbol is None:
            return None
        if symbol.kind not in (SymbolKind.PARAMETER, SymbolKind.DVAR) or not symbol.dimension:
            kind = "scalar " + symbol.kind.value if symbol.kind in (SymbolKind.PARAMETER, SymbolKind.DVAR) \
                else symbol.kind.value
            self.report("SEM-NOT-INDEXABLE", expr, name=name, kind=kind)
            return None
        index_scope = scope.within(f"an index of '{name}'")
        index_types = [self.infer(index, index_scope) for index in expr.indices]
        if len(expr.indices) != symbol.dimension:
            self.report("SEM-INDEX-ARITY", expr, name=name, expected=symbol.dimension, got=len(expr.indices))
            return None
        ok = True
        for position, (index, got, dim) in enumerate(zip(expr.indices, index_types, symbol.dims), start=1):
            if got is None:
                ok = False
                continue
            if not self._check_index(symbol, position, index, got, dim, scope):
                ok = False
        if not ok:
            return None
        return self._symbol_value(symbol, expr, scope)

    def _check_index(self, symbol: SymbolInfo, position: int, index: ast.Expr, got: ExprType,
                     dim: ast.Expr, scope: Scope) -> bool:
        expected = self.domain_type(dim)
        if expected is None:
            return False
        if expected == "int" and self._is_range_domain(dim):
            if got.is_tuple:
                self.report("SEM-LIST-TUPLE-INDEX", index, name=symbol.name, value=expr_text(index))
                return False
            if got.base != "int":
                self.report("SEM-INDEX-TYPE", index, position=position, name=symbol.name, got=got.base,
                            expected="int", domain=expr_text(dim))
                return False
        elif got.base != expected:
            self.report("SEM-INDEX-TYPE", index, position=position, name=symbol.name, got=got.base,
                        expected=expected, domain=expr_text(dim))
            return False
        dim_elements = self.static_elements(dim)
        if dim_elements is None:
            return True
        if isinstance(index, ast.Name) and index.ident in scope.bindings:
            elements = scope.elements.get(index.ident)
            domain_text = scope.domains.get(index.ident)
            if elements is not None and domain_text != expr_text(dim):
                if not set(elements) <= set(dim_elements):
                    self.report("SEM-INDEX-DOMAIN", index, index=index.ident, domain=domain_text,
                                expected=expr_text(dim), name=symbol.name)
                    return False
        elif isinstance(index, (ast.NumberLit, ast.StringLit)):
            if index.value not in dim_elements:
                self.report("SEM-INDEX-OUT-OF-RANGE", index, value=format_value(index.value),
                            domain=expr_text(dim), name=symbol.name)
                return False
        return True

    def _is_range_domain(self, dim: ast.Expr) -> bool:
        if isinstance(dim, ast.RangeExpr):
            return True
        symbol = self.symbols.lookup(dim.ident) if isinstance(dim, ast.Name) else None
        return symbol is not None and symbol.kind == SymbolKind.RANGE

    def _infer_FieldAccess(self, expr: ast.FieldAccess, scope: Scope):
        base = self.infer(expr.base, scope)
        if base is None:
            return None
        tuple_symbol = self.symbols.tuple_type(base.base) if base.is_tuple else None
        if tuple_symbol is None:
            self.report("SEM-FIELD-ON-NONTUPLE", expr, field=expr.field_name, got=base.base)
            return None
        field_type = tuple_symbol.field_type(expr.field_name)
        if field_type is None:
            fields = ", ".join(name for _, name in tuple_symbol.fields)
            self.report("SEM-UNKNOWN-FIELD", expr, tuple=tuple_symbol.name, field=expr.field_name, fields=fields)
            return None
        return ExprType(field_type)

    def _infer_BinOp(self, expr: ast.BinOp, scope: Scope):
        left = self.infer(expr.left, scope)
        right = self.infer(expr.right, scope)
        if left is None or right is None:
            return None
        if not self.require_numeric(left, expr.left) or not self.require_numeric(right, expr.right):
            return None
        both_int = left.base in ("int", "boolean") and right.base in ("int", "boolean")
        if expr.op == "*":
            degree = left.degree + right.degree
            if degree > 1:
                self.report("SEM-NONLINEAR", expr,
                            detail=f"product of decision-variable terms '{expr_text(expr.left)}' "
                                   f"and '{expr_text(expr.right)}'")
                return None
            return ExprType("int" if both_int else "float", degree)
        if expr.op == "/":
            if right.degree > 0:
                self.report("SEM-DVAR-DIVISOR", expr)
                return None
            if is_literal_only(expr.right):
                try:
                    divisor = Evaluator(Environment()).constant(expr.right, {})
                except EvaluationError:
                    divisor = 0
                if divisor == 0:
                    self.report("SEM-DIV-ZERO", expr.right)
                    return None
            return ExprType("float", left.degree)
        return ExprType("int" if both_int else "float", max(left.degree, right.degree))

    def _infer_Neg(self, expr: ast.Neg, scope: Scope):
        got = self.infer(expr.operand, scope)
        if got is None or not self.require_numeric(got, expr.operand):
            return None
        return ExprType("int" if got.base == "boolean" else got.base, got.degree)

    def _require_boolean(self, got: Optional[ExprType], expr: ast.Expr) -> bool:
        if got is None:
            return False
        if got.base != "boolean" or got.degree > 0:
            self.report("SEM-FILTER-NOT-BOOLEAN", expr, got=got.base)
            return False
        return True

    def _infer_Not(self, expr: ast.Not, scope: Scope):
        if not self._require_boolean(self.infer(expr.operand, scope), expr.operand):
            return None
        return ExprType("boolean")

    def _infer_Logical(self, expr: ast.Logical, scope: Scope):
        left = self._require_boolean(self.infer(expr.left, scope), expr.left)
        right = self._require_boolean(self.infer(expr.right, scope), expr.right)
        return ExprType("boolean") if left and right else None

    def _infer_Compare(self, expr: ast.Compare, scope: Scope):
        types = [self.infer(operand, scope) for operand in expr.operands]
        if expr.is_chain:
            self.report("SEM-CHAINED-CMP", expr)
            return None
        if any(t is None for t in types):
            return None
        left, right = types
        if left.is_numeric and right.is_numeric:
            return ExprType("boolean", max(left.degree, right.degree))
        if left.base == right.base:
            # strings compare lexicographically, tuples by equality
            if left.base == "string" or expr.ops[0] in ("==", "!="):
                return ExprType("boolean")
        if left.is_numeric:
            self.require_numeric(right, expr.operands[1])
        else:
            self.require_numeric(left, expr.operands[0])
        return None

    def _infer_Paren(self, expr: ast.Paren, scope: Scope):
        return self.infer(expr.inner, scope)

    def _infer_RangeExpr(self, expr: ast.RangeExpr, scope: Scope):
        self.report("SEM-NOT-A-VALUE", expr, name=expr_text(expr), kind="range")
        return None

    def _infer_Aggregate(self, expr: ast.Aggregate, scope: Scope):
        inner = self.bind(expr.binders, expr.condition, scope)
        body = self.infer(expr.body, inner)
        if body is None or not self.require_numeric(body, expr.body):
            return None
        if expr.kind != "sum" and body.degree > 0:
            self.report("SEM-AGG-DVAR", expr, func=expr.kind)
            return None
        base = "int" if body.base in ("int", "boolean") else "float"
        return ExprType(base, body.degree)

    def _infer_Call(self, expr: ast.Call, scope: Scope):
        if expr.func not in FUNCTIONS:
            self.report("SEM-UNKNOWN-FUNCTION", expr, name=expr.func)
            return None
        low, high = FUNCTIONS[expr.func]
        if len(expr.args) < low or (high is not None and len(expr.args) > high):
            expected = str(low) if low == high else f"at least {low}"
            self.report("SEM-FUNCTION-ARITY", expr, name=expr.func, expected=expected, got=len(expr.args))
            return None
        if expr.func == "card":
            return ExprType("int") if self.check_domain(expr.args[0], scope) is not None else None
        arg_scope = scope.within(f"the argument of '{expr.func}'")
        types = [self.infer(arg, arg_scope) for arg in expr.args]
        if any(t is None for t in types):
            return None
        for got, arg in zip(types, expr.args):
            if not self.require_numeric(got, arg):
                return None
        if expr.func in ("floor", "ceil"):
            return ExprType("int")
        all_int = all(t.base in ("int", "boolean") for t in types)
        return ExprType("int" if all_int else "float")

    def _literal_not_value(self, expr, scope: Scope, kind: str):
        self.report("SEM-NOT-A-VALUE", expr, name=expr_text(expr), kind=kind)
        return None

    def _infer_ArrayLiteral(self, expr, scope):
        return self._literal_not_value(expr, scope, "array literal")

    def _infer_SetLiteral(self, expr, scope):
        return self._literal_not_value(expr, scope, "set literal")

    def _infer_TupleLiteral(self, expr: ast.TupleLiteral, scope: Scope):
        return self._literal_not_value(expr, scope, "tuple literal")


def analyze(model: ast.ModelAst, data: ast.DataAst) -> TypedModel:
    """
    Type-check a model against its data.

    Args:
        model (ModelAst): parsed .mod file
        data (DataAst): parsed .dat file

    Returns:
        TypedModel: the model with symbols, expression types, realized data and warnings

    Raises:
        CompilationFailed: with every diagnostic found, sorted by file and line
    """
    typed = SemanticAnalyzer(model, data).run()
    logger.debug(f"Analysis succeeded with {len(typed.warnings)} warning(s)")
    return typed
