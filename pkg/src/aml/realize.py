"""
Data realization.

Walks the declarations in order, takes each value from its model initializer
or its .dat assignment, checks it against the declared type and index
domains, and stores it in an Environment. Decision variables receive their
flat positions here, in declaration order.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Set, Tuple

from . import nodes as ast
from .catalog import make_diagnostic
from .evaluator import Environment, EvaluationError, Evaluator, Unrealized, VariableBlock, product_keys
from .symbols import SymbolInfo, SymbolTable
from .values import (
    RangeValue, SetValue, TupleValue, abbreviate_number, build_array, extents_of, format_extents,
    format_value, is_number, leaves, nesting_depth, ragged_detail, type_name_of,
)
from ..models.diagnostics import Diagnostic, SourceKind

# Setup logging
logger = logging.getLogger(__name__)

INT64_MIN, INT64_MAX = -2 ** 63, 2 ** 63 - 1


class ConformError(Exception):
    """A value does not match its declaration."""

    def __init__(self, code: str, **params):
        super().__init__(code)
        self.code = code
        self.params = params


class _Mismatch(Exception):
    pass


def literal_value(literal: ast.DataLiteral) -> Any:
    """Convert a .dat literal to its raw Python form."""
    if isinstance(literal, ast.ScalarLit):
        return literal.value
    if isinstance(literal, ast.ArrayLit):
        return [literal_value(item) for item in literal.items]
    if isinstance(literal, ast.SetLit):
        return SetValue(tuple(literal_value(item) for item in literal.items))
    if isinstance(literal, ast.TupleLit):
        return tuple(literal_value(item) for item in literal.items)
    return RangeValue(literal.low, literal.high)


class DataRealizer:
    """Realize declared values into an Environment, collecting diagnostics."""

    def __init__(self, model: ast.ModelAst, symbols: SymbolTable,
                 assignments: Dict[str, ast.DataAssignment], skip: Set[str] = frozenset()):
        self.model = model
        self.symbols = symbols
        self.assignments = assignments
        self.skip = set(skip)
        self.env = Environment()
        self.evaluator = Evaluator(self.env)
        self.diagnostics: List[Diagnostic] = []
        self.unrealized: Set[str] = set()

    def run(self) -> Tuple[Environment, List[Diagnostic]]:
        for decl in self.model.declarations:
            if isinstance(decl, ast.TupleDecl):
                continue
            symbol = self.symbols.lookup(decl.name)
            if symbol is None or symbol.decl is not decl:
                continue
            if decl.name in self.skip:
                self.unrealized.add(decl.name)
                continue
            try:
                self._realize(decl, symbol)
            except Unrealized:
                self.unrealized.add(decl.name)
            except EvaluationError as exc:
                span = exc.span or decl.span
                self._report(exc.code, span, SourceKind.MODEL, context=f"'{decl.name}'", **exc.params)
                self.unrealized.add(decl.name)
            except ConformError as exc:
                assignment = self.assignments.get(decl.name)
                if getattr(decl, "external", False) and assignment is not None:
                    self._report(exc.code, assignment.span, SourceKind.DATA, **exc.params)
                else:
                    self._report(exc.code, decl.span, SourceKind.MODEL, **exc.params)
                self.unrealized.add(decl.name)
        logger.debug(f"Realized {len(self.env.values)} values and {self.env.variable_count} flat variables")
        return self.env, self.diagnostics

    def _report(self, code: str, span, source: SourceKind, **params):
        self.diagnostics.append(make_diagnostic(code, span.line, span.column, source, **params))

    def _raw(self, decl) -> Tuple[Optional[Any], str]:
        """Raw value and its origin ('data' or 'init'); None when missing."""
        if decl.external:
            assignment = self.assignments.get(decl.name)
            if assignment is None:
                self._report("SEM-MISSING-DATA", decl.span, SourceKind.MODEL, name=decl.name)
                return None, "data"
            return literal_value(assignment.value), "data"
        return self.evaluator.evaluate(decl.init, {}), "init"

    def _realize(self, decl, symbol: SymbolInfo):
        if isinstance(decl, ast.RangeDecl):
            self._realize_range(decl)
        elif isinstance(decl, ast.SetDecl):
            self._realize_set(decl, symbol)
        elif isinstance(decl, ast.ParamDecl):
            self._realize_param(decl, symbol)
        elif isinstance(decl, ast.DvarDecl):
            self._realize_dvar(decl)

    def _realize_range(self, decl: ast.RangeDecl):
        if decl.external:
            # A range assigned in the data file is reported by the analyzer
            if decl.name not in self.assignments:
                self._report("SEM-MISSING-DATA", decl.span, SourceKind.MODEL, name=decl.name)
            self.unrealized.add(decl.name)
            return
        value = self.evaluator.evaluate(ast.RangeExpr(decl.low, decl.high, decl.span), {})
        if len(value) == 0:
            self._report("SEM-RANGE-EMPTY", decl.span, SourceKind.MODEL,
                         name=decl.name, low=value.low, high=value.high)
        self.env.values[decl.name] = value

    def _realize_set(self, decl: ast.SetDecl, symbol: SymbolInfo):
        raw, origin = self._raw(decl)
        if raw is None:
            self.unrealized.add(decl.name)
            return
        if isinstance(raw, RangeValue) and symbol.type_name == "int" and origin == "init":
            raw = SetValue(raw.elements)
        if not isinstance(raw, SetValue):
            raise self._mismatch(decl.name, raw, "{" + symbol.type_name + "} set", origin)
        elements = []
        for item in raw.elements:
            value = self._conform_element(decl.name, item, symbol.type_name)
            if value in elements:
                self._report("SEM-SET-DUPLICATE-ELEMENT", self._anchor(decl, origin), self._source(origin),
                             name=decl.name, value=format_value(value))
                continue
            elements.append(value)
        self.env.values[decl.name] = SetValue(tuple(elements))

    def _realize_param(self, decl: ast.ParamDecl, symbol: SymbolInfo):
        domains = [self.evaluator.domain(dim, {}) for dim in decl.dims]
        raw, origin = self._raw(decl)
        if raw is None:
            self.unrealized.add(decl.name)
            return
        if not decl.dims:
            self.env.values[decl.name] = self._conform(decl.name, raw, symbol.type_name, origin)
            return
        depth = len(domains)
        if not isinstance(raw, list):
            if isinstance(raw, (SetValue, RangeValue)):
                raise self._mismatch(decl.name, raw, f"{symbol.type_name} array", origin)
            raise ConformError("SEM-DATA-DIMENSION", name=decl.name, expected=depth, got=0)
        got_depth = nesting_depth(raw)
        detail = ragged_detail(raw, min(depth, got_depth))
        if detail:
            raise ConformError("SEM-DATA-RAGGED", name=decl.name, detail=detail)
        if got_depth != depth:
            raise ConformError("SEM-DATA-DIMENSION", name=decl.name, expected=depth, got=got_depth)
        expected = tuple(len(d) for d in domains)
        got = extents_of(raw, depth)
        if got != expected:
            raise ConformError("SEM-SHAPE-MISMATCH", name=decl.name,
                               expected=format_extents(expected), got=format_extents(got))
        values = [self._conform(decl.name, leaf, symbol.type_name, origin) for leaf in leaves(raw, depth)]
        self.env.values[decl.name] = build_array(domains, values, symbol.type_name)

    def _realize_dvar(self, decl: ast.DvarDecl):
        domains = tuple(tuple(self.evaluator.domain(dim, {})) for dim in decl.dims)
        lower = upper = None
        if decl.bounds is not None:
            low = self.evaluator.constant(decl.bounds.low, {})
            high = self.evaluator.constant(decl.bounds.high, {})
            if not is_number(low) or not is_number(high) or math.isnan(low) or math.isnan(high):
                raise ConformError("SEM-DVAR-BOUNDS", name=decl.name, detail="bounds must be numeric")
            if low > high:
                raise ConformError("SEM-DVAR-BOUNDS", name=decl.name,
                                   detail=f"lower bound {format_value(low)} exceeds upper bound {format_value(high)}")
            try:
                lower, upper = float(low), float(high)
            except OverflowError:
                raise ConformError("SEM-DVAR-BOUNDS", name=decl.name, detail="bounds are too large")
        positions = {}
        for key in product_keys(domains):
            positions[key] = self.env.variable_count
            self.env.variable_count += 1
        self.env.variables[decl.name] = VariableBlock(decl.name, domains, positions, lower, upper)

    # Conformance

    def _anchor(self, decl, origin: str):
        if origin == "data":
            return self.assignments[decl.name].span
        return decl.span

    @staticmethod
    def _source(origin: str) -> SourceKind:
        return SourceKind.DATA if origin == "data" else SourceKind.MODEL

    @staticmethod
    def _mismatch(name: str, raw: Any, expected: str, origin: str) -> ConformError:
        if origin == "data":
            return ConformError("SEM-DATA-TYPE-MISMATCH", name=name, value=format_value(raw),
                                got=type_name_of(raw), expected=expected)
        return ConformError("SEM-TYPE-MISMATCH-INIT", name=name, got=type_name_of(raw), expected=expected)

    def _conform(self, name: str, raw: Any, type_name: str, origin: str) -> Any:
        try:
            return self._scalar(name, raw, type_name)
        except _Mismatch:
            raise self._mismatch(name, raw, type_name, origin)

    def _conform_element(self, name: str, raw: Any, type_name: str) -> Any:
        try:
            return self._scalar(name, raw, type_name)
        except _Mismatch:
            raise ConformError("SEM-SET-ELEMENT-TYPE", name=name, expected=type_name,
                               value=format_value(raw), got=type_name_of(raw))

    def _scalar(self, name: str, raw: Any, type_name: str) -> Any:
        if type_name == "float" and is_number(raw):
            try:
                return float(raw)
            except OverflowError:
                raise ConformError("SEM-VALUE-OUT-OF-RANGE", value=abbreviate_number(raw), name=name,
                                   expected=type_name)
        if type_name == "int" and isinstance(raw, int) and not isinstance(raw, bool):
            if not INT64_MIN <= raw <= INT64_MAX:
                raise ConformError("SEM-VALUE-OUT-OF-RANGE", value=abbreviate_number(raw), name=name,
                                   expected="int (64-bit)")
            return raw
        if type_name == "boolean" and isinstance(raw, bool):
            return raw
        if type_name == "string" and isinstance(raw, str):
            return raw
        tuple_symbol = self.symbols.tuple_type(type_name)
        if tuple_symbol is not None:
            if isinstance(raw, TupleValue) and raw.type_name == type_name:
                return raw
            if isinstance(raw, tuple):
                return self._tuple(name, raw, tuple_symbol)
        raise _Mismatch()

    def _tuple(self, name: str, raw: tuple, tuple_symbol: SymbolInfo) -> TupleValue:
        fields = tuple_symbol.fields
        if len(raw) != len(fields):
            raise ConformError("SEM-TUPLE-ARITY", value=format_value(raw), name=name, got=len(raw),
                               tuple=tuple_symbol.name, expected=len(fields))
        items = []
        for (field_type, field_name), item in zip(fields, raw):
            try:
                items.append(self._scalar(name, item, field_type))
            except _Mismatch:
                raise ConformError("SEM-TUPLE-FIELD-TYPE", field=field_name, value=format_value(raw),
                                   name=name, got=type_name_of(item), expected=field_type)
        return TupleValue(tuple_symbol.name, tuple(f for _, f in fields), tuple(items))
