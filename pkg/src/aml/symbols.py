"""
Symbol table and expression types used by the semantic analyzer.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from . import nodes as ast

SCALAR_TYPES = ("int", "float", "boolean", "string")
NUMERIC_TYPES = ("int", "float", "boolean")


class SymbolKind(str, Enum):
    PARAMETER = "parameter"
    RANGE = "range"
    SET = "set"
    TUPLE = "tuple type"
    DVAR = "decision variable"
    INDEX = "index"


@dataclass
class SymbolInfo:
    """One declared name."""
    name: str
    kind: SymbolKind
    type_name: str  # element type; 'int' for ranges, the tuple name for tuple types
    decl: object
    order: int
    dims: Tuple[ast.Expr, ...] = ()
    external: bool = False
    fields: Tuple[Tuple[str, str], ...] = ()  # (type, name) for tuple types

    @property
    def line(self) -> int:
        return self.decl.span.line

    @property
    def dimension(self) -> int:
        return len(self.dims)

    def field_type(self, name: str) -> Optional[str]:
        for type_name, field_name in self.fields:
            if field_name == name:
                return type_name
        return None


@dataclass(frozen=True)
class ExprType:
    """Inferred type: base type name plus degree in decision variables (0 constant, 1 linear)."""
    base: str
    degree: int = 0

    @property
    def is_numeric(self) -> bool:
        return self.base in NUMERIC_TYPES

    @property
    def is_tuple(self) -> bool:
        return self.base not in SCALAR_TYPES and self.base not in ("set", "range", "array")


@dataclass
class SymbolTable:
    """Declared names in declaration order."""
    symbols: Dict[str, SymbolInfo] = field(default_factory=dict)

    def declare(self, symbol: SymbolInfo) -> Optional[SymbolInfo]:
        """Add a symbol; returns the earlier declaration when the name is taken."""
        existing = self.symbols.get(symbol.name)
        if existing is not None:
            return existing
        self.symbols[symbol.name] = symbol
        return None

    def lookup(self, name: str) -> Optional[SymbolInfo]:
        return self.symbols.get(name)

    def tuple_type(self, name: str) -> Optional[SymbolInfo]:
        symbol = self.symbols.get(name)
        if symbol is not None and symbol.kind == SymbolKind.TUPLE:
            return symbol
        return None

    def of_kind(self, kind: SymbolKind) -> List[SymbolInfo]:
        return [s for s in self.symbols.values() if s.kind == kind]

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def __len__(self) -> int:
        return len(self.symbols)
