"""
Token definitions shared by the model and data lexers.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Union


class TokenKind(Enum):
    """Token kinds. Names appear verbatim in syntax diagnostics."""
    IDENT = "identifier"
    NAME = "name"
    INT = "integer literal"
    FLOAT = "float literal"
    STRING = "string literal"
    BOOL = "boolean literal"

    KW_INT = "int"
    KW_FLOAT = "float"
    KW_BOOLEAN = "boolean"
    KW_STRING = "string"
    KW_RANGE = "range"
    KW_DVAR = "dvar"
    KW_TUPLE = "tuple"
    KW_MINIMIZE = "minimize"
    KW_MAXIMIZE = "maximize"
    KW_SUBJECT = "subject"
    KW_TO = "to"
    KW_FORALL = "forall"
    KW_SUM = "sum"
    KW_MIN = "min"
    KW_MAX = "max"
    KW_IN = "in"

    SEMI = ";"
    COMMA = ","
    COLON = ":"
    DOT = "."
    DOTDOT = ".."
    ELLIPSIS = "..."
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RBRACKET = "]"
    LBRACE = "{"
    RBRACE = "}"
    ASSIGN = "="
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    LE = "<="
    GE = ">="
    EQ = "=="
    NE = "!="
    LT = "<"
    GT = ">"
    AND = "&&"
    OR = "||"
    NOT = "!"
    EOF = "end of input"


KEYWORDS = {
    "int": TokenKind.KW_INT,
    "float": TokenKind.KW_FLOAT,
    "boolean": TokenKind.KW_BOOLEAN,
    "string": TokenKind.KW_STRING,
    "range": TokenKind.KW_RANGE,
    "dvar": TokenKind.KW_DVAR,
    "tuple": TokenKind.KW_TUPLE,
    "minimize": TokenKind.KW_MINIMIZE,
    "maximize": TokenKind.KW_MAXIMIZE,
    "subject": TokenKind.KW_SUBJECT,
    "to": TokenKind.KW_TO,
    "forall": TokenKind.KW_FORALL,
    "sum": TokenKind.KW_SUM,
    "min": TokenKind.KW_MIN,
    "max": TokenKind.KW_MAX,
    "in": TokenKind.KW_IN,
}

# Longest first so that "..." wins over ".." and "<=" over "<"
PUNCTUATION = [
    ("...", TokenKind.ELLIPSIS),
    ("..", TokenKind.DOTDOT),
    ("<=", TokenKind.LE),
    (">=", TokenKind.GE),
    ("==", TokenKind.EQ),
    ("!=", TokenKind.NE),
    ("&&", TokenKind.AND),
    ("||", TokenKind.OR),
    (";", TokenKind.SEMI),
    (",", TokenKind.COMMA),
    (":", TokenKind.COLON),
    (".", TokenKind.DOT),
    ("(", TokenKind.LPAREN),
    (")", TokenKind.RPAREN),
    ("[", TokenKind.LBRACKET),
    ("]", TokenKind.RBRACKET),
    ("{", TokenKind.LBRACE),
    ("}", TokenKind.RBRACE),
    ("=", TokenKind.ASSIGN),
    ("+", TokenKind.PLUS),
    ("-", TokenKind.MINUS),
    ("*", TokenKind.STAR),
    ("/", TokenKind.SLASH),
    ("<", TokenKind.LT),
    (">", TokenKind.GT),
    ("!", TokenKind.NOT),
]


@dataclass(frozen=True)
class Span:
    """Source location: 1-based line and column plus length."""
    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span = field(compare=False)
    value: Union[int, float, str, bool, None] = None

    def describe(self) -> str:
        """Kind and value as cited in syntax diagnostics."""
        return f"token {self.kind.name}, value '{self.text}'"


@dataclass(frozen=True)
class Comment:
    """A comment kept out-of-band, with its delimiters."""
    text: str
    span: Span = field(compare=False)
