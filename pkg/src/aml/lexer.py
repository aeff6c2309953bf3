"""
Lexer for .mod model files and .dat data files.

Whitespace and comments are skipped; comments are kept out-of-band on the
returned token list so the printer can restore them.
"""

import logging
import string
from typing import List, Union

from .catalog import make_diagnostic
from .errors import AmlSyntaxError
from .tokens import KEYWORDS, PUNCTUATION, Comment, Span, Token, TokenKind
from ..models.diagnostics import SourceKind

# Setup logging
logger = logging.getLogger(__name__)

DIGITS = frozenset(string.digits)
IDENT_START = frozenset(string.ascii_letters + "_")
IDENT_CHARS = IDENT_START | DIGITS


class TokenList(list):
    """List of tokens ending in EOF, with the comments seen while lexing."""

    def __init__(self, tokens=(), comments=(), kind: SourceKind = SourceKind.MODEL):
        super().__init__(tokens)
        self.comments: List[Comment] = list(comments)
        self.kind = kind


class Lexer:
    """Single-pass scanner tracking line and column."""

    def __init__(self, source: str, kind: SourceKind):
        self.source = source
        self.kind = kind
        self.pos = 0
        self.line = 1
        self.column = 1
        self.tokens: List[Token] = []
        self.comments: List[Comment] = []

    def _peek(self, offset: int = 0) -> str:
        index = self.pos + offset
        return self.source[index] if index < len(self.source) else ""

    def _advance(self, count: int = 1) -> str:
        text = self.source[self.pos:self.pos + count]
        for ch in text:
            if ch == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
        self.pos += count
        return text

    def _error(self, code: str, line: int, column: int, **params):
        raise AmlSyntaxError(make_diagnostic(code, line, column, self.kind, **params))

    def _emit(self, kind: TokenKind, text: str, line: int, column: int, value=None):
        self.tokens.append(Token(kind, text, Span(line, column, len(text)), value))

    def run(self) -> TokenList:
        while self.pos < len(self.source):
            ch = self._peek()
            if ch in " \t\r\n\f":
                self._advance()
            elif ch == "/" and self._peek(1) == "/":
                self._line_comment()
            elif ch == "/" and self._peek(1) == "*":
                self._block_comment()
            elif ch in DIGITS:
                self._number()
            elif ch == '"':
                self._string()
            elif ch in IDENT_START:
                self._word()
            else:
                self._punctuation()
        self.tokens.append(Token(TokenKind.EOF, "", Span(self.line, self.column, 0)))
        return TokenList(self.tokens, self.comments, self.kind)

    def _line_comment(self):
        line, column, start = self.line, self.column, self.pos
        while self.pos < len(self.source) and self._peek() != "\n":
            self._advance()
        text = self.source[start:self.pos].rstrip("\r")
        self.comments.append(Comment(text, Span(line, column, len(text))))

    def _block_comment(self):
        line, column, start = self.line, self.column, self.pos
        end = self.source.find("*/", self.pos + 2)
        if end < 0:
            self._error("LEX-UNTERMINATED-COMMENT", line, column)
        self._advance(end + 2 - self.pos)
        text = self.source[start:self.pos]
        self.comments.append(Comment(text, Span(line, column, len(text))))

    def _number(self):
        line, column, start = self.line, self.column, self.pos
        is_float = False
        while self._peek() in DIGITS:
            self._advance()
        # "1..N" is INT followed by DOTDOT
        if self._peek() == "." and self._peek(1) in DIGITS:
            is_float = True
            self._advance()
            while self._peek() in DIGITS:
                self._advance()
        if self._peek() in ("e", "E"):
            sign = 1 if self._peek(1) in ("+", "-") else 0
            if self._peek(1 + sign) in DIGITS:
                is_float = True
                self._advance(1 + sign)
                while self._peek() in DIGITS:
                    self._advance()
        text = self.source[start:self.pos]
        if is_float:
            self._emit(TokenKind.FLOAT, text, line, column, float(text))
        else:
            try:
                value = int(text)
            except ValueError:
                # beyond the interpreter's digit limit
                value = float(text)
            self._emit(TokenKind.INT, text, line, column, value)

    def _string(self):
        line, column, start = self.line, self.column, self.pos
        self._advance()
        chars = []
        escapes = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}
        while True:
            ch = self._peek()
            if ch == "" or ch == "\n":
                self._error("LEX-UNTERMINATED-STRING", line, column)
            if ch == '"':
                self._advance()
                break
            if ch == "\\" and self._peek(1) in escapes:
                chars.append(escapes[self._peek(1)])
                self._advance(2)
                continue
            chars.append(self._advance())
        self._emit(TokenKind.STRING, self.source[start:self.pos], line, column, "".join(chars))

    def _word(self):
        line, column, start = self.line, self.column, self.pos
        while self._peek() in IDENT_CHARS:
            self._advance()
        text = self.source[start:self.pos]
        if text in ("true", "false"):
            self._emit(TokenKind.BOOL, text, line, column, text == "true")
        elif self.kind == SourceKind.DATA:
            self._emit(TokenKind.NAME, text, line, column, text)
        elif text in KEYWORDS:
            self._emit(KEYWORDS[text], text, line, column)
        else:
            self._emit(TokenKind.IDENT, text, line, column, text)

    def _punctuation(self):
        line, column = self.line, self.column
        for text, kind in PUNCTUATION:
            if self.source.startswith(text, self.pos):
                self._advance(len(text))
                self._emit(kind, text, line, column)
                return
        self._error("LEX-ILLEGAL-CHAR", line, column, char=self._peek(), file=self.kind.value)


def tokenize(source: str, kind: Union[SourceKind, str] = SourceKind.MODEL) -> TokenList:
    """
    Tokenize a model or data file.

    Args:
        source (str): file contents
        kind (SourceKind): model or data

    Returns:
        TokenList: tokens ending with EOF; comments on ``.comments``

    Raises:
        AmlSyntaxError: on illegal characters or unterminated strings/comments
    """
    kind = SourceKind(kind)
    tokens = Lexer(source, kind).run()
    logger.debug(f"Lexed {len(tokens)} tokens and {len(tokens.comments)} comments from {kind.value} source")
    return tokens


def strip_comments(source: str, kind: Union[SourceKind, str] = SourceKind.MODEL) -> str:
    """
    Source text with its comments removed.

    Lines holding nothing but a comment are dropped. Text that does not lex is
    returned unchanged.
    """
    try:
        comments = tokenize(source, kind).comments
    except AmlSyntaxError:
        return source
    if not comments:
        return source

    line_starts = [0]
    for line in source.split("\n")[:-1]:
        line_starts.append(line_starts[-1] + len(line) + 1)

    parts: List[str] = []
    pos = 0
    for comment in comments:
        start = line_starts[comment.span.line - 1] + comment.span.column - 1
        end = start + len(comment.text)
        line_start = source.rfind("\n", 0, start) + 1
        line_end = source.find("\n", end)
        line_end = len(source) if line_end < 0 else line_end
        if line_start >= pos and not source[line_start:start].strip() and not source[end:line_end].strip():
            parts.append(source[pos:line_start])
            pos = min(line_end + 1, len(source))
        else:
            parts.append(source[pos:start].rstrip(" \t"))
            pos = end
    parts.append(source[pos:])
    return "".join(parts)
