"""
Recursive-descent parsers for .mod and .dat token streams.

Both parsers stop at the first syntax error and raise AmlSyntaxError with a
catalogued diagnostic anchored at the offending token.
"""

import logging
from typing import List, Optional, Sequence, Tuple

from . import nodes as ast
from .catalog import make_diagnostic
from .errors import AmlSyntaxError
from .lexer import TokenList
from .tokens import Token, TokenKind
from ..models.diagnostics import SourceKind

# Setup logging
logger = logging.getLogger(__name__)

T = TokenKind

SCALAR_TYPES = {T.KW_INT: "int", T.KW_FLOAT: "float", T.KW_BOOLEAN: "boolean", T.KW_STRING: "string"}
DVAR_TYPES = {T.KW_INT: "int", T.KW_FLOAT: "float", T.KW_BOOLEAN: "boolean"}
COMPARISONS = {T.LE: "<=", T.GE: ">=", T.EQ: "==", T.NE: "!=", T.LT: "<", T.GT: ">"}
AGGREGATES = {T.KW_SUM: "sum", T.KW_MIN: "min", T.KW_MAX: "max"}


class ParserBase:
    """Token cursor shared by the model and data parsers."""

    source_kind = SourceKind.MODEL

    def __init__(self, tokens: Sequence[Token]):
        if not tokens or tokens[-1].kind != T.EOF:
            raise ValueError("token stream must end with EOF")
        self.tokens = list(tokens)
        self.pos = 0

    @property
    def nt(self) -> Token:
        """Next (lookahead) token."""
        return self.tokens[self.pos]

    def lookahead(self, offset: int) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def peek(self, *kinds: TokenKind) -> bool:
        return self.nt.kind in kinds

    def advance(self) -> Token:
        token = self.nt
        if token.kind != T.EOF:
            self.pos += 1
        return token

    def accept(self, kind: TokenKind) -> Optional[Token]:
        if self.nt.kind == kind:
            return self.advance()
        return None

    def match(self, kind: TokenKind, expected: Optional[str] = None) -> Token:
        if self.nt.kind != kind:
            self.error(expected or f"'{kind.value}'")
        return self.advance()

    def error(self, expected: str):
        raise NotImplementedError


class ModelParser(ParserBase):
    """Parser for .mod files."""

    def error(self, expected: str):
        token = self.nt
        if token.kind == T.EOF:
            diagnostic = make_diagnostic("SYN-UNEXPECTED-EOF", token.span.line, token.span.column,
                                         SourceKind.MODEL, expected=expected)
        else:
            diagnostic = make_diagnostic("SYN-UNEXPECTED-TOKEN", token.span.line, token.span.column,
                                         SourceKind.MODEL, token=token.describe(), expected=expected)
        raise AmlSyntaxError(diagnostic)

    def parse_model(self, comments=()) -> ast.ModelAst:
        declarations: List[ast.Declaration] = []
        objectives: List[ast.Objective] = []
        constraints: List[ast.ConstraintItem] = []
        while not self.peek(T.EOF):
            if self.peek(T.KW_MINIMIZE, T.KW_MAXIMIZE):
                objectives.append(self.parse_objective())
            elif self.peek(T.KW_SUBJECT):
                constraints.extend(self.parse_subject_to())
            else:
                declarations.append(self.parse_declaration())
        return ast.ModelAst(tuple(declarations), tuple(objectives), tuple(constraints), tuple(comments))

    # Declarations

    def parse_declaration(self) -> ast.Declaration:
        if self.peek(T.KW_TUPLE):
            return self.parse_tuple_declaration()
        if self.peek(T.KW_RANGE):
            return self.parse_range_declaration()
        if self.peek(T.KW_DVAR):
            return self.parse_dvar_declaration()
        if self.peek(T.LBRACE):
            return self.parse_set_declaration()
        if self.nt.kind in SCALAR_TYPES or self.peek(T.IDENT):
            return self.parse_param_declaration()
        self.error("a declaration, objective or 'subject to' block")

    def parse_type_name(self) -> str:
        if self.nt.kind in SCALAR_TYPES:
            return SCALAR_TYPES[self.advance().kind]
        return self.match(T.IDENT, "a type name").text

    def parse_tuple_declaration(self) -> ast.TupleDecl:
        start = self.match(T.KW_TUPLE)
        name = self.match(T.IDENT, "a tuple type name").text
        self.match(T.LBRACE)
        fields = []
        while not self.peek(T.RBRACE):
            field_start = self.nt
            type_name = self.parse_type_name()
            field_name = self.match(T.IDENT, "a field name").text
            self.match(T.SEMI)
            fields.append(ast.TupleField(type_name, field_name, field_start.span))
        self.match(T.RBRACE)
        self.accept(T.SEMI)
        return ast.TupleDecl(name, tuple(fields), start.span)

    def parse_range_declaration(self) -> ast.RangeDecl:
        start = self.match(T.KW_RANGE)
        name = self.match(T.IDENT, "a range name").text
        low = high = None
        external = True
        if self.accept(T.ASSIGN):
            if not self.accept(T.ELLIPSIS):
                low = self.parse_additive()
                self.match(T.DOTDOT)
                high = self.parse_additive()
                external = False
        self.match(T.SEMI)
        return ast.RangeDecl(name, low, high, external, start.span)

    def parse_set_declaration(self) -> ast.SetDecl:
        start = self.match(T.LBRACE)
        elem_type = self.parse_type_name()
        self.match(T.RBRACE)
        name = self.match(T.IDENT, "a set name").text
        init, external = self.parse_initializer()
        self.match(T.SEMI)
        return ast.SetDecl(elem_type, name, init, external, start.span)

    def parse_param_declaration(self) -> ast.ParamDecl:
        start = self.nt
        type_name = self.parse_type_name()
        name = self.match(T.IDENT, "a parameter name").text
        dims = self.parse_dims()
        init, external = self.parse_initializer()
        self.match(T.SEMI)
        return ast.ParamDecl(type_name, name, dims, init, external, start.span)

    def parse_dvar_declaration(self) -> ast.DvarDecl:
        start = self.match(T.KW_DVAR)
        if self.nt.kind not in DVAR_TYPES:
            self.error("'float', 'int' or 'boolean'")
        type_name = DVAR_TYPES[self.advance().kind]
        nonneg = bool(self.accept(T.PLUS))
        name = self.match(T.IDENT, "a decision variable name").text
        dims = self.parse_dims()
        bounds = None
        if self.peek(T.KW_IN):
            bound_start = self.advance()
            low = self.parse_additive()
            self.match(T.DOTDOT)
            high = self.parse_additive()
            bounds = ast.RangeExpr(low, high, bound_start.span)
        self.match(T.SEMI)
        return ast.DvarDecl(type_name, nonneg, name, dims, bounds, start.span)

    def parse_dims(self) -> Tuple[ast.Expr, ...]:
        dims = []
        while self.accept(T.LBRACKET):
            dims.append(self.parse_domain())
            while self.accept(T.COMMA):
                dims.append(self.parse_domain())
            self.match(T.RBRACKET)
        return tuple(dims)

    def parse_domain(self) -> ast.Expr:
        start = self.nt
        low = self.parse_additive()
        if self.accept(T.DOTDOT):
            return ast.RangeExpr(low, self.parse_additive(), start.span)
        return low

    def parse_initializer(self) -> Tuple[Optional[ast.Expr], bool]:
        if not self.accept(T.ASSIGN):
            return None, True
        if self.accept(T.ELLIPSIS):
            return None, True
        return self.parse_expression(), False

    # Objective and constraints

    def parse_objective(self) -> ast.Objective:
        start = self.advance()
        sense = "minimize" if start.kind == T.KW_MINIMIZE else "maximize"
        label = self.parse_label()
        expr = self.parse_expression()
        self.match(T.SEMI)
        return ast.Objective(sense, label, expr, start.span)

    def parse_label(self) -> Optional[str]:
        if self.peek(T.IDENT) and self.lookahead(1).kind == T.COLON:
            label = self.advance().text
            self.advance()
            return label
        return None

    def parse_subject_to(self) -> List[ast.ConstraintItem]:
        self.match(T.KW_SUBJECT)
        self.match(T.KW_TO)
        self.match(T.LBRACE)
        items = []
        while not self.peek(T.RBRACE):
            items.append(self.parse_constraint_item())
        self.match(T.RBRACE)
        self.accept(T.SEMI)
        return items

    def parse_constraint_item(self) -> ast.ConstraintItem:
        if self.peek(T.KW_FORALL):
            return self.parse_forall()
        start = self.nt
        label = self.parse_label()
        body = self.parse_expression()
        self.match(T.SEMI)
        return ast.Constraint(label, body, start.span)

    def parse_forall(self) -> ast.ForallBlock:
        start = self.match(T.KW_FORALL)
        self.match(T.LPAREN)
        binders, condition = self.parse_binders()
        self.match(T.RPAREN)
        if self.accept(T.LBRACE):
            items = []
            while not self.peek(T.RBRACE):
                items.append(self.parse_constraint_item())
            self.match(T.RBRACE)
            self.accept(T.SEMI)
            return ast.ForallBlock(binders, condition, tuple(items), True, start.span)
        item = self.parse_constraint_item()
        return ast.ForallBlock(binders, condition, (item,), False, start.span)

    def parse_binders(self) -> Tuple[Tuple[ast.Binder, ...], Optional[ast.Expr]]:
        binders = [self.parse_binder()]
        while self.accept(T.COMMA):
            binders.append(self.parse_binder())
        condition = None
        if self.accept(T.COLON):
            condition = self.parse_expression()
        return tuple(binders), condition

    def parse_binder(self) -> ast.Binder:
        name = self.match(T.IDENT, "an index name")
        self.match(T.KW_IN)
        return ast.Binder(name.text, self.parse_domain(), name.span)

    # Expressions, lowest precedence first

    def parse_expression(self) -> ast.Expr:
        return self.parse_or()

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.peek(T.OR):
            op = self.advance()
            left = ast.Logical("||", left, self.parse_and(), op.span)
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_not()
        while self.peek(T.AND):
            op = self.advance()
            left = ast.Logical("&&", left, self.parse_not(), op.span)
        return left

    def parse_not(self) -> ast.Expr:
        if self.peek(T.NOT):
            op = self.advance()
            return ast.Not(self.parse_not(), op.span)
        return self.parse_comparison()

    def parse_comparison(self) -> ast.Expr:
        start = self.nt
        first = self.parse_additive()
        ops, operands = [], [first]
        while self.nt.kind in COMPARISONS:
            ops.append(COMPARISONS[self.advance().kind])
            operands.append(self.parse_additive())
        if not ops:
            return first
        return ast.Compare(tuple(ops), tuple(operands), start.span)

    def parse_additive(self) -> ast.Expr:
        left = self.parse_term()
        while self.peek(T.PLUS, T.MINUS):
            op = self.advance()
            left = ast.BinOp(op.text, left, self.parse_term(), op.span)
        return left

    def parse_term(self) -> ast.Expr:
        left = self.parse_unary()
        while self.peek(T.STAR, T.SLASH):
            op = self.advance()
            left = ast.BinOp(op.text, left, self.parse_unary(), op.span)
        return left

    def parse_unary(self) -> ast.Expr:
        if self.peek(T.MINUS):
            op = self.advance()
            return ast.Neg(self.parse_unary(), op.span)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while True:
            if self.peek(T.LBRACKET):
                if not isinstance(expr, (ast.Name, ast.Index)):
                    self.error("an operator or ';'")
                bracket = self.advance()
                indices = [self.parse_expression()]
                while self.accept(T.COMMA):
                    indices.append(self.parse_expression())
                self.match(T.RBRACKET)
                if isinstance(expr, ast.Name):
                    expr = ast.Index(expr, tuple(indices), expr.span)
                else:
                    expr = ast.Index(expr.base, expr.indices + tuple(indices), expr.span)
            elif self.peek(T.DOT):
                dot = self.advance()
                field_name = self.match(T.IDENT, "a field name").text
                expr = ast.FieldAccess(expr, field_name, dot.span)
            else:
                return expr

    def parse_primary(self) -> ast.Expr:
        token = self.nt
        kind = token.kind
        if kind in (T.INT, T.FLOAT):
            self.advance()
            return ast.NumberLit(token.value, token.span)
        if kind == T.STRING:
            self.advance()
            return ast.StringLit(token.value, token.span)
        if kind == T.BOOL:
            self.advance()
            return ast.BoolLit(token.value, token.span)
        if kind == T.IDENT:
            self.advance()
            if self.accept(T.LPAREN):
                args = []
                if not self.peek(T.RPAREN):
                    args.append(self.parse_expression())
                    while self.accept(T.COMMA):
                        args.append(self.parse_expression())
                self.match(T.RPAREN)
                return ast.Call(token.text, tuple(args), token.span)
            return ast.Name(token.text, token.span)
        if kind == T.LPAREN:
            self.advance()
            inner = self.parse_expression()
            self.match(T.RPAREN)
            return ast.Paren(inner, token.span)
        if kind in AGGREGATES:
            return self.parse_aggregate()
        if kind == T.LBRACKET:
            self.advance()
            items = self.parse_items(T.RBRACKET)
            return ast.ArrayLiteral(items, token.span)
        if kind == T.LBRACE:
            self.advance()
            items = self.parse_items(T.RBRACE)
            return ast.SetLiteral(items, token.span)
        if kind == T.LT:
            self.advance()
            items = [self.parse_additive()]
            while self.accept(T.COMMA):
                items.append(self.parse_additive())
            self.match(T.GT)
            return ast.TupleLiteral(tuple(items), token.span)
        self.error("an expression")

    def parse_items(self, closing: TokenKind) -> Tuple[ast.Expr, ...]:
        items = []
        if not self.peek(closing):
            items.append(self.parse_additive())
            while self.accept(T.COMMA):
                items.append(self.parse_additive())
        self.match(closing)
        return tuple(items)

    def parse_aggregate(self) -> ast.Aggregate:
        token = self.advance()
        self.match(T.LPAREN)
        binders, condition = self.parse_binders()
        self.match(T.RPAREN)
        # The body binds at multiplicative level: "sum(i in I) a[i] + b" sums only a[i]
        body = self.parse_term()
        return ast.Aggregate(AGGREGATES[token.kind], binders, condition, body, token.span)


class DataParser(ParserBase):
    """Parser for .dat files: 'name = literal;' assignments only."""

    source_kind = SourceKind.DATA

    def error(self, expected: str = ""):
        token = self.nt
        if token.kind == T.EOF and self.pos > 0:
            token = self.tokens[self.pos - 1]
        raise AmlSyntaxError(make_diagnostic("DAT-SYNTAX", token.span.line, token.span.column,
                                             SourceKind.DATA, token=token.describe()))

    def parse_data(self, comments=()) -> ast.DataAst:
        assignments = []
        while not self.peek(T.EOF):
            assignments.append(self.parse_assignment())
        return ast.DataAst(tuple(assignments), tuple(comments))

    def parse_assignment(self) -> ast.DataAssignment:
        name = self.match(T.NAME)
        self.match(T.ASSIGN)
        value = self.parse_literal(name.text)
        self.match(T.SEMI)
        return ast.DataAssignment(name.text, value, name.span)

    def parse_literal(self, owner: str) -> ast.DataLiteral:
        literal = self.parse_element(owner)
        if self.peek(T.PLUS, T.MINUS, T.STAR, T.SLASH):
            op = self.nt
            raise AmlSyntaxError(make_diagnostic("DAT-EXPRESSION", op.span.line, op.span.column,
                                                 SourceKind.DATA, name=owner, op=op.text))
        return literal

    def parse_element(self, owner: str) -> ast.DataLiteral:
        token = self.nt
        if token.kind == T.MINUS:
            self.advance()
            number = self.nt
            if number.kind not in (T.INT, T.FLOAT):
                self.error()
            self.advance()
            return ast.ScalarLit(-number.value, token.span)
        if token.kind == T.INT:
            self.advance()
            if self.accept(T.DOTDOT):
                high = self.match(T.INT)
                return ast.RangeLit(token.value, high.value, token.span)
            return ast.ScalarLit(token.value, token.span)
        if token.kind in (T.FLOAT, T.STRING, T.BOOL):
            self.advance()
            return ast.ScalarLit(token.value, token.span)
        if token.kind == T.LBRACKET:
            self.advance()
            return ast.ArrayLit(self.parse_elements(owner, T.RBRACKET), token.span)
        if token.kind == T.LBRACE:
            self.advance()
            return ast.SetLit(self.parse_elements(owner, T.RBRACE), token.span)
        if token.kind == T.LT:
            self.advance()
            items = self.parse_elements(owner, T.GT)
            return ast.TupleLit(items, token.span)
        self.error()

    def parse_elements(self, owner: str, closing: TokenKind) -> Tuple[ast.DataLiteral, ...]:
        items = []
        if not self.peek(closing):
            items.append(self.parse_literal(owner))
            while self.accept(T.COMMA):
                if self.peek(closing):
                    break
                items.append(self.parse_literal(owner))
        self.match(closing)
        return tuple(items)


def parse_model(tokens: Sequence[Token]) -> ast.ModelAst:
    """
    Parse a model token stream.

    Args:
        tokens: output of tokenize(source, "model")

    Returns:
        ModelAst: declarations, objectives, constraint items and comments

    Raises:
        AmlSyntaxError: on the first syntax error
    """
    comments = tokens.comments if isinstance(tokens, TokenList) else ()
    model = ModelParser(tokens).parse_model(comments)
    logger.debug(f"Parsed model with {len(model.declarations)} declarations "
                 f"and {len(model.constraints)} constraint items")
    return model


def parse_data(tokens: Sequence[Token]) -> ast.DataAst:
    """
    Parse a data token stream.

    Raises:
        AmlSyntaxError: with a message of the form
            "Syntax error in .dat file at or near token NAME, value 'demand'."
    """
    comments = tokens.comments if isinstance(tokens, TokenList) else ()
    return DataParser(tokens).parse_data(comments)
