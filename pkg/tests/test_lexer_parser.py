"""
Tests for the lexer and the model/data parsers.
"""

import random

import pytest

from conftest import read_fixture
from src.aml import nodes as ast
from src.aml.errors import AmlSyntaxError
from src.aml.compiler import compile_model
from src.aml.lexer import strip_comments, tokenize
from src.aml.parser import parse_data, parse_model
from src.aml.tokens import TokenKind
from src.models.diagnostics import SourceKind


def kinds(source: str, kind: str = "model"):
    return [token.kind for token in tokenize(source, kind)]


def model(source: str) -> ast.ModelAst:
    return parse_model(tokenize(source, SourceKind.MODEL))


def data(source: str) -> ast.DataAst:
    return parse_data(tokenize(source, SourceKind.DATA))


def syntax_error(source: str, kind: str = "model"):
    with pytest.raises(AmlSyntaxError) as info:
        if kind == "model":
            model(source)
        else:
            data(source)
    return info.value.diagnostic


# Lexer

def test_range_literal_lexes_as_int_dotdot_int():
    assert kinds("1..N")[:3] == [TokenKind.INT, TokenKind.DOTDOT, TokenKind.IDENT]


def test_ellipsis_wins_over_dotdot():
    assert kinds("float a = ...;") == [
        TokenKind.KW_FLOAT, TokenKind.IDENT, TokenKind.ASSIGN, TokenKind.ELLIPSIS, TokenKind.SEMI, TokenKind.EOF,
    ]


def test_number_kinds_and_values():
    tokens = tokenize("3 2.5 1e3 4E-2", "model")
    assert [t.kind for t in tokens[:4]] == [TokenKind.INT, TokenKind.FLOAT, TokenKind.FLOAT, TokenKind.FLOAT]
    assert [t.value for t in tokens[:4]] == [3, 2.5, 1000.0, 0.04]


def test_two_character_operators():
    assert kinds("<= >= == != && || < > !")[:-1] == [
        TokenKind.LE, TokenKind.GE, TokenKind.EQ, TokenKind.NE, TokenKind.AND, TokenKind.OR,
        TokenKind.LT, TokenKind.GT, TokenKind.NOT,
    ]


def test_keywords_only_in_model_files():
    assert kinds("sum", "model")[0] == TokenKind.KW_SUM
    assert kinds("sum", "data")[0] == TokenKind.NAME


def test_string_escapes():
    token = tokenize('"a\\"b\\n"', "model")[0]
    assert token.kind == TokenKind.STRING
    assert token.value == 'a"b\n'


def test_comments_are_kept_out_of_band():
    tokens = tokenize("// head\nfloat a; /* block\n comment */ float b;", "model")
    assert [c.text for c in tokens.comments] == ["// head", "/* block\n comment */"]
    assert TokenKind.IDENT in [t.kind for t in tokens]


def test_line_and_column_tracking():
    tokens = tokenize("float a;\n  int b;", "model")
    b = [t for t in tokens if t.text == "b"][0]
    assert (b.span.line, b.span.column) == (2, 7)


def test_illegal_character():
    with pytest.raises(AmlSyntaxError) as info:
        tokenize("float a = 3 $ 4;", "model")
    diagnostic = info.value.diagnostic
    assert diagnostic.code == "LEX-ILLEGAL-CHAR"
    assert diagnostic.line == 1
    assert "'$'" in diagnostic.message


def test_unterminated_string_and_comment():
    with pytest.raises(AmlSyntaxError) as info:
        tokenize('x = "open\n";', "data")
    assert info.value.diagnostic.code == "LEX-UNTERMINATED-STRING"
    with pytest.raises(AmlSyntaxError) as info:
        tokenize("float a;\n/* never closed", "model")
    assert info.value.diagnostic.code == "LEX-UNTERMINATED-COMMENT"
    assert info.value.diagnostic.line == 2


# Model parser

def test_declaration_forms():
    parsed = model("""
        tuple Arc { string src; string dst; float cost; }
        {string} Nodes = ...;
        {Arc} Arcs = ...;
        int n = ...;
        range R = 1..n;
        float c[R][Nodes] = ...;
        float scale = 2.5;
        dvar float+ x[R];
        dvar int y in 0..10;
        dvar boolean z[Arcs];
    """)
    names = [d.name for d in parsed.declarations]
    assert names == ["Arc", "Nodes", "Arcs", "n", "R", "c", "scale", "x", "y", "z"]
    tuple_decl, _, _, _, range_decl, c_decl, scale, x, y, z = parsed.declarations
    assert [f.name for f in tuple_decl.fields] == ["src", "dst", "cost"]
    assert not range_decl.external
    assert len(c_decl.dims) == 2 and c_decl.external
    assert not scale.external and scale.init == ast.NumberLit(2.5)
    assert x.nonneg and x.type_name == "float"
    assert y.bounds is not None and not y.nonneg
    assert z.type_name == "boolean"


def test_sum_body_binds_at_term_level():
    parsed = model("""
        range R = 1..3;
        float a[R] = ...;
        float b = ...;
        dvar float x[R];
        minimize cost: sum (i in R) a[i] * x[i] + b;
    """)
    expr = parsed.objective.expr
    assert isinstance(expr, ast.BinOp) and expr.op == "+"
    assert isinstance(expr.left, ast.Aggregate)
    assert expr.right == ast.Name("b")


def test_precedence_multiplication_over_addition():
    parsed = model("float a = 1 + 2 * 3 - 4;")
    init = parsed.declarations[0].init
    assert init.op == "-"
    assert init.left.op == "+"
    assert init.left.right.op == "*"


def test_chained_comparison_is_kept_in_the_tree():
    parsed = model("""
        dvar float t;
        minimize obj: t;
        subject to { window: 1 <= t <= 5; }
    """)
    body = parsed.constraints[0].body
    assert isinstance(body, ast.Compare)
    assert body.ops == ("<=", "<=")
    assert body.is_chain


def test_forall_forms():
    parsed = model("""
        range R = 1..2;
        dvar float x[R];
        minimize obj: sum (i in R) x[i];
        subject to {
          forall (i in R) lower: x[i] >= 0;
          forall (i in R, j in R : i < j) {
            pair: x[i] + x[j] <= 4;
            gap: x[i] - x[j] <= 1;
          }
        }
    """)
    single, block = parsed.constraints
    assert isinstance(single, ast.ForallBlock) and not single.braced
    assert single.items[0].label == "lower"
    assert block.braced and [c.label for c in block.items] == ["pair", "gap"]
    assert [b.name for b in block.binders] == ["i", "j"]
    assert isinstance(block.condition, ast.Compare)


def test_field_access_in_filter():
    parsed = model("""
        tuple Arc { int i; int j; }
        {Arc} Arcs = ...;
        float w[Arcs] = ...;
        dvar float f[Arcs];
        minimize obj: sum (a in Arcs : a.i < a.j) w[a] * f[a];
    """)
    aggregate = parsed.objective.expr
    assert isinstance(aggregate.condition.operands[0], ast.FieldAccess)
    assert aggregate.condition.operands[0].field_name == "i"


def test_missing_semicolon_reports_unexpected_token():
    diagnostic = syntax_error("float a = 3\nfloat b = 4;")
    assert diagnostic.code == "SYN-UNEXPECTED-TOKEN"
    assert diagnostic.line == 2
    assert "token KW_FLOAT, value 'float'" in diagnostic.message
    assert "';'" in diagnostic.message


def test_unclosed_block_reports_end_of_file():
    diagnostic = syntax_error("dvar float x;\nminimize obj: x;\nsubject to {\n  c: x >= 1;\n")
    assert diagnostic.code == "SYN-UNEXPECTED-EOF"


def test_keyword_as_identifier_is_a_syntax_error():
    diagnostic = syntax_error("float sum = 3;")
    assert diagnostic.code == "SYN-UNEXPECTED-TOKEN"
    assert "KW_SUM" in diagnostic.message


# Data parser

def test_data_literals():
    parsed = data("""
        n = 3;
        names = {"a", "b"};
        costs = [[1, -2.5], [3, 4]];
        arcs = {<"a", "b", 1>, <"b", "a", 2>};
        flag = true;
    """)
    values = {a.name: a.value for a in parsed.assignments}
    assert values["n"] == ast.ScalarLit(3)
    assert values["names"] == ast.SetLit((ast.ScalarLit("a"), ast.ScalarLit("b")))
    assert values["costs"].items[0].items[1] == ast.ScalarLit(-2.5)
    assert isinstance(values["arcs"].items[0], ast.TupleLit)
    assert values["flag"] == ast.ScalarLit(True)


def test_data_trailing_comma_is_accepted():
    parsed = data("v = [1, 2, 3,];")
    assert len(parsed.assignments[0].value.items) == 3


def test_data_range_literal():
    parsed = data("R = 1..5;")
    assert parsed.assignments[0].value == ast.RangeLit(1, 5)


def test_data_syntax_error_cites_token():
    diagnostic = syntax_error("a = 1;\nb 2;", kind="data")
    assert diagnostic.code == "DAT-SYNTAX"
    assert diagnostic.source == SourceKind.DATA
    assert diagnostic.line == 2
    assert "token INT, value '2'" in diagnostic.message


def test_data_expression_is_rejected():
    diagnostic = syntax_error("total = 2 * 3;", kind="data")
    assert diagnostic.code == "DAT-EXPRESSION"
    assert "'total'" in diagnostic.message and "'*'" in diagnostic.message


# Error positions

@pytest.mark.parametrize("seed", range(30))
def test_illegal_character_is_reported_where_it_was_inserted(seed):
    rng = random.Random(seed)
    lines = read_fixture("alp.mod").split("\n")
    candidates = [n for n, text in enumerate(lines, start=1) if text.strip() and not text.lstrip().startswith("//")]
    line = rng.choice(candidates)
    text = lines[line - 1]
    code_end = text.find("//") if "//" in text else len(text)
    column = rng.randint(0, code_end)
    lines[line - 1] = text[:column] + "$" + text[column:]

    diagnostic = syntax_error("\n".join(lines))
    assert diagnostic.code == "LEX-ILLEGAL-CHAR"
    assert (diagnostic.line, diagnostic.column) == (line, column + 1)


@pytest.mark.parametrize("line", [3, 5, 6, 7, 8, 9, 10, 11, 13, 14, 15, 17, 20, 21, 22, 24])
def test_stray_token_is_reported_on_its_line(line):
    lines = read_fixture("alp.mod").split("\n")
    code = lines[line - 1].split("//")[0].rstrip()
    assert code.endswith(";")
    lines[line - 1] = code[:-1] + " );"

    result = compile_model("\n".join(lines), read_fixture("alp.dat"))
    assert not result.compiled
    assert [d.code for d in result.errors] == ["SYN-UNEXPECTED-TOKEN"]
    assert result.errors[0].line == line


@pytest.mark.parametrize("line", [1, 3, 4, 5, 6, 7, 8, 11])
def test_data_corruption_is_reported_on_its_line(line):
    lines = read_fixture("alp.dat").split("\n")
    lines[line - 1] = "$" + lines[line - 1]
    result = compile_model(read_fixture("alp.mod"), "\n".join(lines))
    assert [(d.code, d.source, d.line) for d in result.errors] == [("LEX-ILLEGAL-CHAR", SourceKind.DATA, line)]


# Comment stripping

def test_strip_comments_drops_comment_lines_and_tails():
    source = "// head\nfloat a; // note\n/* block\n comment */\nfloat b /* inline */ = 2;\n"
    assert strip_comments(source) == "float a;\nfloat b = 2;\n"


def test_strip_comments_keeps_code_tokens():
    stripped = strip_comments(read_fixture("alp.mod"))
    assert "//" not in stripped
    assert [t.text for t in tokenize(stripped)] == [t.text for t in tokenize(read_fixture("alp.mod"))]
    assert tokenize(stripped).comments == []


def test_strip_comments_leaves_unlexable_text_alone():
    assert strip_comments("float a; // x\n$") == "float a; // x\n$"
    assert strip_comments("n = 1;\n", SourceKind.DATA) == "n = 1;\n"
