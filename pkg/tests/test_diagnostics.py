"""
Diagnostic catalogue coverage: one failing (or warning) model per code,
plus the exact wording of the messages the revision prompts depend on.
"""

import pytest

from src.aml.catalog import CATALOG, diagnostic_catalog, make_diagnostic
from src.aml.compiler import compile_model
from src.models.diagnostics import Diagnostic, Severity, SourceKind, sort_diagnostics

BASE_MODEL = """float a = ...;
dvar float+ x;
minimize obj: a * x;
subject to {
  c1: x >= 1;
}
"""
BASE_DATA = "a = 2;\n"


def base_with(objective: str) -> str:
    return BASE_MODEL.replace("a * x", objective)


RANGE_MODEL = """range R = 1..3;
dvar float+ x[R];
minimize obj: {objective};
subject to {{
  {constraint}
}}
"""


def with_range(objective: str = "sum (i in R) x[i]", constraint: str = "c1: sum (i in R) x[i] >= 1;") -> str:
    return RANGE_MODEL.format(objective=objective, constraint=constraint)


TUPLE_MODEL = """tuple P {{ int a; int b; }}
{{P}} S = ...;
dvar float+ x;
minimize obj: {objective};
subject to {{
  c1: x >= 1;
}}
"""

CASES = [
    # Lexical and syntax
    ("LEX-ILLEGAL-CHAR", "float a = 1 $;\n", ""),
    ("LEX-UNTERMINATED-STRING", BASE_MODEL, 'a = "open;\n'),
    ("LEX-UNTERMINATED-COMMENT", BASE_MODEL + "/* open", BASE_DATA),
    ("SYN-UNEXPECTED-TOKEN", "float a = 3\nfloat b;\n", ""),
    ("SYN-UNEXPECTED-EOF", "dvar float x;\nminimize obj: x", ""),
    ("DAT-SYNTAX", BASE_MODEL, "a 2;\n"),
    ("DAT-EXPRESSION", BASE_MODEL, "a = 1 + 1;\n"),
    # Symbols
    ("SEM-UNDECLARED", base_with("a * b * x"), BASE_DATA),
    ("SEM-DUPLICATE-DECL", "float a = ...;\n" + BASE_MODEL, BASE_DATA),
    ("SEM-SHADOWED-INDEX", "float a = ...;\n" + with_range("sum (a in R) x[a]", "c1: sum (i in R) x[i] >= a;"),
     BASE_DATA),
    ("SEM-DUPLICATE-INDEX", with_range("sum (i in R, i in R) x[i]"), ""),
    # Types and tuples
    ("SEM-STRING-ARITH", 'string s = "north";\n' + base_with("a * s * x"), BASE_DATA),
    ("SEM-TYPE-MISMATCH-INIT", "int k = 2.5;\n" + base_with("a * k * x"), BASE_DATA),
    ("SEM-DATA-TYPE-MISMATCH", "int k = ...;\n" + base_with("a * k * x"), BASE_DATA + 'k = "x";\n'),
    ("SEM-VALUE-OUT-OF-RANGE", "int k = ...;\n" + base_with("a * k * x"), BASE_DATA + "k = 99999999999999999999;\n"),
    ("SEM-SET-ELEMENT-TYPE", "{int} K = ...;\n" + base_with("a * x + sum (k in K) k * x"), BASE_DATA + 'K = {1, "b"};\n'),
    ("SEM-TUPLE-ARITY", TUPLE_MODEL.format(objective="sum (p in S) p.a * x"), "S = {<1, 2, 3>};\n"),
    ("SEM-TUPLE-FIELD-TYPE", TUPLE_MODEL.format(objective="sum (p in S) p.a * x"), 'S = {<1, "two">};\n'),
    ("SEM-UNKNOWN-FIELD", TUPLE_MODEL.format(objective="sum (p in S) p.c * x"), "S = {<1, 2>};\n"),
    ("SEM-FIELD-ON-NONTUPLE", with_range("sum (i in R) i.a * x[i]"), ""),
    ("SEM-UNKNOWN-TYPE", "Widget w = ...;\n" + base_with("a * x + w * x"), BASE_DATA),
    ("SEM-DUPLICATE-FIELD", "tuple Q { int a; int a; }\n" + BASE_MODEL, BASE_DATA),
    ("SEM-SET-DUPLICATE-ELEMENT", "{string} K = ...;\n" + base_with("a * x + sum (k in K) x"), BASE_DATA + 'K = {"a", "a"};\n'),
    # Indexing
    ("SEM-INDEX-ARITY", with_range("x[1][1]"), ""),
    ("SEM-INDEX-DOMAIN", "range S = 1..2;\ndvar float+ y[S];\n" + with_range("sum (i in R) y[i]"), ""),
    ("SEM-INDEX-TYPE", "{string} K = ...;\ndvar float+ y[K];\n" + with_range('y[1] + x[1]'), 'K = {"a"};\n'),
    ("SEM-LIST-TUPLE-INDEX",
     "tuple P { int a; int b; }\n{P} T = ...;\nfloat c[1..3] = ...;\n"
     + with_range("sum (p in T) c[p] * x[1]"), "T = {<1, 2>};\nc = [1, 2, 3];\n"),
    ("SEM-NOT-INDEXABLE", BASE_MODEL.replace("a * x", "a[1] * x"), BASE_DATA),
    ("SEM-MISSING-INDEX", with_range("x"), ""),
    ("SEM-NOT-A-VALUE", with_range("R * x[1]"), ""),
    ("SEM-INDEX-OUT-OF-RANGE", with_range("x[5]"), ""),
    ("SEM-BAD-DOMAIN", "float a = ...;\n" + with_range("sum (i in a) x[1]"), BASE_DATA),
    # Data shape and presence
    ("SEM-SHAPE-MISMATCH", "float d[1..3] = ...;\n" + base_with("a * x + d[1] * x"), BASE_DATA + "d = [1, 2];\n"),
    ("SEM-DATA-RAGGED", "float d[1..2][1..2] = ...;\n" + base_with("a * x + d[1][1] * x"), BASE_DATA + "d = [[1, 2], [3]];\n"),
    ("SEM-DATA-DIMENSION", "float d[1..2][1..2] = ...;\n" + base_with("a * x + d[1][1] * x"), BASE_DATA + "d = [1, 2];\n"),
    ("SEM-MISSING-DATA", BASE_MODEL, ""),
    ("SEM-EXTRA-DATA", BASE_MODEL, BASE_DATA + "zzz = 1;\n"),
    ("SEM-DATA-DUPLICATE", BASE_MODEL, BASE_DATA + "a = 3;\n"),
    ("SEM-DATA-FOR-INITIALIZED", BASE_MODEL.replace("float a = ...;", "float a = 3;"), BASE_DATA),
    ("SEM-DATA-FOR-DVAR", BASE_MODEL, BASE_DATA + "x = 1;\n"),
    # Ranges
    ("SEM-RANGE-NONINT", with_range().replace("1..3", "1..2.5"), ""),
    ("SEM-RANGE-IN-DAT", with_range().replace("range R = 1..3;", "range R = ...;"), "R = 1..3;\n"),
    ("SEM-RANGE-EMPTY", with_range().replace("1..3", "3..1"), ""),
    # Model structure
    ("SEM-CHAINED-CMP", BASE_MODEL.replace("c1: x >= 1;", "c1: 1 <= x <= 5;"), BASE_DATA),
    ("SEM-OBJ-MISSING", "float a = ...;\ndvar float+ x;\nsubject to {\n  c1: a * x >= 1;\n}\n", BASE_DATA),
    ("SEM-OBJ-MULTIPLE", BASE_MODEL + "maximize other: x;\n", BASE_DATA),
    ("SEM-DUPLICATE-LABEL", BASE_MODEL.replace("c1: x >= 1;", "c1: x >= 1;\n  c1: x <= 9;"), BASE_DATA),
    ("SEM-NOT-A-CONSTRAINT", BASE_MODEL.replace("c1: x >= 1;", "c1: x + 1;"), BASE_DATA),
    ("SEM-STRICT-INEQUALITY", BASE_MODEL.replace("c1: x >= 1;", "c1: x < 1;"), BASE_DATA),
    # Linearity and arithmetic
    ("SEM-NONLINEAR", base_with("a * x * x"), BASE_DATA),
    ("SEM-DVAR-DIVISOR", BASE_MODEL.replace("c1: x >= 1;", "c1: 1 / x >= 1;"), BASE_DATA),
    ("SEM-DIV-ZERO", BASE_MODEL.replace("c1: x >= 1;", "c1: x / 0 >= 1;"), BASE_DATA),
    ("SEM-CONSTANT-CONSTRAINT", BASE_MODEL.replace("c1: x >= 1;", "c1: x >= 1;\n  c2: 1 <= 2;"), BASE_DATA),
    ("SEM-DVAR-IN-CONSTANT", "dvar float+ y;\n" + with_range("sum (i in R : y >= 1) x[i]"), ""),
    ("SEM-DVAR-BOUNDS", "dvar boolean+ b;\n" + base_with("a * x + b"), BASE_DATA),
    ("SEM-AGG-DVAR", with_range("max (i in R) x[i]"), ""),
    # Functions and filters
    ("SEM-UNKNOWN-FUNCTION", base_with("a * sqrt(a) * x"), BASE_DATA),
    ("SEM-FUNCTION-ARITY", base_with("a * abs(a, a) * x"), BASE_DATA),
    ("SEM-FILTER-NOT-BOOLEAN", with_range("sum (i in R : i) x[i]"), ""),
    # Style warnings
    ("SEM-UNLABELLED-CONSTRAINT", BASE_MODEL.replace("c1: x >= 1;", "x >= 1;"), BASE_DATA),
    ("SEM-UNLABELLED-OBJECTIVE", BASE_MODEL.replace("minimize obj: a * x;", "minimize a * x;"), BASE_DATA),
    ("SEM-UNUSED-SYMBOL", "float unused = 1;\n" + BASE_MODEL, BASE_DATA),
    # Expansion
    ("EXP-INDEX-OUT-OF-RANGE", with_range(constraint="forall (i in R) c1: x[i+1] >= 0;"), ""),
    ("EXP-DIV-ZERO", "float d[1..3] = ...;\n"
     + with_range(constraint="forall (i in R) c1: x[i] / d[i] >= 0;"), "d = [1, 0, 2];\n"),
    ("EXP-NONFINITE", BASE_MODEL.replace("c1: x >= 1;", "c1: 1e308 * 10 * x >= 0;"), BASE_DATA),
]

WARNING_CODES = {
    "SEM-SET-DUPLICATE-ELEMENT", "SEM-RANGE-EMPTY", "SEM-CONSTANT-CONSTRAINT",
    "SEM-UNLABELLED-CONSTRAINT", "SEM-UNLABELLED-OBJECTIVE", "SEM-UNUSED-SYMBOL",
}


def codes_of(model: str, data: str):
    return [d.code for d in compile_model(model, data).diagnostics]


def test_base_model_compiles_cleanly():
    result = compile_model(BASE_MODEL, BASE_DATA)
    assert result.compiled
    assert result.diagnostics == []


def test_every_compiler_code_has_a_case():
    covered = {code for code, _, _ in CASES}
    compiler_codes = {entry.code for entry in diagnostic_catalog()} - {"GEN-INVALID-RESPONSE"}
    assert compiler_codes == covered
    assert len(covered) >= 40


@pytest.mark.parametrize("code,model,data", CASES, ids=[case[0] for case in CASES])
def test_case_reports_exactly_its_code(code, model, data):
    result = compile_model(model, data)
    assert {d.code for d in result.diagnostics} == {code}, result.render(include_warnings=True)
    if code in WARNING_CODES:
        assert result.compiled, result.render()
    else:
        assert not result.compiled
        assert any(d.code == code and d.is_error for d in result.errors)


@pytest.mark.parametrize("code,model,data", CASES, ids=[case[0] for case in CASES])
def test_every_diagnostic_renders_with_remedy(code, model, data):
    for diagnostic in compile_model(model, data).diagnostics:
        rendered = diagnostic.render()
        assert rendered.startswith("Semantic Error" if diagnostic.is_error else "Semantic Warning")
        assert diagnostic.remedy


# Each entry: code -> (fixed model, fixed data), the case with its remedy applied
GOLDEN_FIXES = {
    "SEM-UNDECLARED": ("float b = 1;\n" + base_with("a * b * x"), BASE_DATA),
    "SEM-DUPLICATE-DECL": (BASE_MODEL, BASE_DATA),
    "SEM-STRING-ARITH": ("float s = 2;\n" + base_with("a * s * x"), BASE_DATA),
    "SEM-TYPE-MISMATCH-INIT": ("float k = 2.5;\n" + base_with("a * k * x"), BASE_DATA),
    "SEM-DATA-TYPE-MISMATCH": ("int k = ...;\n" + base_with("a * k * x"), BASE_DATA + "k = 4;\n"),
    "SEM-VALUE-OUT-OF-RANGE": ("int k = ...;\n" + base_with("a * k * x"), BASE_DATA + "k = 9;\n"),
    "SEM-INDEX-OUT-OF-RANGE": (with_range("x[3]"), ""),
    "SEM-SHAPE-MISMATCH": ("float d[1..3] = ...;\n" + base_with("a * x + d[1] * x"), BASE_DATA + "d = [1, 2, 3];\n"),
    "SEM-MISSING-DATA": (BASE_MODEL, BASE_DATA),
    "SEM-EXTRA-DATA": (BASE_MODEL, BASE_DATA),
    "SEM-RANGE-NONINT": (with_range(), ""),
    "SEM-RANGE-IN-DAT": (with_range(), ""),
    "SEM-CHAINED-CMP": (BASE_MODEL.replace("c1: x >= 1;", "c1: 1 <= x;\n  c2: x <= 5;"), BASE_DATA),
    "SEM-OBJ-MISSING": (BASE_MODEL, BASE_DATA),
    "SEM-DUPLICATE-LABEL": (BASE_MODEL.replace("c1: x >= 1;", "c1: x >= 1;\n  c2: x <= 9;"), BASE_DATA),
    "SEM-STRICT-INEQUALITY": (BASE_MODEL.replace("c1: x >= 1;", "c1: x <= 1;"), BASE_DATA),
    "SEM-NONLINEAR": (BASE_MODEL, BASE_DATA),
    "SEM-DVAR-DIVISOR": (BASE_MODEL.replace("c1: x >= 1;", "c1: 1 >= x;"), BASE_DATA),
    "SEM-UNKNOWN-FUNCTION": (base_with("a * abs(a) * x"), BASE_DATA),
    "EXP-DIV-ZERO": ("float d[1..3] = ...;\n" + with_range(constraint="forall (i in R) c1: x[i] / d[i] >= 0;"),
                     "d = [1, 1, 2];\n"),
}
CASES_BY_CODE = {code: (model, data) for code, model, data in CASES}


@pytest.mark.parametrize("code", sorted(GOLDEN_FIXES))
def test_applying_the_remedy_compiles(code):
    broken = compile_model(*CASES_BY_CODE[code])
    assert not broken.compiled
    fixed = compile_model(*GOLDEN_FIXES[code])
    assert fixed.compiled, fixed.render()
    assert fixed.errors == []


def test_diagnostics_are_deterministic():
    for code, model, data in CASES:
        first = compile_model(model, data).diagnostics
        second = compile_model(model, data).diagnostics
        assert first == second, code
        assert [(d.code, d.line, d.column) for d in first] == [(d.code, d.line, d.column) for d in second]


def test_catalogue_severities():
    for entry in diagnostic_catalog():
        expected = Severity.WARNING if entry.code in WARNING_CODES else Severity.ERROR
        assert entry.severity == expected, entry.code
    assert len(CATALOG) == len(diagnostic_catalog())


def test_chained_comparison_message(alp_chained_model, alp_data):
    result = compile_model(alp_chained_model, alp_data)
    assert not result.compiled
    assert [d.code for d in result.diagnostics] == ["SEM-CHAINED-CMP"]
    assert result.render() == (
        "Semantic Error (Line 20): Chained comparisons (e.g., a <= b <= c) are not supported. "
        "Split into two constraints: a <= b; b <= c;"
    )


def test_range_bounds_message():
    result = compile_model(with_range().replace("1..3", "1..2.5"), "")
    diagnostic = [d for d in result.errors if d.code == "SEM-RANGE-NONINT"][0]
    assert diagnostic.message == "Range bounds must be integer-valued."
    assert diagnostic.line == 1


def test_undeclared_symbol_message():
    result = compile_model(BASE_MODEL.replace("a * x", "b * x"), BASE_DATA)
    diagnostic = [d for d in result.errors if d.code == "SEM-UNDECLARED"][0]
    assert diagnostic.message == "Undeclared symbol 'b'."
    assert diagnostic.line == 3


def test_list_tuple_index_message():
    model = ("tuple P { int a; int b; }\n{P} T = ...;\nfloat c[1..3] = ...;\n"
             + with_range("sum (p in T) c[p] * x[1]"))
    result = compile_model(model, "T = {<1, 2>};\nc = [1, 2, 3];\n")
    diagnostic = [d for d in result.errors if d.code == "SEM-LIST-TUPLE-INDEX"][0]
    assert "List parameter 'c' requires integer indices, got tuple: p." == diagnostic.message


def test_range_in_data_message():
    model = with_range().replace("range R = 1..3;", "range R = ...;")
    result = compile_model(model, "\n\nR = 1..3;\n")
    diagnostic = [d for d in result.errors if d.code == "SEM-RANGE-IN-DAT"][0]
    assert diagnostic.source == SourceKind.DATA
    assert diagnostic.line == 3
    assert "ranges used for indexing must be declared with explicit bounds in the model file" in diagnostic.message
    assert "'range R = 1..N;'" in diagnostic.remedy


def test_all_errors_are_reported_not_just_the_first():
    model = BASE_MODEL.replace("a * x", "b * x").replace("c1: x >= 1;", "c1: x < 1;\n  c2: y >= 0;")
    codes = codes_of(model, BASE_DATA)
    assert codes.count("SEM-UNDECLARED") == 2
    assert "SEM-STRICT-INEQUALITY" in codes


def test_diagnostics_are_ordered_model_first_then_by_line():
    result = compile_model(BASE_MODEL.replace("a * x", "b * x"), BASE_DATA + "zzz = 1;\n")
    sources = [d.source for d in result.diagnostics]
    assert sources.index(SourceKind.MODEL) < sources.index(SourceKind.DATA)
    assert result.diagnostics == sort_diagnostics(result.diagnostics)


def test_error_diagnostics_require_remedy():
    with pytest.raises(ValueError):
        Diagnostic(code="X", severity=Severity.ERROR, message="broken", remedy="")


def test_make_diagnostic_rejects_unknown_code():
    with pytest.raises(KeyError):
        make_diagnostic("NOT-A-CODE")


def test_generation_diagnostic_renders_without_line():
    diagnostic = make_diagnostic("GEN-INVALID-RESPONSE", detail="No JSON object found in response")
    assert diagnostic.render() == (
        "Semantic Error: The response did not contain a valid model/data object: "
        "No JSON object found in response. "
        'Return ONLY a JSON object with string keys "model" and "data".'
    )
