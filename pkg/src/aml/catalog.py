"""
Diagnostic Catalogue

Every diagnostic the toolkit emits is created here from a stable code, a
message template and a remedy template. Templates use str.format fields.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional

from ..models.diagnostics import Diagnostic, Severity, SourceKind


@dataclass(frozen=True)
class CatalogEntry:
    code: str
    category: str
    severity: Severity
    message: str
    remedy: str


E = Severity.ERROR
W = Severity.WARNING

_ENTRIES = [
    # Lexical
    CatalogEntry("LEX-ILLEGAL-CHAR", "lexical", E,
                 "Illegal character '{char}' in {file} file.",
                 "Remove the character; identifiers use letters, digits and underscores."),
    CatalogEntry("LEX-UNTERMINATED-STRING", "lexical", E,
                 "Unterminated string literal.",
                 "Close the string with a double quote on the same line."),
    CatalogEntry("LEX-UNTERMINATED-COMMENT", "lexical", E,
                 "Unterminated block comment.",
                 "Close the comment with '*/'."),

    # Syntax
    CatalogEntry("SYN-UNEXPECTED-TOKEN", "syntax", E,
                 "Syntax error in .mod file at or near {token}; expected {expected}.",
                 "Check the statement against the grammar reference; declarations and constraints end with ';'."),
    CatalogEntry("SYN-UNEXPECTED-EOF", "syntax", E,
                 "Unexpected end of .mod file; expected {expected}.",
                 "Complete the unfinished statement or close the open block."),
    CatalogEntry("DAT-SYNTAX", "syntax", E,
                 "Syntax error in .dat file at or near {token}.",
                 "Data assignments have the form 'name = literal;' with quoted strings and comma-separated elements."),
    CatalogEntry("DAT-EXPRESSION", "syntax", E,
                 "Expression in .dat file for '{name}': found operator '{op}'.",
                 "Data files accept literals only; write the computed value or move the expression into the model."),

    # Symbols
    CatalogEntry("SEM-UNDECLARED", "symbols", E,
                 "Undeclared symbol '{name}'.",
                 "Declare '{name}' in the model before using it, or correct the spelling."),
    CatalogEntry("SEM-DUPLICATE-DECL", "symbols", E,
                 "Symbol '{name}' is declared more than once (first declared on line {first}).",
                 "Rename one of the declarations or remove the duplicate."),
    CatalogEntry("SEM-SHADOWED-INDEX", "symbols", E,
                 "Index '{name}' shadows {what} of the same name.",
                 "Choose an index name that is not already in use."),
    CatalogEntry("SEM-DUPLICATE-INDEX", "symbols", E,
                 "Index '{name}' is bound twice in the same index list.",
                 "Use a distinct name for each index."),

    # Types and tuples
    CatalogEntry("SEM-STRING-ARITH", "types", E,
                 "String value '{expr}' cannot be used in arithmetic.",
                 "Use a numeric parameter, or index a numeric array by the string."),
    CatalogEntry("SEM-TYPE-MISMATCH-INIT", "types", E,
                 "Initializer of '{name}' has type {got}, expected {expected}.",
                 "Change the declared type or the initial value so that they agree."),
    CatalogEntry("SEM-DATA-TYPE-MISMATCH", "types", E,
                 "Data for '{name}' contains {value} of type {got}, expected {expected}.",
                 "Fix the value in the .dat file or change the declared type in the model."),
    CatalogEntry("SEM-VALUE-OUT-OF-RANGE", "types", E,
                 "Value {value} for '{name}' does not fit in type {expected}.",
                 "Use a value of smaller magnitude or rescale the data."),
    CatalogEntry("SEM-SET-ELEMENT-TYPE", "types", E,
                 "Set '{name}' of {expected} contains element {value} of type {got}.",
                 "Make every element match the declared element type."),
    CatalogEntry("SEM-TUPLE-ARITY", "types", E,
                 "Tuple {value} for '{name}' has {got} field(s), but tuple type '{tuple}' declares {expected}.",
                 "Supply exactly one value per tuple field, in declaration order."),
    CatalogEntry("SEM-TUPLE-FIELD-TYPE", "types", E,
                 "Field '{field}' of tuple {value} for '{name}' has type {got}, expected {expected}.",
                 "Fix the field value to match the tuple declaration."),
    CatalogEntry("SEM-UNKNOWN-FIELD", "types", E,
                 "Tuple type '{tuple}' has no field '{field}'.",
                 "Use one of the declared fields: {fields}."),
    CatalogEntry("SEM-FIELD-ON-NONTUPLE", "types", E,
                 "Field access '.{field}' applied to a value of type {got}.",
                 "Only tuple values have fields; check the index or the set being iterated."),
    CatalogEntry("SEM-UNKNOWN-TYPE", "types", E,
                 "Unknown type '{name}'.",
                 "Declare the tuple type before use, or use int, float, boolean or string."),
    CatalogEntry("SEM-DUPLICATE-FIELD", "types", E,
                 "Tuple type '{tuple}' declares field '{field}' more than once.",
                 "Give every tuple field a unique name."),
    CatalogEntry("SEM-SET-DUPLICATE-ELEMENT", "types", W,
                 "Set '{name}' lists element {value} more than once; duplicates are ignored.",
                 "Remove the repeated element."),

    # Indexing
    CatalogEntry("SEM-INDEX-ARITY", "indexing", E,
                 "'{name}' is declared with {expected} index dimension(s) but is used with {got}.",
                 "Supply one index per declared dimension."),
    CatalogEntry("SEM-INDEX-DOMAIN", "indexing", E,
                 "Index '{index}' ranges over '{domain}', which has elements outside '{expected}', the declared domain of '{name}'.",
                 "Iterate over '{expected}' or over a subset of it."),
    CatalogEntry("SEM-INDEX-TYPE", "indexing", E,
                 "Index {position} of '{name}' has type {got}, expected {expected}.",
                 "Index '{name}' with a value drawn from its declared domain '{domain}'."),
    CatalogEntry("SEM-LIST-TUPLE-INDEX", "indexing", E,
                 "List parameter '{name}' requires integer indices, got tuple: {value}.",
                 "Index the array by integer position, or declare it over the tuple set instead."),
    CatalogEntry("SEM-NOT-INDEXABLE", "indexing", E,
                 "'{name}' is a {kind} and cannot be indexed.",
                 "Remove the brackets or declare '{name}' as an array."),
    CatalogEntry("SEM-MISSING-INDEX", "indexing", E,
                 "Array '{name}' is used without indices.",
                 "Write '{name}[...]' with one index per dimension, or aggregate it with sum."),
    CatalogEntry("SEM-NOT-A-VALUE", "indexing", E,
                 "'{name}' is a {kind} and cannot be used as a value.",
                 "Use it as an index domain, e.g. 'i in {name}', or take its cardinality with card()."),
    CatalogEntry("SEM-INDEX-OUT-OF-RANGE", "indexing", E,
                 "Index {value} is outside the domain '{domain}' of '{name}'.",
                 "Use an element of '{domain}'."),
    CatalogEntry("SEM-BAD-DOMAIN", "indexing", E,
                 "'{name}' is a {kind} and cannot be used as an index domain.",
                 "Index over a range (e.g. 1..N) or a declared set."),

    # Data shape and presence
    CatalogEntry("SEM-SHAPE-MISMATCH", "data", E,
                 "Parameter '{name}' is declared with extents {expected} but the data provides {got}.",
                 "Provide exactly {expected} values, following the order of the index domains."),
    CatalogEntry("SEM-DATA-RAGGED", "data", E,
                 "Array data for '{name}' is ragged: {detail}.",
                 "Give every row the same number of entries."),
    CatalogEntry("SEM-DATA-DIMENSION", "data", E,
                 "Parameter '{name}' expects {expected} nesting level(s) of data, got {got}.",
                 "Match the bracket nesting to the number of declared dimensions."),
    CatalogEntry("SEM-MISSING-DATA", "data", E,
                 "No data supplied for '{name}', declared with '= ...'.",
                 "Add an assignment '{name} = ...;' to the .dat file or initialize it in the model."),
    CatalogEntry("SEM-EXTRA-DATA", "data", E,
                 "Data file assigns '{name}', which the model does not declare as external data.",
                 "Remove the assignment or declare '{name}' in the model with '= ...'."),
    CatalogEntry("SEM-DATA-DUPLICATE", "data", E,
                 "Data file assigns '{name}' more than once.",
                 "Keep a single assignment for '{name}'."),
    CatalogEntry("SEM-DATA-FOR-INITIALIZED", "data", E,
                 "'{name}' is initialized in the model and also assigned in the data file.",
                 "Keep the model initializer, or change it to '= ...' and keep the data."),
    CatalogEntry("SEM-DATA-FOR-DVAR", "data", E,
                 "Decision variable '{name}' cannot be assigned in the data file.",
                 "Remove the assignment; decision variable values are computed by the solver."),

    # Ranges
    CatalogEntry("SEM-RANGE-NONINT", "ranges", E,
                 "Range bounds must be integer-valued.",
                 "Use integer literals or integer-valued parameters for both bounds."),
    CatalogEntry("SEM-RANGE-IN-DAT", "ranges", E,
                 "Range '{name}' was supplied in the data file, but ranges used for indexing must be declared with explicit bounds in the model file.",
                 "Declare it in the model (e.g., 'range {name} = 1..N;') and remove it from the .dat."),
    CatalogEntry("SEM-RANGE-EMPTY", "ranges", W,
                 "Range '{name}' is empty ({low}..{high}).",
                 "Check the bounds; sums and constraints over an empty range vanish."),

    # Model structure
    CatalogEntry("SEM-CHAINED-CMP", "structure", E,
                 "Chained comparisons (e.g., a <= b <= c) are not supported.",
                 "Split into two constraints: a <= b; b <= c;"),
    CatalogEntry("SEM-OBJ-MISSING", "structure", E,
                 "The model has no objective.",
                 "Add 'minimize label: expr;' or 'maximize label: expr;'."),
    CatalogEntry("SEM-OBJ-MULTIPLE", "structure", E,
                 "The model declares {count} objectives; exactly one is allowed.",
                 "Keep a single objective and turn the others into constraints."),
    CatalogEntry("SEM-DUPLICATE-LABEL", "structure", E,
                 "Label '{label}' is used more than once (first on line {first}).",
                 "Give the objective and every constraint a unique label."),
    CatalogEntry("SEM-NOT-A-CONSTRAINT", "structure", E,
                 "Constraint body is not a relation using <=, >= or ==.",
                 "Write the constraint as 'lhs <= rhs', 'lhs >= rhs' or 'lhs == rhs'."),
    CatalogEntry("SEM-STRICT-INEQUALITY", "structure", E,
                 "Strict inequality '{op}' is not supported in constraints.",
                 "Use '<=' or '>=' instead."),

    # Linearity and arithmetic
    CatalogEntry("SEM-NONLINEAR", "linearity", E,
                 "Non-linear term: {detail}.",
                 "Linearize the expression, e.g. introduce an auxiliary variable with linking constraints."),
    CatalogEntry("SEM-DVAR-DIVISOR", "linearity", E,
                 "Division by an expression containing decision variables.",
                 "Multiply both sides by the divisor, or divide by a constant."),
    CatalogEntry("SEM-DIV-ZERO", "linearity", E,
                 "Division by zero in constant expression.",
                 "Fix the divisor so that it is non-zero."),
    CatalogEntry("SEM-CONSTANT-CONSTRAINT", "linearity", W,
                 "Constraint '{label}' contains no decision variables.",
                 "Remove the constraint or reference the intended decision variable."),
    CatalogEntry("SEM-DVAR-IN-CONSTANT", "linearity", E,
                 "Decision variable '{name}' appears in {context}, which must be constant.",
                 "Use parameters and indices only in {context}."),
    CatalogEntry("SEM-DVAR-BOUNDS", "linearity", E,
                 "Bounds of decision variable '{name}' are invalid: {detail}.",
                 "Give constant numeric bounds with lower <= upper; boolean variables take no bounds."),
    CatalogEntry("SEM-AGG-DVAR", "linearity", E,
                 "'{func}' over decision variables is not linear.",
                 "Model min/max with an auxiliary variable bounded by each term."),

    # Functions and filters
    CatalogEntry("SEM-UNKNOWN-FUNCTION", "functions", E,
                 "Unknown function '{name}'.",
                 "Supported functions are card, abs, floor, ceil, minl and maxl."),
    CatalogEntry("SEM-FUNCTION-ARITY", "functions", E,
                 "Function '{name}' expects {expected} argument(s), got {got}.",
                 "Call '{name}' with {expected} argument(s)."),
    CatalogEntry("SEM-FILTER-NOT-BOOLEAN", "functions", E,
                 "Filter condition has type {got}, expected boolean.",
                 "Write the filter as a comparison, e.g. 'i < j'."),

    # Style warnings
    CatalogEntry("SEM-UNLABELLED-CONSTRAINT", "style", W,
                 "Constraint has no label.",
                 "Add a label, e.g. 'capacity: ...;'."),
    CatalogEntry("SEM-UNLABELLED-OBJECTIVE", "style", W,
                 "Objective has no label.",
                 "Add a label, e.g. 'minimize totalCost: ...;'."),
    CatalogEntry("SEM-UNUSED-SYMBOL", "style", W,
                 "'{name}' is declared but never used.",
                 "Remove the declaration or reference it in the model."),

    # Expansion
    CatalogEntry("EXP-INDEX-OUT-OF-RANGE", "expansion", E,
                 "Index {value} is outside the domain of '{name}' while expanding '{context}'.",
                 "Restrict the iteration with a filter or adjust the index expression."),
    CatalogEntry("EXP-DIV-ZERO", "expansion", E,
                 "Division by zero while expanding '{context}'.",
                 "Guard the division with a filter or fix the data."),
    CatalogEntry("EXP-NONFINITE", "expansion", E,
                 "Non-finite coefficient ({value}) while expanding '{context}'.",
                 "Rescale the data so that all coefficients are finite."),

    # Generation loop
    CatalogEntry("GEN-INVALID-RESPONSE", "loop", E,
                 "The response did not contain a valid model/data object: {detail}.",
                 "Return ONLY a JSON object with string keys \"model\" and \"data\"."),
]

CATALOG: Dict[str, CatalogEntry] = {entry.code: entry for entry in _ENTRIES}


def diagnostic_catalog() -> List[CatalogEntry]:
    """
    List every catalogued diagnostic.

    Returns:
        list: entries in catalogue order (code, category, severity, templates)
    """
    return list(_ENTRIES)


def make_diagnostic(
    code: str,
    line: Optional[int] = None,
    column: Optional[int] = None,
    source: Optional[SourceKind] = None,
    **params,
) -> Diagnostic:
    """
    Instantiate a catalogued diagnostic.

    Args:
        code (str): catalogue code
        line (int, optional): 1-based line
        column (int, optional): 1-based column
        source (SourceKind, optional): file the line refers to
        **params: template fields

    Raises:
        KeyError: if the code is not catalogued
    """
    entry = CATALOG[code]
    return Diagnostic(
        code=code,
        severity=entry.severity,
        line=line,
        column=column,
        source=source,
        message=entry.message.format(**params),
        remedy=entry.remedy.format(**params),
    )
