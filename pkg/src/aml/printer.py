"""
Pretty printer for model syntax trees.

The printed text re-parses to a structurally equal tree: parentheses are kept
as explicit Paren nodes, so no precedence-driven parenthesization is needed.
"""

from typing import List

from . import nodes as ast

INDENT = "    "


def expr_text(expr: ast.Expr) -> str:
    """Render an expression in source form."""
    if isinstance(expr, ast.NumberLit):
        return str(expr.value) if expr.is_int else repr(float(expr.value))
    if isinstance(expr, ast.StringLit):
        escaped = expr.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
        return f'"{escaped}"'
    if isinstance(expr, ast.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, ast.Name):
        return expr.ident
    if isinstance(expr, ast.Index):
        return expr.base.ident + "".join(f"[{expr_text(i)}]" for i in expr.indices)
    if isinstance(expr, ast.FieldAccess):
        return f"{expr_text(expr.base)}.{expr.field_name}"
    if isinstance(expr, (ast.BinOp, ast.Logical)):
        return f"{expr_text(expr.left)} {expr.op} {expr_text(expr.right)}"
    if isinstance(expr, ast.Neg):
        return f"-{expr_text(expr.operand)}"
    if isinstance(expr, ast.Not):
        return f"!{expr_text(expr.operand)}"
    if isinstance(expr, ast.Compare):
        parts = [expr_text(expr.operands[0])]
        for op, operand in zip(expr.ops, expr.operands[1:]):
            parts.append(f"{op} {expr_text(operand)}")
        return " ".join(parts)
    if isinstance(expr, ast.Paren):
        return f"({expr_text(expr.inner)})"
    if isinstance(expr, ast.RangeExpr):
        return f"{expr_text(expr.low)}..{expr_text(expr.high)}"
    if isinstance(expr, ast.Aggregate):
        return f"{expr.kind} ({binders_text(expr.binders, expr.condition)}) {expr_text(expr.body)}"
    if isinstance(expr, ast.Call):
        return f"{expr.func}({', '.join(expr_text(a) for a in expr.args)})"
    if isinstance(expr, ast.ArrayLiteral):
        return "[" + ", ".join(expr_text(i) for i in expr.items) + "]"
    if isinstance(expr, ast.SetLiteral):
        return "{" + ", ".join(expr_text(i) for i in expr.items) + "}"
    if isinstance(expr, ast.TupleLiteral):
        return "<" + ", ".join(expr_text(i) for i in expr.items) + ">"
    raise TypeError(f"cannot print {type(expr).__name__}")


def binders_text(binders, condition) -> str:
    text = ", ".join(f"{b.name} in {expr_text(b.domain)}" for b in binders)
    if condition is not None:
        text += f" : {expr_text(condition)}"
    return text


def _dims_text(dims) -> str:
    return "".join(f"[{expr_text(d)}]" for d in dims)


def _init_text(init, external: bool) -> str:
    if init is not None:
        return f" = {expr_text(init)}"
    return " = ..." if external else ""


def declaration_text(decl: ast.Declaration) -> str:
    if isinstance(decl, ast.ParamDecl):
        return f"{decl.type_name} {decl.name}{_dims_text(decl.dims)}{_init_text(decl.init, decl.external)};"
    if isinstance(decl, ast.RangeDecl):
        if decl.external:
            return f"range {decl.name} = ...;"
        return f"range {decl.name} = {expr_text(decl.low)}..{expr_text(decl.high)};"
    if isinstance(decl, ast.SetDecl):
        return f"{{{decl.elem_type}}} {decl.name}{_init_text(decl.init, decl.external)};"
    if isinstance(decl, ast.TupleDecl):
        fields = " ".join(f"{f.type_name} {f.name};" for f in decl.fields)
        return f"tuple {decl.name} {{ {fields} }}"
    if isinstance(decl, ast.DvarDecl):
        plus = "+" if decl.nonneg else ""
        bounds = f" in {expr_text(decl.bounds)}" if decl.bounds is not None else ""
        return f"dvar {decl.type_name}{plus} {decl.name}{_dims_text(decl.dims)}{bounds};"
    raise TypeError(f"cannot print {type(decl).__name__}")


class _Writer:
    """Line buffer that flushes pending comments before each item."""

    def __init__(self, comments):
        self.lines: List[str] = []
        self.pending = sorted(comments, key=lambda c: (c.span.line, c.span.column))

    def comments_before(self, line: int, depth: int):
        while self.pending and self.pending[0].span.line <= line:
            comment = self.pending.pop(0)
            self.lines.append(INDENT * depth + comment.text)

    def emit(self, text: str, line: int, depth: int = 0):
        self.comments_before(line, depth)
        self.lines.append(INDENT * depth + text)

    def finish(self) -> str:
        for comment in self.pending:
            self.lines.append(comment.text)
        self.pending = []
        return "\n".join(self.lines) + "\n"


def _constraint_item(writer: _Writer, item: ast.ConstraintItem, depth: int):
    if isinstance(item, ast.Constraint):
        label = f"{item.label}: " if item.label else ""
        writer.emit(f"{label}{expr_text(item.body)};", item.span.line, depth)
        return
    head = f"forall ({binders_text(item.binders, item.condition)})"
    if item.braced:
        writer.emit(head + " {", item.span.line, depth)
        for inner in item.items:
            _constraint_item(writer, inner, depth + 1)
        writer.emit("}", item.span.line, depth)
    else:
        writer.emit(head, item.span.line, depth)
        _constraint_item(writer, item.items[0], depth + 1)


def pretty_print(model: ast.ModelAst) -> str:
    """
    Render a model as source text, comments included.

    Declarations come first, then objectives, then one 'subject to' block.
    Each comment is emitted before the first item at or after its line.
    """
    writer = _Writer(model.comments)
    for decl in model.declarations:
        writer.emit(declaration_text(decl), decl.span.line)
    for objective in model.objectives:
        label = f"{objective.label}: " if objective.label else ""
        writer.emit(f"{objective.sense} {label}{expr_text(objective.expr)};", objective.span.line)
    if model.constraints:
        first_line = model.constraints[0].span.line
        writer.emit("subject to {", first_line)
        for item in model.constraints:
            _constraint_item(writer, item, 1)
        writer.emit("}", first_line)
    return writer.finish()


def structurally_equal(left: ast.ModelAst, right: ast.ModelAst) -> bool:
    """Equality ignoring spans and comments."""
    return left == right
