"""
LP File Export

This module writes a flat programme in the CPLEX LP text format so it can be
handed to an external solver.
"""

import logging
import math
import re
from typing import Dict, Iterable, List

from ..models.flat import FlatModel, ObjectiveSense, Relation, VarDomain

# Setup logging
logger = logging.getLogger(__name__)

# Captures the objective constant; also used as the only term of empty rows
ONE_VAR_CONSTANT = "ONE_VAR_CONSTANT"
LINE_WIDTH = 255
RELATIONS = {Relation.LE: "<=", Relation.GE: ">=", Relation.EQ: "="}
_INVALID = re.compile(r"[^A-Za-z0-9_.()!\"#$%&{}/,;?@'`~|-]")


def _number(value: float) -> str:
    return "%.12g" % value


def _comment(text: str) -> str:
    # a "*\" inside the text would end the comment
    return text.replace("*\\", "* \\")


class _Names:
    """Maps source names onto unique LP identifiers."""

    def __init__(self):
        self.used: Dict[str, str] = {}

    def __call__(self, name: str, prefix: str) -> str:
        clean = _INVALID.sub("_", name.replace("[", "(").replace("]", ")"))
        if not clean or clean[0].isdigit() or clean[0] in ".eE":
            clean = prefix + clean
        candidate, n = clean, 1
        while candidate in self.used or candidate == ONE_VAR_CONSTANT:
            n += 1
            candidate = f"{clean}_{n}"
        self.used[candidate] = name
        return candidate


def _wrap(head: str, terms: Iterable[str], tail: str = "") -> List[str]:
    lines, current = [], head
    for term in terms:
        if len(current) + len(term) + 1 > LINE_WIDTH:
            lines.append(current)
            current = "  "
        current = current + " " + term if current else term
    if tail:
        if len(current) + len(tail) + 1 > LINE_WIDTH:
            lines.append(current)
            current = "  "
        current += " " + tail
    lines.append(current)
    return lines


def _linear_terms(coefficients: Dict[int, float], names: List[str]) -> List[str]:
    terms = []
    for j in sorted(coefficients):
        coef = coefficients[j]
        if coef == 0.0:
            continue
        sign = "-" if coef < 0 else "+"
        terms.append(f"{sign} {_number(abs(coef))} {names[j]}")
    if terms and terms[0].startswith("+ "):
        terms[0] = terms[0][2:]
    return terms


def export_lp_format(model: FlatModel) -> str:
    """
    Render a flat programme as LP text.

    Args:
        model (FlatModel): programme to export

    Returns:
        str: text with Minimize/Maximize, Subject To, Bounds, Generals,
        Binaries and End sections
    """
    unique = _Names()
    names = [unique(v.name, "x_") for v in model.variables]
    labels = [unique(c.name, "c_") for c in model.constraints]
    objective_name = unique(model.objective_label, "obj_")
    needs_constant = False

    lines = [f"\\* {_comment(model.name)} *\\", ""]

    # Step 1: objective
    lines.append("Maximize" if model.sense == ObjectiveSense.MAXIMIZE else "Minimize")
    terms = _linear_terms(model.objective, names)
    if model.objective_constant != 0.0 or not terms:
        needs_constant = True
        constant = model.objective_constant
        sign = "-" if constant < 0 else "+"
        terms.append(f"{sign} {_number(abs(constant))} {ONE_VAR_CONSTANT}")
        if terms[0].startswith("+ "):
            terms[0] = terms[0][2:]
    lines.extend(_wrap(f" {objective_name}:", terms))
    lines.append("")

    # Step 2: rows
    lines.append("Subject To")
    for label, row in zip(labels, model.constraints):
        if label != row.name:
            lines.append(f"\\* {_comment(row.name)} *\\")
        terms = _linear_terms(row.coefficients, names)
        if not terms:
            needs_constant = True
            terms = [f"0 {ONE_VAR_CONSTANT}"]
        tail = f"{RELATIONS[row.relation]} {_number(row.rhs)}"
        lines.extend(_wrap(f" {label}:", terms, tail))
    lines.append("")

    # Step 3: bounds for every variable
    lines.append("Bounds")
    for name, variable in zip(names, model.variables):
        low, high = variable.lower, variable.upper
        if math.isinf(low) and math.isinf(high):
            lines.append(f" {name} free")
        elif low == high:
            lines.append(f" {name} = {_number(low)}")
        else:
            low_text = "-inf" if math.isinf(low) else _number(low)
            high_text = "+inf" if math.isinf(high) else _number(high)
            lines.append(f" {low_text} <= {name} <= {high_text}")
    if needs_constant:
        lines.append(f" {ONE_VAR_CONSTANT} = 1")
    lines.append("")

    # Step 4: integrality
    generals = [n for n, v in zip(names, model.variables) if v.domain == VarDomain.INTEGER]
    binaries = [n for n, v in zip(names, model.variables) if v.domain == VarDomain.BINARY]
    if generals:
        lines.append("Generals")
        lines.extend(_wrap("", generals))
        lines.append("")
    if binaries:
        lines.append("Binaries")
        lines.extend(_wrap("", binaries))
        lines.append("")

    lines.append("End")
    logger.debug(f"Exported {len(names)} variables and {len(labels)} rows to LP text")
    return "\n".join(lines) + "\n"
