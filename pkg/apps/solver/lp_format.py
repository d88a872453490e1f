"""
Exportação do modelo no formato de texto LP

Seções Minimize, Subject To, Bounds, Generals, Binaries e End. A saída é
determinística byte a byte para o mesmo modelo.
"""

import hashlib
import re
from decimal import Context, Decimal
from fractions import Fraction

from apps.scheduling.ilp import IlpModel, VarKind

NAME_LIMIT = 255
TERMS_PER_LINE = 8

_INVALID = re.compile(r"[^A-Za-z0-9_]")
_DECIMAL = Context(prec=12)


def sanitize(name: str) -> str:
    """Restringe o nome a [A-Za-z0-9_] e a no máximo 255 caracteres"""
    clean = _INVALID.sub("_", name)
    if len(clean) > NAME_LIMIT:
        digest = hashlib.sha1(clean.encode()).hexdigest()[:10]
        clean = f"{clean[: NAME_LIMIT - 11]}_{digest}"
    return clean


def format_decimal(value: Fraction) -> str:
    """Racional em decimal com 12 dígitos significativos"""
    number = _DECIMAL.divide(Decimal(value.numerator), Decimal(value.denominator))
    text = format(number.normalize(), "f")
    return "0" if text in ("-0", "0") else text


def format_terms(terms, formatter) -> list[str]:
    """Formata termos como 'x + 3 y - z', quebrando linhas longas"""
    chunks = []
    for position, (name, coef) in enumerate(terms):
        negative = coef < 0
        magnitude = -coef if negative else coef
        body = name if magnitude == 1 else f"{formatter(magnitude)} {name}"
        if position == 0:
            chunks.append(f"- {body}" if negative else body)
        else:
            chunks.append(f"{'-' if negative else '+'} {body}")
    lines = []
    for start in range(0, len(chunks), TERMS_PER_LINE):
        lines.append(" ".join(chunks[start : start + TERMS_PER_LINE]))
    return lines or ["0"]


def export_lp(model: IlpModel) -> str:
    lines = [f"\\ Problem: {sanitize(model.name)}", "Minimize"]

    objective = [
        (sanitize(name), coef) for name, coef in model.objective_terms.items()
    ]
    objective_lines = format_terms(objective, format_decimal) if objective else []
    if model.objective_constant:
        constant = model.objective_constant
        sign = "-" if constant < 0 else "+"
        constant_text = format_decimal(abs(constant))
        if objective_lines:
            objective_lines[-1] += f" {sign} {constant_text}"
        else:
            objective_lines = [f"{'-' if constant < 0 else ''}{constant_text}"]
    if not objective_lines:
        objective_lines = ["0"]
    lines.append(f" obj: {objective_lines[0]}")
    lines.extend(f"   {line}" for line in objective_lines[1:])

    lines.append("Subject To")
    for constraint in model.constraints:
        terms = [(sanitize(name), coef) for name, coef in constraint.terms]
        body = format_terms(terms, str)
        body[-1] += f" {constraint.sense.value} {constraint.rhs}"
        lines.append(f" c_{sanitize(constraint.tag)}: {body[0]}")
        lines.extend(f"   {line}" for line in body[1:])

    integers = [var for var in model.variables if var.kind == VarKind.INTEGER]
    binaries = [var for var in model.variables if var.kind == VarKind.BINARY]

    lines.append("Bounds")
    for var in integers:
        lines.append(f" {var.lower} <= {sanitize(var.name)} <= {var.upper}")

    if integers:
        lines.append("Generals")
        lines.extend(_wrap_names(integers))
    if binaries:
        lines.append("Binaries")
        lines.extend(_wrap_names(binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _wrap_names(variables) -> list[str]:
    names = [sanitize(var.name) for var in variables]
    return [
        " " + " ".join(names[start : start + TERMS_PER_LINE])
        for start in range(0, len(names), TERMS_PER_LINE)
    ]
