from dataclasses import dataclass
from typing import Mapping

from django.core.exceptions import ValidationError

from apps.scheduling.ilp import IlpModel


@dataclass(frozen=True)
class Violation:
    tag: str
    family: str
    residual: int


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[Violation, ...]

    @property
    def is_feasible(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {violation.family for violation in self.violations}

    def by_family(self) -> dict[str, list[Violation]]:
        grouped: dict[str, list[Violation]] = {}
        for violation in self.violations:
            grouped.setdefault(violation.family, []).append(violation)
        return grouped

    def __len__(self):
        return len(self.violations)


def verify(model: IlpModel, assignment: Mapping[str, int]) -> VerificationReport:
    """
    Verifica uma atribuição contra limites e restrições com tolerância zero.

    Args:
        model: Modelo a verificar
        assignment: Valor inteiro de cada variável declarada

    Returns:
        Relatório com cada restrição violada, seu resíduo e sua família

    Raises:
        ValidationError: variável sem valor na atribuição
    """
    missing = [var.name for var in model.variables if var.name not in assignment]
    if missing:
        raise ValidationError(f"Variáveis sem valor: {', '.join(missing[:5])}")

    violations = []
    for var in model.variables:
        value = assignment[var.name]
        if isinstance(value, bool) or not isinstance(value, int):
            violations.append(Violation(f"bounds:{var.name}", "bounds", 1))
        elif value < var.lower or value > var.upper:
            gap = var.lower - value if value < var.lower else value - var.upper
            violations.append(Violation(f"bounds:{var.name}", "bounds", gap))

    for constraint in model.constraints:
        residual = constraint.residual(assignment)
        if residual:
            violations.append(Violation(constraint.tag, constraint.family, residual))
    return VerificationReport(tuple(violations))
