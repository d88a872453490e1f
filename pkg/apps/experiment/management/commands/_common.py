"""
Utilidades compartilhadas pelos comandos de linha de comando
"""

from decimal import Decimal, InvalidOperation

from django.core.exceptions import ValidationError
from django.core.management.base import CommandError

from apps.network.loader import load_scenario, read_document
from apps.network.types import Scenario, Schedule
from apps.scheduling.serializers import schedule_from_document

EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_TIMEOUT = 3


def validation_error(exc: ValidationError, prefix: str = "") -> CommandError:
    messages = "; ".join(exc.messages)
    return CommandError(f"{prefix}{messages}", returncode=EXIT_VALIDATION)


def scenario_from_path(path: str) -> Scenario:
    try:
        return load_scenario(path)
    except ValidationError as exc:
        raise validation_error(exc, f"Cenário inválido ({path}): ")


def schedule_from_path(path: str, scenario: Scenario) -> Schedule:
    try:
        return schedule_from_document(read_document(path), scenario)
    except ValidationError as exc:
        raise validation_error(exc, f"Escalonamento inválido ({path}): ")


def parse_gamma(raw) -> Decimal:
    """--gamma deve estar em [0, 1]"""
    try:
        value = Decimal(str(raw))
    except InvalidOperation:
        value = None
    if value is None or not value.is_finite() or not 0 <= value <= 1:
        raise CommandError(f"--gamma deve estar em [0, 1]: {raw}", returncode=EXIT_VALIDATION)
    return value
