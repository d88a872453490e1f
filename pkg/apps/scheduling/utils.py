"""
Pipeline de escalonamento: montagem, resolução, decodificação e cache
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from django.core.exceptions import ValidationError

from apps.network.types import ModelKind, Scenario, Schedule
from apps.solver.bnb import SolveLimits, SolveStatus, solve
from apps.solver.schedule_check import FAMILIES, check_schedule
from apps.solver.verification import verify
from utils.cache import cache_manager

from .builder import build_model
from .decoding import decode_schedule, encode_assignment
from .exceptions import InfeasibleScenarioError
from .serializers import schedule_from_document, schedule_to_document

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScheduleOutcome:
    status: SolveStatus
    schedule: Optional[Schedule] = None
    infeasible_family: Optional[str] = None
    message: str = ""
    stats: dict = field(default_factory=dict)
    cached: bool = False

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL

    def to_cache(self) -> dict:
        return {
            "status": str(self.status),
            "document": schedule_to_document(self.schedule) if self.schedule else None,
            "infeasible_family": self.infeasible_family,
            "message": self.message,
            "stats": self.stats,
        }

    @classmethod
    def from_cache(cls, data: dict, scenario: Scenario) -> "ScheduleOutcome":
        document = data.get("document")
        return cls(
            status=SolveStatus(data["status"]),
            schedule=schedule_from_document(document, scenario) if document else None,
            infeasible_family=data.get("infeasible_family"),
            message=data.get("message", ""),
            stats=data.get("stats", {}),
            cached=True,
        )


def solve_scenario(
    scenario: Scenario,
    kind: ModelKind,
    gamma: Optional[Fraction] = None,
    limits: Optional[SolveLimits] = None,
) -> ScheduleOutcome:
    """
    Monta o modelo, resolve e decodifica o escalonamento.

    Returns:
        ScheduleOutcome com o Schedule quando houver solução (ótima ou incumbente)
    """
    gamma = scenario.scheduler.gamma if gamma is None else Fraction(gamma)
    try:
        model = build_model(scenario, kind, gamma)
    except InfeasibleScenarioError as exc:
        logger.info("Cenário %s inviável antes da resolução: %s", scenario.name, exc)
        return ScheduleOutcome(
            status=SolveStatus.INFEASIBLE, infeasible_family=exc.family, message=str(exc)
        )

    solution = solve(model, limits)
    stats = {
        **solution.stats,
        "variables": len(model.variables),
        "constraints": len(model.constraints),
    }
    if not solution.assignment:
        message = (
            f"Modelo inviável (família {solution.infeasible_family})"
            if solution.status == SolveStatus.INFEASIBLE
            else "Tempo esgotado sem solução incumbente"
        )
        return ScheduleOutcome(
            status=solution.status,
            infeasible_family=solution.infeasible_family,
            message=message,
            stats=stats,
        )

    schedule = decode_schedule(
        scenario,
        model,
        solution.assignment,
        status=solution.status,
        objective=solution.objective,
        stats=stats,
        gamma=gamma,
    )
    return ScheduleOutcome(status=solution.status, schedule=schedule, stats=stats)


def schedule_scenario(
    scenario: Scenario,
    kind: ModelKind,
    gamma: Optional[Fraction] = None,
    limits: Optional[SolveLimits] = None,
    use_cache: bool = True,
) -> ScheduleOutcome:
    """
    Resolve o cenário reaproveitando resultados em cache.

    Apenas resultados definitivos (ótimo ou inviável) são armazenados; um
    tempo esgotado depende dos limites e é sempre recalculado.
    """
    kind = ModelKind(kind)
    gamma = scenario.scheduler.gamma if gamma is None else Fraction(gamma)
    if not use_cache or not scenario.digest:
        return solve_scenario(scenario, kind, gamma, limits)

    key = cache_manager.schedule_key(scenario.digest, kind, gamma)
    cached = cache_manager.cache.get(key)
    if cached is not None:
        logger.info("Escalonamento em cache para %s [%s, γ=%s]", scenario.name, kind, gamma)
        return ScheduleOutcome.from_cache(cached, scenario)

    outcome = solve_scenario(scenario, kind, gamma, limits)
    if outcome.status != SolveStatus.TIMED_OUT:
        cache_manager.cache.set(key, outcome.to_cache(), cache_manager.get_ttl("SCHEDULE"))
        cache_manager.register_key(scenario.digest, key)
    return outcome


@dataclass(frozen=True)
class ScheduleVerification:
    families: dict[str, bool]
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def verify_schedule(scenario: Scenario, schedule: Schedule) -> ScheduleVerification:
    """
    Verifica um escalonamento contra o modelo reconstruído e o verificador
    semântico independente, agrupando o resultado por família.

    Raises:
        ValidationError: escalonamento de outro cenário
    """
    if schedule.scenario_digest != scenario.digest:
        raise ValidationError("O escalonamento não corresponde ao cenário (digest diferente)")

    failed: dict[str, list[str]] = {}
    families = set(FAMILIES) | {"bounds"}

    try:
        model = build_model(scenario, schedule.model_kind, schedule.gamma)
    except InfeasibleScenarioError as exc:
        model = None
        failed.setdefault(exc.family, []).append(str(exc))

    if model is not None:
        families |= model.families()
        try:
            assignment = encode_assignment(model, scenario, schedule)
        except ValidationError as exc:
            failed.setdefault("coverage", []).extend(f"coverage: {message}" for message in exc.messages)
        else:
            for violation in verify(model, assignment).violations:
                failed.setdefault(violation.family, []).append(
                    f"{violation.tag} (resíduo {violation.residual})"
                )

    for violation in check_schedule(scenario, schedule):
        failed.setdefault(violation.family, []).append(str(violation))

    families |= set(failed)
    messages = tuple(
        message
        for family in sorted(failed)
        for message in failed[family]
    )
    return ScheduleVerification(
        families={family: family not in failed for family in sorted(families)},
        violations=messages,
    )
