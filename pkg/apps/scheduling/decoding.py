"""
Conversão entre a atribuição do solver e o Schedule

O arquivo de escalonamento é a fonte da verdade da verificação: a atribuição
é reconstruída a partir dos campos do Schedule e os seletores das disjunções
são derivados de novo.
"""

from dataclasses import replace
from fractions import Fraction
from typing import Mapping, Optional

from django.core.exceptions import ValidationError

from apps.network.types import (
    FlowSchedule,
    RadioInstance,
    Scenario,
    Schedule,
    TsnInstance,
)
from apps.network.utils import hyper_period, scheduled_e2e_delay

from .builder import (
    SchedulingModel,
    candidate_options,
    span_on,
    var_b,
    var_c,
    var_d,
    var_offset,
    var_x,
    var_y,
    var_z,
)


def decode_schedule(
    scenario: Scenario,
    model: SchedulingModel,
    assignment: Mapping[str, int],
    status: str = "optimal",
    objective=None,
    stats=None,
    gamma: Optional[Fraction] = None,
) -> Schedule:
    """
    Monta o Schedule a partir de uma atribuição inteira do modelo.

    Raises:
        ValidationError: atribuição sem alguma variável do modelo
    """
    missing = [name for name in model.variable_names() if name not in assignment]
    if missing:
        raise ValidationError(f"Atribuição incompleta: {', '.join(missing[:5])}")

    radio = scenario.radio
    entries = []
    for flow in scenario.flows:
        period = sum(
            p for _, p, selector in candidate_options(model, flow)
            if selector is None or assignment[selector] == 1
        )
        rb_set = tuple(
            k for k in range(1, radio.k_max + 1) if assignment[var_x(flow, k)] == 1
        )
        radio_instance = RadioInstance(
            flow_id=flow.id,
            start_tti=assignment[var_c(flow)],
            tti_count=assignment[var_d(flow)],
            rb_set=rb_set,
        )
        instances = tuple(
            TsnInstance(
                flow_id=flow.id,
                link=link,
                period_ns=period,
                offset_ns=assignment[var_offset(flow, link)],
                span_ns=span_on(flow, link),
            )
            for link in flow.scheduled_links
        )
        entries.append(
            FlowSchedule(
                flow_id=flow.id,
                radio=radio_instance,
                instances=instances,
                hold_period_ns=period if model.is_atsm else 0,
            )
        )

    draft = Schedule(
        model_kind=model.kind,
        scenario_digest=scenario.digest,
        tti_ns=radio.tti_ns,
        proc_delay_ns=radio.proc_delay_ns,
        k_max=radio.k_max,
        flows=tuple(entries),
        rbs_used=tuple(
            k for k in range(1, radio.k_max + 1)
            if model.has_variable(var_y(k)) and assignment[var_y(k)] == 1
        ),
        hyper_period_tsn_ns=hyper_period(
            entry.instances[0].period_ns for entry in entries if entry.instances
        ),
        hyper_period_5gs_ns=hyper_period(flow.period_ns for flow in scenario.flows),
        gamma=scenario.scheduler.gamma if gamma is None else Fraction(gamma),
        status=str(status),
        objective=objective,
        assignment=dict(assignment),
        stats=dict(stats or {}),
    )
    return with_scheduled_delays(scenario, draft)


def with_scheduled_delays(scenario: Scenario, schedule: Schedule) -> Schedule:
    """Preenche o atraso fim a fim planejado de cada fluxo"""
    flows = tuple(
        replace(
            entry,
            scheduled_e2e_delay_ns=scheduled_e2e_delay(schedule, scenario.flow(entry.flow_id)),
        )
        for entry in schedule.flows
    )
    return replace(schedule, flows=flows)


def encode_assignment(
    model: SchedulingModel, scenario: Scenario, schedule: Schedule
) -> dict[str, int]:
    """
    Reconstrói a atribuição do modelo a partir dos campos do Schedule.

    Períodos fora da lista de candidatos deixam todos os b do fluxo em 0;
    valores fora do domínio são mantidos para que a verificação os acuse.

    Raises:
        ValidationError: fluxo do cenário ausente no escalonamento
    """
    assignment: dict[str, int] = {}
    used = set(schedule.rbs_used)

    for flow in scenario.flows:
        entry = schedule.flow(flow.id)
        if entry is None or entry.radio is None:
            raise ValidationError(f"Fluxo sem escalonamento: {flow.id}")

        period = entry.instances[0].period_ns if entry.instances else flow.period_ns
        for j, candidate, selector in candidate_options(model, flow):
            if selector is not None:
                assignment[var_b(flow, j)] = int(candidate == period)

        d = entry.radio.tti_count
        assignment[var_c(flow)] = entry.radio.start_tti
        assignment[var_d(flow)] = d
        for k in range(1, scenario.radio.k_max + 1):
            x = int(k in entry.radio.rb_set)
            assignment[var_x(flow, k)] = x
            assignment[var_z(flow, k)] = x * d

        offsets = {instance.link: instance.offset_ns for instance in entry.instances}
        for link in flow.scheduled_links:
            if link not in offsets:
                raise ValidationError(f"Instância ausente: {flow.id} em {link}")
            assignment[var_offset(flow, link)] = offsets[link]

    for k in range(1, scenario.radio.k_max + 1):
        if model.has_variable(var_y(k)):
            assignment[var_y(k)] = int(k in used)

    derive_selectors(model, assignment)
    return assignment


def derive_selectors(model: SchedulingModel, assignment: dict[str, int]):
    """Escolhe para cada seletor o valor que satisfaz a sua disjunção (0 primeiro)"""
    pairs: dict[str, list] = {}
    for constraint in model.constraints:
        for name, _ in constraint.terms:
            if model.variable(name).role == "s":
                pairs.setdefault(name, []).append(constraint)
                break

    for var in model.variables_with_role("s"):
        constraints = pairs.get(var.name, [])
        chosen = 0
        for value in (0, 1):
            assignment[var.name] = value
            if all(constraint.residual(assignment) == 0 for constraint in constraints):
                chosen = value
                break
        assignment[var.name] = chosen
