"""
Montagem dos modelos ATSM e STSM como programas lineares inteiros

Cada família de restrições tem a sua própria função. As variáveis são
declaradas por fluxo na ordem de entrada (b, c, d, x, z, offsets), depois os
RBs em ordem crescente (y) e por fim os seletores das disjunções.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from django.core.exceptions import ValidationError

from apps.network.types import DataflowLink, FlowSpec, ModelKind, Scenario
from apps.network.utils import hyper_period, wire_span

from .exceptions import InfeasibleScenarioError
from .ilp import IlpModel, LinExpr, Sense

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeriodCandidates:
    flow_id: str
    periods: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.periods)


class SchedulingModel(IlpModel):
    """IlpModel com o contexto do cenário usado pelas funções de família"""

    def __init__(self, scenario: Scenario, kind: ModelKind):
        super().__init__(name=f"{kind}:{scenario.name}")
        self.scenario = scenario
        self.kind = kind
        self.candidates: dict[str, PeriodCandidates] = {}

    @property
    def is_atsm(self) -> bool:
        return self.kind == ModelKind.ATSM


# Nomes de variáveis


def var_b(flow: FlowSpec, j: int) -> str:
    return f"b_{flow.id}_{j}"


def var_c(flow: FlowSpec) -> str:
    return f"c_{flow.id}"


def var_d(flow: FlowSpec) -> str:
    return f"d_{flow.id}"


def var_x(flow: FlowSpec, k: int) -> str:
    return f"x_{flow.id}_{k}"


def var_z(flow: FlowSpec, k: int) -> str:
    return f"z_{flow.id}_{k}"


def var_y(k: int) -> str:
    return f"y_{k}"


def var_offset(flow: FlowSpec, link: DataflowLink) -> str:
    return f"o_{flow.id}_{link.src}_{link.dst}"


def span_on(flow: FlowSpec, link: DataflowLink) -> int:
    return wire_span(flow.length_bytes, link.rate_bps)


def tti_slots(model: SchedulingModel, flow: FlowSpec) -> int:
    return flow.period_ns // model.scenario.radio.tti_ns


def period_expr(model: SchedulingModel, flow: FlowSpec) -> LinExpr:
    """T_i como expressão linear: Σ list[j]·b_j (ATSM) ou a constante period (STSM)"""
    if not model.is_atsm:
        return LinExpr(constant=flow.period_ns)
    candidates = model.candidates[flow.id]
    expr = LinExpr()
    for j, period in enumerate(candidates.periods):
        expr = expr + LinExpr.of(var_b(flow, j), period)
    return expr


def candidate_options(model: SchedulingModel, flow: FlowSpec) -> list[tuple[int, int, Optional[str]]]:
    """Lista (índice, período, binário de seleção) dos períodos possíveis"""
    if not model.is_atsm:
        return [(0, flow.period_ns, None)]
    return [
        (j, period, var_b(flow, j))
        for j, period in enumerate(model.candidates[flow.id].periods)
    ]


def add_disjunction(
    model: IlpModel,
    tag: str,
    branch_a: LinExpr,
    branch_b: LinExpr,
    guard: Optional[LinExpr] = None,
) -> bool:
    """
    Adiciona (branch_a ≥ 0) ∨ (branch_b ≥ 0) com um seletor novo.

    O big-M de cada ramo é o maior déficit possível do ramo dentro dos limites
    das variáveis. O guarda, quando presente, vale ≥ 1 sempre que a disjunção
    deve ser desativada. Disjunções com um ramo sempre verdadeiro não são
    emitidas.

    O seletor em 1 impõe o segundo ramo; as famílias de ordem passam nele o
    caso em que o fluxo i vem antes do fluxo j.

    Returns:
        True se as duas restrições foram adicionadas
    """
    low_a, _ = branch_a.bounds(model)
    low_b, _ = branch_b.bounds(model)
    if low_a >= 0 or low_b >= 0:
        return False

    big_m_a, big_m_b = -low_a, -low_b
    selector = model.new_selector()
    slack_a = LinExpr() if guard is None else guard * big_m_a
    slack_b = LinExpr() if guard is None else guard * big_m_b
    model.add_constraint(f"{tag}:a", branch_a + slack_a + selector * big_m_a, Sense.GE, 0)
    model.add_constraint(
        f"{tag}:b", branch_b + slack_b + (1 - selector) * big_m_b, Sense.GE, 0
    )
    return True


def build_period_candidates(flow: FlowSpec, min_p: int) -> PeriodCandidates:
    """
    Constrói a lista [minP, 2·minP, 4·minP, ..., T_max] com T_max ≤ period.

    Raises:
        InfeasibleScenarioError: minP maior que o período do fluxo
    """
    if min_p > flow.period_ns:
        raise InfeasibleScenarioError(
            flow.id, "window", f"minP {min_p} ns excede o período {flow.period_ns} ns"
        )
    periods = []
    period = min_p
    while period <= flow.period_ns:
        periods.append(period)
        period *= 2
    return PeriodCandidates(flow.id, tuple(periods))


def add_period_selection(model: SchedulingModel, flow: FlowSpec):
    """Declara os binários b_{i,j} e a restrição de seleção única"""
    if not model.is_atsm:
        return
    candidates = build_period_candidates(flow, model.scenario.scheduler.min_p_ns)
    model.candidates[flow.id] = candidates

    total = LinExpr()
    for j in range(candidates.size):
        total = total + model.add_binary(var_b(flow, j), role="b")
    model.add_constraint(f"window:{flow.id}:select", total, Sense.EQ, 1)


def add_transmission_opportunity_constraints(model: SchedulingModel, flow: FlowSpec):
    """Início e duração da transmissão 5GS em múltiplos inteiros de TTI"""
    tti = model.scenario.radio.tti_ns
    slots = tti_slots(model, flow)
    if slots < 1:
        raise InfeasibleScenarioError(
            flow.id, "to", f"período {flow.period_ns} ns menor que o TTI {tti} ns"
        )
    c = model.add_integer(var_c(flow), 0, slots - 1, role="c")
    d = model.add_integer(var_d(flow), 1, slots, role="d")
    model.add_constraint(
        f"to:{flow.id}:{flow.uplink}", c * tti + d * tti, Sense.LE, flow.period_ns
    )


def add_resource_constraints(model: SchedulingModel, flow: FlowSpec):
    """
    Capacidade suficiente e mínima dos RBs alocados.

    O produto x·d é substituído por z com a linearização padrão de big-M.
    """
    radio = model.scenario.radio
    rates = radio.bytes_per_rb(flow.id)
    d_max = tti_slots(model, flow)
    if sum(rates) * d_max < flow.length_bytes:
        raise InfeasibleScenarioError(
            flow.id,
            "resource",
            f"{flow.length_bytes} B não cabem em {radio.k_max} RBs x {d_max} TTIs",
        )

    d = LinExpr.of(var_d(flow))
    xs = [model.add_binary(var_x(flow, k), role="x") for k in range(1, radio.k_max + 1)]
    zs = [
        model.add_integer(var_z(flow, k), 0, d_max, role="z")
        for k in range(1, radio.k_max + 1)
    ]

    prefix = f"resource:{flow.id}:{flow.uplink}"
    covered = LinExpr()
    covered_minus_one = LinExpr()
    for k, (x, z, rate) in enumerate(zip(xs, zs, rates), start=1):
        model.add_constraint(f"{prefix}:{k}:zd", z - d, Sense.LE, 0)
        model.add_constraint(f"{prefix}:{k}:zx", z - x * d_max, Sense.LE, 0)
        model.add_constraint(f"{prefix}:{k}:zl", z - d - x * d_max, Sense.GE, -d_max)
        covered = covered + z * rate
        covered_minus_one = covered_minus_one + (z - x) * rate

    model.add_constraint(f"{prefix}:cover", covered, Sense.GE, flow.length_bytes)
    model.add_constraint(f"{prefix}:tight", covered_minus_one, Sense.LE, flow.length_bytes - 1)


def add_window_and_frame_constraints(model: SchedulingModel, flow: FlowSpec):
    """Offsets das instâncias cabeadas, com offset + span ≤ T_i"""
    t_max = max(model.candidates[flow.id].periods) if model.is_atsm else flow.period_ns
    period = period_expr(model, flow)
    for link in flow.scheduled_links:
        span = span_on(flow, link)
        if span > t_max:
            raise InfeasibleScenarioError(
                flow.id, "frame", f"span {span} ns no enlace {link} excede {t_max} ns"
            )
        offset = model.add_integer(var_offset(flow, link), 0, t_max - span, role="o")
        model.add_constraint(
            f"frame:{flow.id}:{link}", offset + span - period, Sense.LE, 0
        )


def add_transmission_order_constraints(model: SchedulingModel, flow: FlowSpec):
    """O próximo enlace só transmite depois da recepção completa no anterior"""
    links = flow.scheduled_links
    for previous, following in zip(links, links[1:]):
        gap = span_on(flow, previous) + previous.prop_delay_ns
        expr = LinExpr.of(var_offset(flow, following)) - LinExpr.of(var_offset(flow, previous))
        model.add_constraint(f"order:{flow.id}:{following}", expr, Sense.GE, gap)


def minimal_chain_delay(flow: FlowSpec) -> int:
    """Menor D_TSN(1) + D_TSN(2) compatível com as restrições de ordem"""
    return sum(span_on(flow, link) + link.prop_delay_ns for link in flow.wired_links)


def add_e2e_delay_constraints(model: SchedulingModel, flow: FlowSpec):
    radio = model.scenario.radio
    tti = radio.tti_ns
    first, last = flow.scheduled_links[0], flow.scheduled_links[-1]
    last_hop = flow.last_hop
    egress = span_on(flow, last) + last.prop_delay_ns
    tail = span_on(flow, last_hop) + last_hop.prop_delay_ns

    c = LinExpr.of(var_c(flow))
    d = LinExpr.of(var_d(flow))
    o_first = LinExpr.of(var_offset(flow, first))
    o_last = LinExpr.of(var_offset(flow, last))

    floor_delay = tti + radio.proc_delay_ns + minimal_chain_delay(flow)
    if model.is_atsm:
        floor_delay += min(model.candidates[flow.id].periods)
    else:
        floor_delay += model.scenario.scheduler.tam_budget_ns
    if floor_delay > flow.deadline_ns:
        raise InfeasibleScenarioError(
            flow.id,
            "e2e",
            f"atraso mínimo {floor_delay} ns excede o deadline {flow.deadline_ns} ns",
        )

    if model.is_atsm:
        total = d * tti + period_expr(model, flow) + o_last - o_first
        model.add_constraint(
            f"e2e:{flow.id}:{last_hop}",
            total,
            Sense.LE,
            flow.deadline_ns - radio.proc_delay_ns - egress - tail,
        )
        return

    budget = radio.proc_delay_ns + model.scenario.scheduler.tam_budget_ns
    model.add_constraint(
        f"e2e:{flow.id}:{first}:chain", o_first - c * tti - d * tti, Sense.GE, budget
    )
    model.add_constraint(
        f"e2e:{flow.id}:{last_hop}", o_last - c * tti, Sense.LE, flow.deadline_ns - egress - tail
    )


def add_rb_constraints(model: SchedulingModel):
    """Um RB só pode ser atribuído a fluxos se estiver marcado como usado"""
    scenario = model.scenario
    uplink = scenario.network.uplink
    flow_count = len(scenario.flows)
    ys = [model.add_binary(var_y(k), role="y") for k in range(1, scenario.radio.k_max + 1)]
    for k, y in enumerate(ys, start=1):
        used = LinExpr()
        for flow in scenario.flows:
            used = used + LinExpr.of(var_x(flow, k))
        model.add_constraint(f"rb:{uplink}:{k}", used - y * flow_count, Sense.LE, 0)


def add_utilization_constraints(model: SchedulingModel):
    """
    Limites redundantes de ocupação por enlace cabeado e por RB.

    Σ span_i/T_i ≤ 1 em cada enlace escalonado compartilhado, escrito com
    coeficientes inteiros sobre os binários de período. Na grade de RBs, a
    ocupação de cada RB no hiperperíodo cabe na sua capacidade e a soma das
    capacidades dos RBs usados cobre a demanda mínima de todos os fluxos.
    """
    scenario = model.scenario
    for link, flows in shared_scheduled_links(scenario).items():
        periods = [period for flow in flows for _, period, _ in candidate_options(model, flow)]
        horizon = hyper_period(periods)
        load = LinExpr()
        for flow in flows:
            span = span_on(flow, link)
            for _, period, selector in candidate_options(model, flow):
                weight = span * (horizon // period)
                load = load + (LinExpr.of(selector, weight) if selector else LinExpr(constant=weight))
        model.add_constraint(f"util:{link}", load, Sense.LE, horizon)

    radio = scenario.radio
    uplink = scenario.network.uplink
    horizon = hyper_period(flow.period_ns for flow in scenario.flows)
    capacity = rb_capacity(model, horizon)
    for k in range(1, radio.k_max + 1):
        load = LinExpr()
        for flow in scenario.flows:
            repeats = horizon // flow.period_ns
            load = load + LinExpr.of(var_z(flow, k), repeats * radio.tti_ns)
        model.add_constraint(f"util:{uplink}:{k}", load - LinExpr.of(var_y(k), capacity), Sense.LE, 0)

    demand = 0
    for flow in scenario.flows:
        units = -(-flow.length_bytes // max(radio.bytes_per_rb(flow.id)))
        demand += units * (horizon // flow.period_ns) * radio.tti_ns
    opened = LinExpr()
    for k in range(1, radio.k_max + 1):
        opened = opened + LinExpr.of(var_y(k), capacity)
    model.add_constraint(f"util:{uplink}:count", opened, Sense.GE, demand)


def rb_capacity(model: SchedulingModel, horizon: int) -> int:
    """
    Tempo de um RB utilizável no hiperperíodo.

    Com período único as transmissões cabem na janela [0, janela·TTI) de cada
    fluxo: o período inteiro no ATSM e, no STSM, o que sobra antes do primeiro
    offset depois do processamento e da folga.
    """
    scenario = model.scenario
    flows = scenario.flows
    if len({flow.period_ns for flow in flows}) > 1:
        return horizon
    tti = scenario.radio.tti_ns
    windows = []
    for flow in flows:
        if model.is_atsm:
            windows.append(flow.period_ns // tti)
            continue
        reserved = (
            scenario.radio.proc_delay_ns
            + scenario.scheduler.tam_budget_ns
            + span_on(flow, flow.scheduled_links[0])
        )
        windows.append(max(flow.period_ns - reserved, 0) // tti)
    return max(windows) * tti


def shared_scheduled_links(scenario: Scenario) -> dict[DataflowLink, list[FlowSpec]]:
    """Enlaces escalonados usados por pelo menos dois fluxos, em ordem de rota"""
    users: dict[DataflowLink, list[FlowSpec]] = {}
    for flow in scenario.flows:
        for link in flow.scheduled_links:
            users.setdefault(link, []).append(flow)
    return {link: flows for link, flows in users.items() if len(flows) > 1}


def add_ofdma_constraints(model: SchedulingModel):
    """Dois fluxos não podem ocupar o mesmo TTI no mesmo RB"""
    scenario = model.scenario
    tti = scenario.radio.tti_ns
    uplink = scenario.network.uplink
    flows = scenario.flows
    for a, flow_i in enumerate(flows):
        for flow_j in flows[a + 1 :]:
            horizon = math.lcm(flow_i.period_ns, flow_j.period_ns)
            start_i = LinExpr.of(var_c(flow_i), tti)
            start_j = LinExpr.of(var_c(flow_j), tti)
            end_i = start_i + LinExpr.of(var_d(flow_i), tti)
            end_j = start_j + LinExpr.of(var_d(flow_j), tti)
            for k in range(1, scenario.radio.k_max + 1):
                guard = 2 - LinExpr.of(var_x(flow_i, k)) - LinExpr.of(var_x(flow_j, k))
                for alpha in range(horizon // flow_i.period_ns):
                    for beta in range(horizon // flow_j.period_ns):
                        shift_i = alpha * flow_i.period_ns
                        shift_j = beta * flow_j.period_ns
                        add_disjunction(
                            model,
                            f"ofdma:{flow_i.id}:{flow_j.id}:{uplink}:{k}:{alpha}:{beta}",
                            (start_i + shift_i) - (end_j + shift_j),
                            (start_j + shift_j) - (end_i + shift_i),
                            guard,
                        )


def candidate_guard(selector_i: Optional[str], selector_j: Optional[str]) -> Optional[LinExpr]:
    if selector_i is None and selector_j is None:
        return None
    guard = LinExpr()
    for selector in (selector_i, selector_j):
        if selector is not None:
            guard = guard + (1 - LinExpr.of(selector))
    return guard


def add_tdma_constraints(model: SchedulingModel):
    """Janelas de flows distintos não se sobrepõem num enlace cabeado"""
    for link, flows in shared_scheduled_links(model.scenario).items():
        for a, flow_i in enumerate(flows):
            for flow_j in flows[a + 1 :]:
                o_i = LinExpr.of(var_offset(flow_i, link))
                o_j = LinExpr.of(var_offset(flow_j, link))
                span_i = span_on(flow_i, link)
                span_j = span_on(flow_j, link)
                for u, p_u, b_u in candidate_options(model, flow_i):
                    for w, p_w, b_w in candidate_options(model, flow_j):
                        guard = candidate_guard(b_u, b_w)
                        horizon = math.lcm(p_u, p_w)
                        for alpha in range(horizon // p_u):
                            for beta in range(horizon // p_w):
                                add_disjunction(
                                    model,
                                    f"tdma:{flow_i.id}:{flow_j.id}:{link}:{u}:{w}:{alpha}:{beta}",
                                    o_i + alpha * p_u - o_j - beta * p_w - span_j,
                                    o_j + beta * p_w - o_i - alpha * p_u - span_i,
                                    guard,
                                )


def previous_scheduled_link(flow: FlowSpec, link: DataflowLink) -> Optional[DataflowLink]:
    links = flow.scheduled_links
    position = links.index(link)
    return links[position - 1] if position > 0 else None


def add_frame_isolation_constraints(model: SchedulingModel):
    """Só quadros do mesmo fluxo podem ficar juntos na fila de saída"""
    for link, flows in shared_scheduled_links(model.scenario).items():
        for a, flow_i in enumerate(flows):
            for flow_j in flows[a + 1 :]:
                link_a = previous_scheduled_link(flow_i, link)
                link_b = previous_scheduled_link(flow_j, link)
                if link_a is None or link_b is None:
                    continue
                o_i_c = LinExpr.of(var_offset(flow_i, link))
                o_j_c = LinExpr.of(var_offset(flow_j, link))
                o_i_a = LinExpr.of(var_offset(flow_i, link_a))
                o_j_b = LinExpr.of(var_offset(flow_j, link_b))
                for u, p_u, b_u in candidate_options(model, flow_i):
                    for w, p_w, b_w in candidate_options(model, flow_j):
                        guard = candidate_guard(b_u, b_w)
                        horizon = math.lcm(p_u, p_w)
                        for alpha in range(horizon // p_u):
                            for beta in range(horizon // p_w):
                                add_disjunction(
                                    model,
                                    f"isolation:{flow_i.id}:{flow_j.id}:{link}:{u}:{w}:{alpha}:{beta}",
                                    (o_i_a + alpha * p_u + link_a.prop_delay_ns)
                                    - (o_j_c + beta * p_w),
                                    (o_j_b + beta * p_w + link_b.prop_delay_ns)
                                    - (o_i_c + alpha * p_u),
                                    guard,
                                )


def build_objective(model: SchedulingModel, gamma: Fraction):
    """
    min γ·Σ y_k/|ℱ| − (1−γ)·Σ T_i/(period_i·|F|), com T_i expandido sobre b.

    Raises:
        ValidationError: γ fora de [0, 1]
    """
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise ValidationError(f"gamma deve estar em [0, 1]: {gamma}")

    scenario = model.scenario
    flows = scenario.flows
    if not flows:
        model.set_objective({})
        return

    k_max = scenario.radio.k_max
    terms: dict[str, Fraction] = {
        var_y(k): gamma / k_max for k in range(1, k_max + 1)
    }
    constant = Fraction(0)
    for flow in flows:
        weight = (1 - gamma) / (flow.period_ns * len(flows))
        for _, period, selector in candidate_options(model, flow):
            if selector is None:
                constant -= weight * period
            else:
                terms[selector] = -weight * period
    model.set_objective(terms, constant)


def _build(scenario: Scenario, kind: ModelKind, gamma: Fraction) -> SchedulingModel:
    model = SchedulingModel(scenario, kind)
    if not scenario.flows:
        build_objective(model, gamma)
        return model

    for flow in scenario.flows:
        add_period_selection(model, flow)
        add_transmission_opportunity_constraints(model, flow)
        add_resource_constraints(model, flow)
        add_window_and_frame_constraints(model, flow)
        add_transmission_order_constraints(model, flow)
        add_e2e_delay_constraints(model, flow)

    add_rb_constraints(model)
    add_utilization_constraints(model)
    add_ofdma_constraints(model)
    add_tdma_constraints(model)
    add_frame_isolation_constraints(model)
    build_objective(model, gamma)

    logger.info(
        "Modelo %s montado: %d variáveis, %d restrições, famílias %s",
        model.name,
        len(model.variables),
        len(model.constraints),
        ",".join(sorted(model.families())),
    )
    return model


def build_atsm(scenario: Scenario, gamma: Optional[Fraction] = None) -> SchedulingModel:
    """Modelo assíncrono: períodos de oportunidade escolhidos entre minP·2^j"""
    return _build(scenario, ModelKind.ATSM, scenario.scheduler.gamma if gamma is None else gamma)


def build_stsm(scenario: Scenario, gamma: Optional[Fraction] = None) -> SchedulingModel:
    """Modelo síncrono: T_i fixo no período do fluxo, cadeia sem espera"""
    return _build(scenario, ModelKind.STSM, scenario.scheduler.gamma if gamma is None else gamma)


def build_model(scenario: Scenario, kind: ModelKind, gamma: Optional[Fraction] = None) -> SchedulingModel:
    if ModelKind(kind) == ModelKind.ATSM:
        return build_atsm(scenario, gamma)
    return build_stsm(scenario, gamma)
