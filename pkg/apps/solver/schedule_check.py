"""
Verificador semântico independente do modelo ILP

Relê o Schedule diretamente contra o cenário: cobertura das rotas, períodos
candidatos, janelas, oportunidades de TTI, capacidade dos RBs, sobreposições
na grade 5G e nos enlaces cabeados (enumeradas sobre o hiper-período de cada
par), ordem de transmissão, isolamento de quadros e deadline.
"""

import math
from dataclasses import dataclass

from apps.network.types import FlowSchedule, FlowSpec, ModelKind, Scenario, Schedule
from apps.network.utils import scheduled_e2e_delay, wire_span

FAMILIES = (
    "coverage",
    "window",
    "frame",
    "to",
    "resource",
    "rb",
    "ofdma",
    "order",
    "tdma",
    "isolation",
    "e2e",
)


@dataclass(frozen=True)
class ScheduleViolation:
    family: str
    flow_id: str
    message: str

    def __str__(self):
        return f"{self.family}: {self.flow_id}: {self.message}"


class ScheduleChecker:
    def __init__(self, scenario: Scenario, schedule: Schedule):
        self.scenario = scenario
        self.schedule = schedule
        self.violations: list[ScheduleViolation] = []
        self.entries: dict[str, FlowSchedule] = {}

    def flag(self, family: str, flow_id: str, message: str):
        self.violations.append(ScheduleViolation(family, flow_id, message))

    def run(self) -> list[ScheduleViolation]:
        self.check_coverage()
        for flow in self.scenario.flows:
            entry = self.entries.get(flow.id)
            if entry is None:
                continue
            self.check_window(flow, entry)
            self.check_frame(flow, entry)
            self.check_transmission_opportunity(flow, entry)
            self.check_resource(flow, entry)
            self.check_order(flow, entry)
            self.check_e2e(flow, entry)
        self.check_rb()
        self.check_ofdma()
        self.check_tdma()
        self.check_isolation()
        return self.violations

    def check_coverage(self):
        known = {flow.id for flow in self.scenario.flows}
        for entry in self.schedule.flows:
            if entry.flow_id not in known:
                self.flag("coverage", entry.flow_id, "fluxo inexistente no cenário")
        for flow in self.scenario.flows:
            entry = self.schedule.flow(flow.id)
            if entry is None or entry.radio is None:
                self.flag("coverage", flow.id, "fluxo sem escalonamento")
                continue
            links = tuple(instance.link for instance in entry.instances)
            if links != flow.scheduled_links:
                self.flag("coverage", flow.id, "instâncias não cobrem a rota escalonada")
                continue
            self.entries[flow.id] = entry

    def check_window(self, flow: FlowSpec, entry: FlowSchedule):
        periods = {instance.period_ns for instance in entry.instances}
        if len(periods) != 1:
            self.flag("window", flow.id, f"períodos distintos ao longo da rota: {sorted(periods)}")
            return
        period = periods.pop()
        if self.schedule.model_kind == ModelKind.STSM:
            if period != flow.period_ns:
                self.flag("window", flow.id, f"T = {period} ns difere do período do fluxo")
            return
        min_p = self.scenario.scheduler.min_p_ns
        ratio, remainder = divmod(period, min_p)
        if remainder or ratio < 1 or ratio & (ratio - 1) or period > flow.period_ns:
            self.flag("window", flow.id, f"T = {period} ns não é um período candidato")
        if entry.hold_period_ns != period:
            self.flag("window", flow.id, "período de retenção difere de T")

    def check_frame(self, flow: FlowSpec, entry: FlowSchedule):
        for instance in entry.instances:
            span = wire_span(flow.length_bytes, instance.link.rate_bps)
            if instance.span_ns != span:
                self.flag("frame", flow.id, f"span incorreto em {instance.link}")
            if instance.offset_ns < 0 or instance.offset_ns + span > instance.period_ns:
                self.flag("frame", flow.id, f"janela fora do período em {instance.link}")

    def check_transmission_opportunity(self, flow: FlowSpec, entry: FlowSchedule):
        radio = entry.radio
        tti = self.scenario.radio.tti_ns
        if radio.start_tti < 0 or radio.tti_count < 1:
            self.flag("to", flow.id, "oportunidade 5GS inválida")
        elif (radio.start_tti + radio.tti_count) * tti > flow.period_ns:
            self.flag("to", flow.id, "transmissão 5GS ultrapassa o período")

    def check_resource(self, flow: FlowSpec, entry: FlowSchedule):
        rates = self.scenario.radio.bytes_per_rb(flow.id)
        k_max = self.scenario.radio.k_max
        if any(k < 1 or k > k_max for k in entry.radio.rb_set):
            self.flag("resource", flow.id, "RB fora da grade")
            return
        per_tti = sum(rates[k - 1] for k in entry.radio.rb_set)
        d = entry.radio.tti_count
        if per_tti * d < flow.length_bytes:
            self.flag("resource", flow.id, "capacidade insuficiente")
        elif per_tti * (d - 1) >= flow.length_bytes:
            self.flag("resource", flow.id, "alocação maior que o necessário")

    def check_order(self, flow: FlowSpec, entry: FlowSchedule):
        for previous, following in zip(entry.instances, entry.instances[1:]):
            ready = previous.offset_ns + previous.span_ns + previous.link.prop_delay_ns
            if following.offset_ns < ready:
                self.flag("order", flow.id, f"{following.link} abre antes da recepção completa")

    def check_e2e(self, flow: FlowSpec, entry: FlowSchedule):
        delay = scheduled_e2e_delay(self.schedule, flow)
        if delay > flow.deadline_ns:
            self.flag("e2e", flow.id, f"atraso {delay} ns excede o deadline {flow.deadline_ns} ns")
        if entry.scheduled_e2e_delay_ns is not None and entry.scheduled_e2e_delay_ns != delay:
            self.flag("e2e", flow.id, "atraso planejado registrado não confere")
        if self.schedule.model_kind == ModelKind.STSM:
            tti = self.scenario.radio.tti_ns
            ready = (
                (entry.radio.start_tti + entry.radio.tti_count) * tti
                + self.scenario.radio.proc_delay_ns
                + self.scenario.scheduler.tam_budget_ns
            )
            if entry.instances[0].offset_ns < ready:
                self.flag("e2e", flow.id, "primeira janela abre antes da entrega 5GS")

    def check_rb(self):
        used = set(self.schedule.rbs_used)
        for flow_id, entry in self.entries.items():
            missing = set(entry.radio.rb_set) - used
            if missing:
                self.flag("rb", flow_id, f"RBs não marcados como usados: {sorted(missing)}")

    def pairs(self):
        flows = [flow for flow in self.scenario.flows if flow.id in self.entries]
        for a, flow_i in enumerate(flows):
            for flow_j in flows[a + 1 :]:
                yield flow_i, flow_j

    def check_ofdma(self):
        tti = self.scenario.radio.tti_ns
        for flow_i, flow_j in self.pairs():
            radio_i = self.entries[flow_i.id].radio
            radio_j = self.entries[flow_j.id].radio
            if not set(radio_i.rb_set) & set(radio_j.rb_set):
                continue
            windows_i = repeated_windows(
                radio_i.start_tti * tti, radio_i.tti_count * tti, flow_i.period_ns, flow_j.period_ns
            )
            windows_j = repeated_windows(
                radio_j.start_tti * tti, radio_j.tti_count * tti, flow_j.period_ns, flow_i.period_ns
            )
            if overlapping(windows_i, windows_j):
                self.flag("ofdma", flow_i.id, f"TTIs sobrepostos com {flow_j.id} no mesmo RB")

    def check_tdma(self):
        for flow_i, flow_j in self.pairs():
            instances_j = {instance.link: instance for instance in self.entries[flow_j.id].instances}
            for instance_i in self.entries[flow_i.id].instances:
                instance_j = instances_j.get(instance_i.link)
                if instance_j is None:
                    continue
                windows_i = repeated_windows(
                    instance_i.offset_ns, instance_i.span_ns, instance_i.period_ns, instance_j.period_ns
                )
                windows_j = repeated_windows(
                    instance_j.offset_ns, instance_j.span_ns, instance_j.period_ns, instance_i.period_ns
                )
                if overlapping(windows_i, windows_j):
                    self.flag(
                        "tdma", flow_i.id, f"janelas sobrepostas com {flow_j.id} em {instance_i.link}"
                    )

    def check_isolation(self):
        for flow_i, flow_j in self.pairs():
            list_i = self.entries[flow_i.id].instances
            list_j = self.entries[flow_j.id].instances
            positions_j = {instance.link: position for position, instance in enumerate(list_j)}
            for position_i, shared_i in enumerate(list_i):
                position_j = positions_j.get(shared_i.link)
                if position_j is None or position_i == 0 or position_j == 0:
                    continue
                shared_j = list_j[position_j]
                before_i, before_j = list_i[position_i - 1], list_j[position_j - 1]
                p_i, p_j = shared_i.period_ns, shared_j.period_ns
                horizon = math.lcm(p_i, p_j)
                for alpha in range(horizon // p_i):
                    for beta in range(horizon // p_j):
                        i_leaves_first = (
                            shared_i.offset_ns + alpha * p_i
                            <= before_j.offset_ns + beta * p_j + before_j.link.prop_delay_ns
                        )
                        j_leaves_first = (
                            shared_j.offset_ns + beta * p_j
                            <= before_i.offset_ns + alpha * p_i + before_i.link.prop_delay_ns
                        )
                        if not (i_leaves_first or j_leaves_first):
                            self.flag(
                                "isolation",
                                flow_i.id,
                                f"quadros de {flow_j.id} podem dividir a fila de {shared_i.link}",
                            )
                            break
                    else:
                        continue
                    break


def repeated_windows(start: int, length: int, period: int, other_period: int) -> list[tuple[int, int]]:
    """Repete [start, start + length) em cada período dentro de LCM(period, other)"""
    horizon = math.lcm(period, other_period)
    return [(start + n * period, start + n * period + length) for n in range(horizon // period)]


def overlapping(windows_a, windows_b) -> bool:
    return any(
        start_a < end_b and start_b < end_a
        for start_a, end_a in windows_a
        for start_b, end_b in windows_b
    )


def check_schedule(scenario: Scenario, schedule: Schedule) -> list[ScheduleViolation]:
    """
    Verifica o escalonamento sem usar o modelo ILP.

    Returns:
        Lista de violações, vazia quando o escalonamento é válido
    """
    return ScheduleChecker(scenario, schedule).run()
