"""
Motor de eventos discretos da rede convergente

Os eventos são ordenados por (tempo, nó, tipo, fluxo, seq) e a execução é
estritamente sequencial: entradas e semente iguais produzem o mesmo
relatório. O relógio do laço de eventos é o relógio TSN; a geração no UE é
convertida a partir do relógio 5G pelo desvio da execução.
"""

import heapq
import itertools
import logging
from typing import Callable, Optional

from django.conf import settings

from apps.network.types import (
    DataflowLink,
    ModelKind,
    Scenario,
    Schedule,
    SimMode,
    TimeNs,
)

from .metrics import compute_metrics, count_overlaps
from .nodes import AamGateway, EdgeSwitch, FlowPlan, Switch, TamGateway
from .types import (
    ClockModel,
    Event,
    EventType,
    JitterModel,
    Packet,
    RngStreams,
    SimReport,
    SimulationError,
)

logger = logging.getLogger(__name__)


def default_duration(scenario: Scenario, schedule: Schedule) -> TimeNs:
    """max(10 hiper-períodos 5GS, duração mínima configurada)"""
    minimum = getattr(settings, "SIM_MIN_DURATION_NS", 100_000_000)
    return max(10 * schedule.hyper_period_5gs_ns, minimum)


def check_compatibility(scenario: Scenario, schedule: Schedule, mode: SimMode):
    """
    Confere o par cenário/escalonamento antes do primeiro evento.

    Raises:
        SimulationError: digest diferente, fluxo sem instâncias na rota ou
            AAM sem período de retenção
    """
    if schedule.scenario_digest != scenario.digest:
        raise SimulationError("O escalonamento não corresponde ao cenário (digest diferente)")

    for flow in scenario.flows:
        entry = schedule.flow(flow.id)
        if entry is None or entry.radio is None:
            raise SimulationError(f"Fluxo sem escalonamento: {flow.id}")
        links = tuple(instance.link for instance in entry.instances)
        if links != flow.scheduled_links:
            raise SimulationError(f"Instâncias do fluxo {flow.id} não cobrem a rota")
        if len({instance.period_ns for instance in entry.instances}) != 1:
            raise SimulationError(f"Instâncias do fluxo {flow.id} com períodos diferentes")
        if mode == SimMode.AAM and (
            schedule.model_kind != ModelKind.ATSM
            or entry.hold_period_ns != entry.instances[0].period_ns
        ):
            raise SimulationError(
                f"AAM exige escalonamento ATSM com retenção igual a T (fluxo {flow.id})"
            )


class Simulator:
    """Laço de eventos de uma execução"""

    def __init__(
        self,
        scenario: Scenario,
        schedule: Schedule,
        mode: SimMode,
        clock: ClockModel,
        jitter: JitterModel,
        duration_ns: TimeNs,
    ):
        self.scenario = scenario
        self.timetable = schedule
        self.mode = mode
        self.clock = clock
        self.jitter = jitter
        self.duration_ns = duration_ns
        self.now: TimeNs = 0

        self.plans = {
            flow.id: FlowPlan(flow, schedule.flow(flow.id), schedule.tti_ns, schedule.proc_delay_ns)
            for flow in scenario.flows
        }
        gateway_id = scenario.network.gateway.id
        self.gateway = (
            AamGateway(self, gateway_id) if mode == SimMode.AAM else TamGateway(self, gateway_id)
        )
        self.switches: dict[str, Switch] = {}
        self.edges: dict[str, EdgeSwitch] = {}
        self.packets: list[Packet] = []
        self.occupancy: dict[str, list[tuple[TimeNs, TimeNs]]] = {}

        self._queue: list[Event] = []
        self._counter = itertools.count()

    def schedule(
        self,
        time: TimeNs,
        node_id: str,
        type: EventType,
        flow_id: str,
        seq: int,
        action: Callable[[], None],
    ):
        heapq.heappush(
            self._queue, Event(time, node_id, type, flow_id, seq, next(self._counter), action)
        )

    def occupy(self, link: DataflowLink, start: TimeNs, end: TimeNs, packet: Packet):
        self.occupancy.setdefault(link.label, []).append((start, end))

    def forward(self, packet: Packet, hop: int, start: TimeNs):
        """Transmite o pacote na instância do salto a partir do instante dado"""
        plan = self.plans[packet.flow_id]
        instance = plan.entry.instances[hop]
        link = instance.link
        end = start + instance.span_ns
        self.occupy(link, start, end, packet)

        if hop + 1 < len(plan.entry.instances):
            node = self.switches.setdefault(link.dst, Switch(self, link.dst))
            action = lambda: node.on_receive(packet, hop + 1)
        else:
            node = self.edges.setdefault(link.dst, EdgeSwitch(self, link.dst))
            action = lambda: node.on_receive(packet)
        self.schedule(
            end + link.prop_delay_ns, link.dst, EventType.RECEIVE, packet.flow_id, packet.seq, action
        )

    def deliver(self, packet: Packet):
        packet.t_deliver = self.now

    def generate(self, plan: FlowPlan, seq: int, t_gen: TimeNs):
        packet = Packet(
            flow_id=plan.flow_id,
            seq=seq,
            t_gen=t_gen,
            t_gen_tsn=self.clock.to_tsn(t_gen),
        )
        self.packets.append(packet)
        arrival = self.now + plan.radio_delay_ns + self.jitter.draw(plan.flow_id)
        self.schedule(
            arrival,
            self.gateway.node_id,
            EventType.RECEIVE,
            plan.flow_id,
            seq,
            lambda: self.gateway.on_receive(packet),
        )
        self._schedule_generation(plan, seq + 1)

    def _schedule_generation(self, plan: FlowPlan, seq: int):
        t_gen = seq * plan.flow.period_ns + plan.phase_ns
        if t_gen >= self.duration_ns:
            return
        self.schedule(
            self.clock.to_tsn(t_gen),
            plan.flow.user_equipment or plan.flow_id,
            EventType.GENERATE,
            plan.flow_id,
            seq,
            lambda: self.generate(plan, seq, t_gen),
        )

    def execute(self) -> list[Packet]:
        for plan in self.plans.values():
            self._schedule_generation(plan, 0)
        return self.drain()

    def drain(self) -> list[Packet]:
        """Processa eventos até a fila esvaziar"""
        while self._queue:
            event = heapq.heappop(self._queue)
            self.now = event.time
            event.action()
        return self.packets


def run(
    scenario: Scenario,
    schedule: Schedule,
    mode: Optional[SimMode] = None,
    seed: Optional[int] = None,
    *,
    jitter_ns: Optional[TimeNs] = None,
    skew_ns: Optional[TimeNs] = None,
    skew_offset_ns: Optional[TimeNs] = None,
    duration_ns: Optional[TimeNs] = None,
) -> SimReport:
    """
    Executa o escalonamento sob TAM ou AAM e calcula as métricas.

    Parâmetros omitidos vêm da seção sim do cenário. Com skew_offset_ns o
    desvio de relógio é fixo; sem ele é sorteado uma vez em U(-S/2, S/2).

    Raises:
        SimulationError: par incompatível ou violação de protocolo
    """
    sim_config = scenario.sim
    mode = SimMode(mode or sim_config.mode)
    seed = sim_config.seed if seed is None else seed
    jitter_ns = sim_config.jitter_ns if jitter_ns is None else jitter_ns
    skew_ns = sim_config.skew_ns if skew_ns is None else skew_ns
    if skew_offset_ns is None:
        skew_offset_ns = sim_config.skew_offset_ns
    if duration_ns is None:
        duration_ns = sim_config.duration_ns or default_duration(scenario, schedule)
    if jitter_ns < 0 or skew_ns < 0 or duration_ns <= 0:
        raise SimulationError("Jitter e desvio devem ser não negativos e a duração positiva")

    check_compatibility(scenario, schedule, mode)

    streams = RngStreams(seed)
    clock = ClockModel.sample(skew_ns, streams, skew_offset_ns)
    jitter = JitterModel(jitter_ns, streams, tuple(flow.id for flow in scenario.flows))
    simulator = Simulator(scenario, schedule, mode, clock, jitter, duration_ns)
    packets = simulator.execute()

    report = compute_metrics(
        packets,
        schedule,
        scenario,
        mode=mode,
        seed=seed,
        duration_ns=duration_ns,
        jitter_ns=jitter_ns,
        clock=clock,
        overlaps=count_overlaps(simulator.occupancy),
    )
    logger.info(
        "Simulação %s de %s (semente %d): mce=%s mcv=%s descartes=%d sobreposições=%d",
        mode,
        scenario.name,
        seed,
        report.mce,
        report.mcv,
        report.drops,
        report.overlaps,
    )
    return report
