"""
Comportamento dos nós do simulador

Gateway AAM: um buffer de um pacote por fluxo, sobrescrito a cada chegada;
na oportunidade de transmissão o pacote recebe o carimbo de espera e segue.
Gateway TAM: fila FIFO por fluxo, esvaziada em rajada na primeira abertura da
porta em ou após a chegada. Switch de borda AAM: retém o pacote por T - espera.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

from apps.network.types import FlowSchedule, FlowSpec, SimMode, TimeNs
from apps.network.utils import wire_span

from .types import DropReason, EventType, Packet, SimulationError

if TYPE_CHECKING:
    from .engine import Simulator

logger = logging.getLogger(__name__)

TAM_QUEUE_WARNING_DEPTH = 2


@dataclass(frozen=True)
class FlowPlan:
    """Parâmetros de execução de um fluxo já resolvidos contra o escalonamento"""

    flow: FlowSpec
    entry: FlowSchedule
    tti_ns: TimeNs
    proc_delay_ns: TimeNs

    @property
    def flow_id(self) -> str:
        return self.flow.id

    @property
    def window_ns(self) -> TimeNs:
        return self.entry.instances[0].period_ns

    @property
    def hold_ns(self) -> TimeNs:
        return self.entry.hold_period_ns

    @property
    def phase_ns(self) -> TimeNs:
        return self.entry.radio.start_tti * self.tti_ns

    @property
    def radio_delay_ns(self) -> TimeNs:
        return self.entry.radio.tti_count * self.tti_ns + self.proc_delay_ns

    @cached_property
    def last_hop_span_ns(self) -> TimeNs:
        return wire_span(self.flow.length_bytes, self.flow.last_hop.rate_bps)

    def next_opening(self, hop: int, time: TimeNs) -> TimeNs:
        """Primeira abertura da instância do salto em ou após o instante (intervalo fechado à esquerda)"""
        instance = self.entry.instances[hop]
        cycles = -((instance.offset_ns - time) // instance.period_ns)
        return instance.offset_ns + cycles * instance.period_ns

    def openings_before(self, duration_ns: TimeNs) -> int:
        """Quantidade de aberturas da porta de saída do gateway em [0, duração)"""
        first = self.entry.instances[0]
        if duration_ns <= first.offset_ns:
            return 0
        return -((first.offset_ns - duration_ns) // first.period_ns)


class Gateway:
    def __init__(self, sim: "Simulator", node_id: str):
        self.sim = sim
        self.node_id = node_id
        self._armed: set[str] = set()

    def on_receive(self, packet: Packet):
        packet.t_gw_arrive = self.sim.now
        self.store(packet)
        self.arm(packet.flow_id, self.sim.now)

    def arm(self, flow_id: str, earliest: TimeNs):
        if flow_id in self._armed:
            return
        self._armed.add(flow_id)
        opening = self.sim.plans[flow_id].next_opening(0, earliest)
        self.sim.schedule(
            opening,
            self.node_id,
            EventType.OPPORTUNITY,
            flow_id,
            -1,
            lambda: self.on_opportunity(flow_id),
        )

    def on_opportunity(self, flow_id: str):
        self._armed.discard(flow_id)
        self.transmit_waiting(flow_id)
        if self.has_waiting(flow_id):
            self.arm(flow_id, self.sim.now + 1)

    def transmit_waiting(self, flow_id: str):
        packet = self.take(flow_id)
        if packet is not None:
            self.send(packet, 0)

    def send(self, packet: Packet, shift: TimeNs):
        packet.t_gw_send = self.sim.now + shift
        packet.burst_shift = shift
        self.sim.forward(packet, 0, packet.t_gw_send)

    def store(self, packet: Packet):
        raise NotImplementedError

    def take(self, flow_id: str):
        raise NotImplementedError

    def has_waiting(self, flow_id: str) -> bool:
        raise NotImplementedError


class AamGateway(Gateway):
    """Buffer de um pacote por fluxo: o pacote antigo é substituído pelo novo"""

    def __init__(self, sim: "Simulator", node_id: str):
        super().__init__(sim, node_id)
        self.buffers: dict[str, Packet] = {}

    def store(self, packet: Packet):
        replaced = self.buffers.get(packet.flow_id)
        if replaced is not None:
            replaced.drop_reason = DropReason.REPLACED_IN_BUFFER
            logger.debug(
                "Pacote %s#%d substituído no buffer do gateway", replaced.flow_id, replaced.seq
            )
        self.buffers[packet.flow_id] = packet

    def take(self, flow_id: str):
        packet = self.buffers.pop(flow_id, None)
        if packet is not None:
            packet.wait = self.sim.now - packet.t_gw_arrive
        return packet

    def has_waiting(self, flow_id: str) -> bool:
        return flow_id in self.buffers


class TamGateway(Gateway):
    """
    Fila FIFO por fluxo, sem carimbo de espera.

    Na abertura todos os quadros em fila saem em rajada, um após o outro, de
    modo que cada pacote parte na primeira abertura em ou após a sua chegada.
    """

    def __init__(self, sim: "Simulator", node_id: str):
        super().__init__(sim, node_id)
        self.queues: dict[str, deque[Packet]] = {}

    def store(self, packet: Packet):
        queue = self.queues.setdefault(packet.flow_id, deque())
        queue.append(packet)
        if len(queue) > TAM_QUEUE_WARNING_DEPTH:
            logger.warning(
                "Fila TAM do fluxo %s com profundidade %d em t=%d ns",
                packet.flow_id,
                len(queue),
                self.sim.now,
            )

    def take(self, flow_id: str):
        queue = self.queues.get(flow_id)
        return queue.popleft() if queue else None

    def transmit_waiting(self, flow_id: str):
        span = self.sim.plans[flow_id].entry.instances[0].span_ns
        shift = 0
        while (packet := self.take(flow_id)) is not None:
            self.send(packet, shift)
            shift += span

    def has_waiting(self, flow_id: str) -> bool:
        return bool(self.queues.get(flow_id))


class Switch:
    """Switch intermediário: transmite na próxima abertura da instância do enlace"""

    def __init__(self, sim: "Simulator", node_id: str):
        self.sim = sim
        self.node_id = node_id

    def on_receive(self, packet: Packet, hop: int):
        # quadros de uma rajada mantêm o espaçamento do gateway
        plan = self.sim.plans[packet.flow_id]
        opening = plan.next_opening(hop, self.sim.now - packet.burst_shift)
        self.sim.forward(packet, hop, opening + packet.burst_shift)


class EdgeSwitch:
    """Switch de borda: AAM retém o pacote por T - espera; TAM encaminha direto"""

    def __init__(self, sim: "Simulator", node_id: str):
        self.sim = sim
        self.node_id = node_id
        self._busy_until: dict[str, TimeNs] = {}

    def on_receive(self, packet: Packet):
        packet.t_edge_arrive = self.sim.now
        if self.sim.mode == SimMode.TAM:
            self.transmit(packet)
            return

        plan = self.sim.plans[packet.flow_id]
        if packet.wait is None:
            raise SimulationError(f"Pacote {packet.flow_id}#{packet.seq} sem carimbo de espera")
        hold = plan.hold_ns - packet.wait
        if hold <= 0:
            raise SimulationError(
                f"Espera {packet.wait} ns não é menor que T={plan.hold_ns} ns "
                f"no pacote {packet.flow_id}#{packet.seq}"
            )
        self.sim.schedule(
            self.sim.now + hold,
            self.node_id,
            EventType.RELEASE,
            packet.flow_id,
            packet.seq,
            lambda: self.transmit(packet),
        )

    def transmit(self, packet: Packet):
        """Último salto como porta FIFO: o quadro espera a porta ficar livre"""
        plan = self.sim.plans[packet.flow_id]
        link = plan.flow.last_hop
        start = max(self.sim.now, self._busy_until.get(link.label, self.sim.now))
        end = start + plan.last_hop_span_ns
        self._busy_until[link.label] = end
        self.sim.occupy(link, start, end, packet)
        self.sim.schedule(
            end + link.prop_delay_ns,
            link.dst,
            EventType.DELIVER,
            packet.flow_id,
            packet.seq,
            lambda: self.sim.deliver(packet),
        )
