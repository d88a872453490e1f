"""
Tipos do simulador: pacotes, relógios, jitter, eventos e relatório
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum, StrEnum
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from apps.network.types import SimMode, TimeNs

SKEW_STREAM = 0


class SimulationError(Exception):
    """Violação de protocolo ou incompatibilidade entre cenário e escalonamento"""


class DropReason(StrEnum):
    REPLACED_IN_BUFFER = "replaced_in_buffer"


class EventType(IntEnum):
    """Ordem de desempate para eventos no mesmo instante e no mesmo nó"""

    GENERATE = 0
    RECEIVE = 1
    OPPORTUNITY = 2
    RELEASE = 3
    DELIVER = 4


@dataclass(order=True)
class Event:
    time: TimeNs
    node_id: str
    type: EventType
    flow_id: str
    seq: int
    counter: int
    action: Callable[[], None] = field(compare=False)


@dataclass(slots=True)
class Packet:
    flow_id: str
    seq: int
    t_gen: TimeNs
    t_gen_tsn: TimeNs
    t_gw_arrive: Optional[TimeNs] = None
    wait: Optional[TimeNs] = None
    t_gw_send: Optional[TimeNs] = None
    burst_shift: TimeNs = 0
    t_edge_arrive: Optional[TimeNs] = None
    t_deliver: Optional[TimeNs] = None
    drop_reason: Optional[DropReason] = None

    @property
    def dropped(self) -> bool:
        return self.drop_reason is not None

    @property
    def delivered(self) -> bool:
        return self.t_deliver is not None

    @property
    def e2e_delay(self) -> Optional[TimeNs]:
        """Atraso fim a fim no relógio TSN, com a geração convertida"""
        return None if self.t_deliver is None else self.t_deliver - self.t_gen_tsn

    @property
    def fiveg_delay(self) -> Optional[TimeNs]:
        return None if self.t_gw_arrive is None else self.t_gw_arrive - self.t_gen_tsn

    @property
    def tsn_residence(self) -> Optional[TimeNs]:
        if self.t_deliver is None or self.t_gw_arrive is None:
            return None
        return self.t_deliver - self.t_gw_arrive


class RngStreams:
    """Fluxos aleatórios independentes e reprodutíveis derivados de uma semente"""

    def __init__(self, seed: int):
        self.seed = seed
        self._streams: dict[int, np.random.Generator] = {}

    def get_stream(self, index: int) -> np.random.Generator:
        if index not in self._streams:
            sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(index,))
            self._streams[index] = np.random.default_rng(sequence)
        return self._streams[index]


@dataclass(frozen=True)
class ClockModel:
    """Desvio constante entre os relógios 5G e TSN: tsn = 5g + skew_offset"""

    skew_width_ns: TimeNs
    skew_offset_ns: TimeNs

    @classmethod
    def sample(
        cls, width_ns: TimeNs, streams: RngStreams, offset_ns: Optional[TimeNs] = None
    ) -> "ClockModel":
        """Sorteia o desvio em U(−S/2, S/2) ou usa o desvio fixo informado"""
        if offset_ns is not None:
            return cls(width_ns, offset_ns)
        if width_ns <= 0:
            return cls(0, 0)
        u = streams.get_stream(SKEW_STREAM).random()
        half = width_ns // 2
        offset = math.floor((2 * u - 1) * width_ns / 2)
        return cls(width_ns, max(-half, min(half, offset)))

    def to_tsn(self, fiveg_time: TimeNs) -> TimeNs:
        return fiveg_time + self.skew_offset_ns


class JitterModel:
    """
    Atraso extra de transmissão 5G em U(0, J), com um fluxo aleatório por
    fluxo de dados.

    O mesmo u é consumido por pacote qualquer que seja J, logo o jitter de
    cada pacote é monótono em J para uma semente fixa.
    """

    def __init__(self, width_ns: TimeNs, streams: RngStreams, flow_ids: tuple[str, ...]):
        self.width_ns = width_ns
        self._generators = {
            flow_id: streams.get_stream(index + 1) for index, flow_id in enumerate(flow_ids)
        }

    def draw(self, flow_id: str) -> TimeNs:
        u = self._generators[flow_id].random()
        if self.width_ns <= 0:
            return 0
        return min(math.floor(u * (self.width_ns + 1)), self.width_ns)


@dataclass(frozen=True)
class FlowStats:
    flow_id: str
    generated: int
    delivered: int
    dropped: int
    in_flight: int
    scheduled_delay_ns: TimeNs
    delays: tuple[TimeNs, ...] = ()
    ce: Optional[Fraction] = None
    cv: Optional[float] = None
    residence_std: Optional[float] = None
    std_ratio: Optional[float] = None
    deadline_misses: int = 0

    @property
    def flagged(self) -> bool:
        """Fluxo sem nenhuma entrega: CE e CV ausentes"""
        return self.delivered == 0


@dataclass(frozen=True)
class SimReport:
    mode: SimMode
    seed: int
    jitter_ns: TimeNs
    skew_ns: TimeNs
    skew_offset_ns: TimeNs
    duration_ns: TimeNs
    flows: tuple[FlowStats, ...]
    mce: Optional[float]
    mcv: Optional[float]
    std_ratio: Optional[float]
    tsn_usage: float
    fiveg_usage: float
    drops: int
    overlaps: int
    deadline_misses: int
    packets: tuple[Packet, ...] = field(default=(), compare=False, repr=False)

    def flow(self, flow_id: str) -> FlowStats:
        for stats in self.flows:
            if stats.flow_id == flow_id:
                return stats
        raise KeyError(flow_id)

    def to_dict(self) -> dict:
        return {
            "mode": str(self.mode),
            "seed": self.seed,
            "jitter_ns": self.jitter_ns,
            "skew_ns": self.skew_ns,
            "skew_offset_ns": self.skew_offset_ns,
            "duration_ns": self.duration_ns,
            "mce": self.mce,
            "mcv": self.mcv,
            "std_ratio": self.std_ratio,
            "tsn_usage": self.tsn_usage,
            "fiveg_usage": self.fiveg_usage,
            "drops": self.drops,
            "overlaps": self.overlaps,
            "deadline_misses": self.deadline_misses,
            "flows": [
                {
                    "flow_id": stats.flow_id,
                    "generated": stats.generated,
                    "delivered": stats.delivered,
                    "dropped": stats.dropped,
                    "in_flight": stats.in_flight,
                    "scheduled_delay_ns": stats.scheduled_delay_ns,
                    "ce": None if stats.ce is None else float(stats.ce),
                    "cv": stats.cv,
                    "residence_std": stats.residence_std,
                    "std_ratio": stats.std_ratio,
                    "deadline_misses": stats.deadline_misses,
                    "flagged": stats.flagged,
                }
                for stats in self.flows
            ],
        }
