"""
Tipos de domínio da rede convergente 5G + TSN

Todos os tipos são imutáveis após a construção e podem ser compartilhados
entre threads. Toda grandeza de tempo é um inteiro em nanossegundos.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from functools import cached_property
from typing import Optional

TimeNs = int

# Limite de representação para hiper-períodos (2^62 ns)
MAX_TIME_NS: TimeNs = 2**62


class NodeRole(StrEnum):
    END_STATION = "end_station"
    TSN_SWITCH = "tsn_switch"
    GATEWAY = "gateway"
    BASE_STATION = "base_station"
    USER_EQUIPMENT = "user_equipment"


class ModelKind(StrEnum):
    ATSM = "atsm"
    STSM = "stsm"


class SimMode(StrEnum):
    TAM = "tam"
    AAM = "aam"


@dataclass(frozen=True)
class Node:
    id: str
    role: NodeRole


@dataclass(frozen=True)
class WiredLink:
    """Enlace físico não direcionado entre dois nós cabeados"""

    a: str
    b: str
    rate_bps: int
    prop_delay_ns: TimeNs


@dataclass(frozen=True, order=True)
class DataflowLink:
    """Enlace de fluxo de dados direcionado [src, dst]"""

    src: str
    dst: str
    rate_bps: int = field(default=0, compare=False)
    prop_delay_ns: TimeNs = field(default=0, compare=False)
    is_radio: bool = field(default=False, compare=False)

    @property
    def label(self) -> str:
        return f"{self.src}>{self.dst}"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class NetworkGraph:
    nodes: tuple[Node, ...]
    wired_links: tuple[WiredLink, ...]

    @cached_property
    def dataflow_links(self) -> frozenset[DataflowLink]:
        from .utils import derive_dataflow_links

        return derive_dataflow_links(self)

    @cached_property
    def _links_by_label(self) -> dict[str, DataflowLink]:
        return {link.label: link for link in self.dataflow_links}

    @cached_property
    def _nodes_by_id(self) -> dict[str, Node]:
        return {node.id: node for node in self.nodes}

    def node(self, node_id: str) -> Optional[Node]:
        return self._nodes_by_id.get(node_id)

    def nodes_with_role(self, role: NodeRole) -> list[Node]:
        return [node for node in self.nodes if node.role == role]

    @property
    def gateway(self) -> Node:
        return self.nodes_with_role(NodeRole.GATEWAY)[0]

    @property
    def base_station(self) -> Node:
        return self.nodes_with_role(NodeRole.BASE_STATION)[0]

    @cached_property
    def uplink(self) -> DataflowLink:
        """O único enlace de subida 5GS, compartilhado por todos os UEs"""
        return next(link for link in self.dataflow_links if link.is_radio)

    def link(self, src: str, dst: str) -> Optional[DataflowLink]:
        return self._links_by_label.get(f"{src}>{dst}")


@dataclass(frozen=True)
class FlowSpec:
    """
    Fluxo time-triggered: um quadro por período, do UE até uma estação final.

    A rota começa no enlace de subida 5GS; os enlaces cabeados intermediários
    recebem instâncias escalonadas e o último salto (edge -> ES) não.
    """

    id: str
    period_ns: TimeNs
    length_bytes: int
    deadline_ns: TimeNs
    route: tuple[DataflowLink, ...]
    user_equipment: str = ""

    @property
    def uplink(self) -> DataflowLink:
        return self.route[0]

    @property
    def wired_links(self) -> tuple[DataflowLink, ...]:
        return self.route[1:]

    @property
    def scheduled_links(self) -> tuple[DataflowLink, ...]:
        return self.route[1:-1]

    @property
    def last_hop(self) -> DataflowLink:
        return self.route[-1]

    @property
    def end_station(self) -> str:
        return self.route[-1].dst


@dataclass(frozen=True)
class RadioConfig:
    tti_ns: TimeNs
    k_max: int
    proc_delay_ns: TimeNs
    rb_bytes: tuple[tuple[str, tuple[int, ...]], ...]

    def bytes_per_rb(self, flow_id: str) -> tuple[int, ...]:
        """Retorna R[flow][k] para k = 1..kMax (índice 0 corresponde ao RB 1)"""
        for key, row in self.rb_bytes:
            if key == flow_id:
                return row
        raise KeyError(flow_id)


@dataclass(frozen=True)
class SchedulerConfig:
    gamma: Fraction = Fraction(1, 2)
    min_p_ns: TimeNs = 100_000
    big_m: str = "per_constraint"
    tam_budget_ns: TimeNs = 5_000


@dataclass(frozen=True)
class SimConfig:
    mode: SimMode = SimMode.AAM
    jitter_ns: TimeNs = 0
    skew_ns: TimeNs = 0
    skew_offset_ns: Optional[TimeNs] = None
    duration_ns: Optional[TimeNs] = None
    seed: int = 1


@dataclass(frozen=True)
class Scenario:
    name: str
    network: NetworkGraph
    radio: RadioConfig
    flows: tuple[FlowSpec, ...]
    scheduler: SchedulerConfig
    sim: SimConfig
    digest: str = ""

    def flow(self, flow_id: str) -> FlowSpec:
        for flow in self.flows:
            if flow.id == flow_id:
                return flow
        raise KeyError(flow_id)


@dataclass(frozen=True)
class TsnInstance:
    """Instância potencial de transmissão (T, offset, span) de um fluxo num enlace"""

    flow_id: str
    link: DataflowLink
    period_ns: TimeNs
    offset_ns: TimeNs
    span_ns: TimeNs


@dataclass(frozen=True)
class RadioInstance:
    flow_id: str
    start_tti: int
    tti_count: int
    rb_set: tuple[int, ...]


@dataclass(frozen=True)
class FlowSchedule:
    flow_id: str
    radio: Optional[RadioInstance]
    instances: tuple[TsnInstance, ...]
    hold_period_ns: TimeNs
    scheduled_e2e_delay_ns: Optional[TimeNs] = None


@dataclass(frozen=True)
class Schedule:
    model_kind: ModelKind
    scenario_digest: str
    tti_ns: TimeNs
    proc_delay_ns: TimeNs
    k_max: int
    flows: tuple[FlowSchedule, ...]
    rbs_used: tuple[int, ...] = ()
    hyper_period_tsn_ns: TimeNs = 0
    hyper_period_5gs_ns: TimeNs = 0
    gamma: Fraction = Fraction(1, 2)
    status: str = "optimal"
    objective: Optional[Fraction] = None
    assignment: dict[str, int] = field(default_factory=dict, compare=False)
    stats: dict[str, float] = field(default_factory=dict, compare=False)

    def flow(self, flow_id: str) -> Optional[FlowSchedule]:
        for entry in self.flows:
            if entry.flow_id == flow_id:
                return entry
        return None

    @property
    def fiveg_usage(self) -> float:
        return len(self.rbs_used) / self.k_max if self.k_max else 0.0
