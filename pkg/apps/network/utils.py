import hashlib
import json
import math
from typing import Iterable

import networkx as nx
from django.core.exceptions import ValidationError

from .types import (
    MAX_TIME_NS,
    DataflowLink,
    FlowSpec,
    ModelKind,
    NetworkGraph,
    NodeRole,
    Schedule,
    TimeNs,
)


def wire_span(length_bytes: int, rate_bps: int) -> TimeNs:
    """
    Calcula o tempo de transmissão de um quadro num enlace cabeado.

    Args:
        length_bytes: Tamanho do quadro em bytes
        rate_bps: Taxa do enlace em bits por segundo

    Returns:
        ceil(length·8·10^9 / rate) em nanossegundos
    """
    if rate_bps <= 0:
        raise ValidationError("A taxa do enlace deve ser positiva")
    return -(-(length_bytes * 8 * 1_000_000_000) // rate_bps)


def hyper_period(periods: Iterable[TimeNs]) -> TimeNs:
    """
    Calcula o mínimo múltiplo comum dos períodos.

    Args:
        periods: Períodos em nanossegundos, todos positivos

    Returns:
        O hiper-período em nanossegundos (0 para lista vazia)
    """
    result = 0
    for period in periods:
        if period <= 0:
            raise ValidationError(f"Período inválido: {period} ns")
        result = period if result == 0 else math.lcm(result, period)
        if result > MAX_TIME_NS:
            raise ValidationError("Hiper-período excede 2^62 ns")
    return result


def derive_dataflow_links(graph: NetworkGraph) -> frozenset[DataflowLink]:
    """
    Deriva os enlaces de fluxo de dados a partir do grafo físico.

    Cada enlace cabeado gera os dois enlaces direcionados; o enlace de subida
    5GS (estação base -> gateway) é acrescentado uma única vez.
    """
    if not graph.wired_links:
        raise ValidationError("A rede precisa de pelo menos um enlace cabeado")

    physical = nx.Graph()
    for wired in graph.wired_links:
        physical.add_edge(
            wired.a,
            wired.b,
            rate_bps=wired.rate_bps,
            prop_delay_ns=wired.prop_delay_ns,
        )

    links = {
        DataflowLink(src, dst, data["rate_bps"], data["prop_delay_ns"])
        for src, dst, data in physical.to_directed().edges(data=True)
    }

    gateways = graph.nodes_with_role(NodeRole.GATEWAY)
    stations = graph.nodes_with_role(NodeRole.BASE_STATION)
    if len(gateways) != 1 or len(stations) != 1:
        raise ValidationError(
            "A rede deve ter exatamente um gateway e uma estação base"
        )
    links.add(DataflowLink(stations[0].id, gateways[0].id, is_radio=True))
    return frozenset(links)


def resolve_route(graph: NetworkGraph, node_ids: list[str]) -> tuple[DataflowLink, ...]:
    """
    Converte a rota dada como lista de nós em enlaces de fluxo de dados.

    O primeiro salto (UE -> gateway) é mapeado para o enlace de subida 5GS.
    """
    if len(node_ids) < 4:
        raise ValidationError("A rota precisa de pelo menos 3 saltos (UE, gateway, edge, ES)")

    ue = graph.node(node_ids[0])
    if ue is None or ue.role != NodeRole.USER_EQUIPMENT:
        raise ValidationError(f"A rota deve começar num UE: {node_ids[0]}")
    if node_ids[1] != graph.gateway.id:
        raise ValidationError("O segundo nó da rota deve ser o gateway")
    end = graph.node(node_ids[-1])
    if end is None or end.role != NodeRole.END_STATION:
        raise ValidationError(f"A rota deve terminar numa estação final: {node_ids[-1]}")

    wired = nx.Graph((w.a, w.b) for w in graph.wired_links)
    if not (
        wired.has_node(node_ids[1])
        and wired.has_node(node_ids[-1])
        and nx.has_path(wired, node_ids[1], node_ids[-1])
    ):
        raise ValidationError(
            f"Extremidades da rota desconectadas: {node_ids[1]} -> {node_ids[-1]}"
        )

    route = [graph.uplink]
    for src, dst in zip(node_ids[1:], node_ids[2:]):
        link = graph.link(src, dst)
        if link is None:
            raise ValidationError(f"Enlace inexistente na rota: {src} -> {dst}")
        route.append(link)

    if len(set(route)) != len(route):
        raise ValidationError("A rota não pode repetir enlaces")
    return tuple(route)


def scenario_digest(document: dict) -> str:
    """Retorna o SHA-256 do JSON canônico do documento de cenário"""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def scheduled_e2e_delay(schedule: Schedule, flow: FlowSpec) -> TimeNs:
    """
    Calcula o atraso fim a fim planejado de um fluxo.

    ATSM: D_5GS + T_i + D_TSN(1) + D_TSN(2). STSM: cadeia sem espera, medida
    da geração (início do TTI c) até a entrega no último salto.

    Args:
        schedule: Escalonamento completo
        flow: Especificação do fluxo

    Returns:
        Atraso em nanossegundos
    """
    entry = schedule.flow(flow.id)
    if entry is None or entry.radio is None:
        raise ValidationError(f"Fluxo sem escalonamento: {flow.id}")
    if len(entry.instances) != len(flow.scheduled_links) or not entry.instances:
        raise ValidationError(f"Instâncias ausentes para o fluxo {flow.id}")

    first, last = entry.instances[0], entry.instances[-1]
    last_hop = flow.last_hop
    d_tsn_2 = wire_span(flow.length_bytes, last_hop.rate_bps) if flow.length_bytes else 0
    d_tsn_2 += last_hop.prop_delay_ns
    egress = last.offset_ns + last.span_ns + last.link.prop_delay_ns

    if schedule.model_kind == ModelKind.STSM:
        return egress + d_tsn_2 - entry.radio.start_tti * schedule.tti_ns

    d_5gs = entry.radio.tti_count * schedule.tti_ns + schedule.proc_delay_ns
    d_tsn_1 = egress - first.offset_ns
    return d_5gs + entry.hold_period_ns + d_tsn_1 + d_tsn_2
