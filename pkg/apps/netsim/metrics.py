"""
Métricas das execuções: coeficiente de expansão (CE), coeficiente de
variação (CV), razão de desvios e uso de recursos
"""

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from apps.network.types import Scenario, Schedule, SimMode, TimeNs

from .nodes import FlowPlan
from .types import ClockModel, FlowStats, Packet, SimReport


def scaled_variance(values: Sequence[TimeNs]) -> int:
    """n²·var(x) em inteiros, exato e invariante a deslocamentos constantes"""
    n = len(values)
    total = sum(values)
    return n * sum(value * value for value in values) - total * total


def std_ratio(e2e: Sequence[TimeNs], fiveg: Sequence[TimeNs]) -> Optional[float]:
    """σ(D_e2e)/σ(D_5GS); ausente quando o atraso 5GS não varia"""
    denominator = scaled_variance(fiveg)
    if len(fiveg) < 2 or denominator == 0:
        return None
    return math.sqrt(Fraction(scaled_variance(e2e), denominator))


def count_overlaps(occupancy: dict[str, list[tuple[TimeNs, TimeNs]]]) -> int:
    """Conta pares de quadros que ocupam o mesmo enlace cabeado ao mesmo tempo"""
    overlaps = 0
    for intervals in occupancy.values():
        busy_until = None
        for start, end in sorted(intervals):
            if busy_until is not None and start < busy_until:
                overlaps += 1
            busy_until = end if busy_until is None else max(busy_until, end)
    return overlaps


def tsn_usage(plans: Iterable[FlowPlan], duration_ns: TimeNs) -> float:
    """Tempo de porta aberta reservado na saída do gateway dividido pelo tempo simulado"""
    open_time = sum(
        plan.openings_before(duration_ns) * plan.entry.instances[0].span_ns for plan in plans
    )
    return open_time / duration_ns


def flow_stats(flow_id: str, packets: list[Packet], scheduled_delay: TimeNs, deadline: TimeNs) -> FlowStats:
    delivered = [packet for packet in packets if packet.delivered and not packet.dropped]
    dropped = sum(1 for packet in packets if packet.dropped)
    delays = tuple(packet.e2e_delay for packet in delivered)

    if not delays:
        return FlowStats(
            flow_id=flow_id,
            generated=len(packets),
            delivered=0,
            dropped=dropped,
            in_flight=len(packets) - dropped,
            scheduled_delay_ns=scheduled_delay,
        )

    values = np.array(delays, dtype=np.float64)
    mean = float(values.mean())
    residence = np.array([packet.tsn_residence for packet in delivered], dtype=np.float64)
    return FlowStats(
        flow_id=flow_id,
        generated=len(packets),
        delivered=len(delivered),
        dropped=dropped,
        in_flight=len(packets) - len(delivered) - dropped,
        scheduled_delay_ns=scheduled_delay,
        delays=delays,
        ce=Fraction(sum(delays), len(delays)) / scheduled_delay if scheduled_delay else None,
        cv=float(values.std()) / mean if mean else None,
        residence_std=float(residence.std()),
        std_ratio=std_ratio(delays, [packet.fiveg_delay for packet in delivered]),
        deadline_misses=sum(1 for delay in delays if delay > deadline),
    )


def compute_metrics(
    packets: Sequence[Packet],
    schedule: Schedule,
    scenario: Scenario,
    *,
    mode: SimMode,
    seed: int,
    duration_ns: TimeNs,
    jitter_ns: TimeNs,
    clock: ClockModel,
    overlaps: int = 0,
) -> SimReport:
    """
    Agrega os rastros da execução no relatório.

    CE = média do atraso real / atraso planejado; CV = desvio populacional /
    média. MCE e MCV são médias simples sobre os fluxos com entregas; fluxos
    sem entrega ficam marcados e fora das médias. Pacotes substituídos no
    buffer não entram nas estatísticas de atraso.
    """
    by_flow: dict[str, list[Packet]] = {flow.id: [] for flow in scenario.flows}
    for packet in packets:
        by_flow[packet.flow_id].append(packet)

    flows = []
    for flow in scenario.flows:
        entry = schedule.flow(flow.id)
        flows.append(
            flow_stats(flow.id, by_flow[flow.id], entry.scheduled_e2e_delay_ns or 0, flow.deadline_ns)
        )

    measured = [stats for stats in flows if not stats.flagged]
    ces = [float(stats.ce) for stats in measured if stats.ce is not None]
    cvs = [stats.cv for stats in measured if stats.cv is not None]
    ratios = [stats.std_ratio for stats in measured if stats.std_ratio is not None]

    plans = [
        FlowPlan(flow, schedule.flow(flow.id), schedule.tti_ns, schedule.proc_delay_ns)
        for flow in scenario.flows
    ]
    return SimReport(
        mode=mode,
        seed=seed,
        jitter_ns=jitter_ns,
        skew_ns=clock.skew_width_ns,
        skew_offset_ns=clock.skew_offset_ns,
        duration_ns=duration_ns,
        flows=tuple(flows),
        mce=float(np.mean(ces)) if ces else None,
        mcv=float(np.mean(cvs)) if cvs else None,
        std_ratio=float(np.mean(ratios)) if ratios else None,
        tsn_usage=tsn_usage(plans, duration_ns),
        fiveg_usage=schedule.fiveg_usage,
        drops=sum(stats.dropped for stats in flows),
        overlaps=overlaps,
        deadline_misses=sum(stats.deadline_misses for stats in flows),
        packets=tuple(packets),
    )
