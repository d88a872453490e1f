"""
Escrita dos rastros por pacote e dos relatórios em CSV/JSON
"""

import csv
import json
from typing import IO, Iterable, Optional

from .types import Packet, SimReport

TRACE_COLUMNS = [
    "flow_id",
    "seq",
    "t_gen_ns",
    "t_gw_ns",
    "wait_ns",
    "t_edge_ns",
    "t_deliver_ns",
    "dropped",
]

REPORT_COLUMNS = [
    "sweep_param",
    "value",
    "seed",
    "mce",
    "mcv",
    "std_ratio",
    "tsn_usage",
    "fiveg_usage",
    "drops",
]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_trace(packets: Iterable[Packet], stream: IO[str]):
    """Uma linha por pacote; tempos de geração no relógio TSN"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for packet in sorted(packets, key=lambda p: (p.flow_id, p.seq)):
        writer.writerow(
            [
                packet.flow_id,
                packet.seq,
                packet.t_gen_tsn,
                _cell(packet.t_gw_arrive),
                _cell(packet.wait),
                _cell(packet.t_edge_arrive),
                _cell(packet.t_deliver),
                int(packet.dropped),
            ]
        )


def report_row(
    report: SimReport, sweep_param: str = "", value="", seed: Optional[object] = None
) -> dict:
    return {
        "sweep_param": sweep_param,
        "value": value,
        "seed": report.seed if seed is None else seed,
        "mce": _cell(report.mce),
        "mcv": _cell(report.mcv),
        "std_ratio": _cell(report.std_ratio),
        "tsn_usage": _cell(report.tsn_usage),
        "fiveg_usage": _cell(report.fiveg_usage),
        "drops": report.drops,
    }


def write_report_rows(rows: Iterable[dict], stream: IO[str]):
    writer = csv.DictWriter(stream, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: _cell(row.get(column)) for column in REPORT_COLUMNS})


def write_report(report: SimReport, stream: IO[str]):
    write_report_rows([report_row(report)], stream)


def report_json(report: SimReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)
