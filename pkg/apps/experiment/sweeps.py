"""
Varreduras de experimento

Jitter e desvio de relógio comparam AAM (escalonamento ATSM) com TAM
(escalonamento STSM) no mesmo cenário base; quantidade de fluxos e gamma
comparam os próprios modelos. Os pontos rodam num pool de threads e cada
execução é sequencial; as linhas são ordenadas pela chave antes da escrita.
O solver roda sem limite de tempo de parede, apenas com o de nós.
"""

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from enum import StrEnum
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError

from apps.netsim.engine import run
from apps.netsim.reports import report_row, write_report_rows
from apps.netsim.types import SimulationError
from apps.network.loader import load_scenario, read_document
from apps.network.types import ModelKind, Scenario, SimMode
from apps.scheduling.utils import schedule_scenario
from apps.solver.bnb import SolveLimits

from .corpus import desk_document, flowcount_document

logger = logging.getLogger(__name__)

US = 1_000


class SweepKind(StrEnum):
    JITTER = "jitter"
    SKEW = "skew"
    FLOW_COUNT = "flowcount"
    GAMMA = "gamma"

    @property
    def compares_modes(self) -> bool:
        return self in (SweepKind.JITTER, SweepKind.SKEW)


DEFAULT_POINTS = {
    SweepKind.JITTER: tuple(step * 10 * US for step in range(6)),
    SweepKind.SKEW: tuple(step * 20 * US for step in range(1, 6)),
    SweepKind.FLOW_COUNT: (5, 10, 15, 20, 25),
    SweepKind.GAMMA: tuple(Decimal(step) / 5 for step in range(6)),
}

# Escalonamento usado por modo nas varreduras de jitter/desvio
MODE_MODELS = {SimMode.AAM: ModelKind.ATSM, SimMode.TAM: ModelKind.STSM}
MODEL_MODES = {model: mode for mode, model in MODE_MODELS.items()}


class SweepError(Exception):
    """O cenário base não permite a varredura"""


def parse_point(kind: SweepKind, raw: str):
    try:
        if kind == SweepKind.GAMMA:
            value = Decimal(raw)
            if not 0 <= value <= 1:
                raise ValueError
            return value
        value = int(raw)
    except (ValueError, ArithmeticError):
        raise ValidationError(f"Ponto inválido para a varredura {kind}: {raw}")
    if value < 0 or (kind == SweepKind.FLOW_COUNT and value == 0):
        raise ValidationError(f"Ponto inválido para a varredura {kind}: {raw}")
    return value


@dataclass(frozen=True)
class SweepSpec:
    kind: SweepKind
    points: tuple
    seeds_per_point: int
    base_document: Optional[dict] = None
    base_path: str = ""

    @classmethod
    def create(
        cls,
        kind: Union[str, SweepKind],
        points: Optional[list[str]] = None,
        seeds_per_point: Optional[int] = None,
        base_path: Optional[str] = None,
    ) -> "SweepSpec":
        kind = SweepKind(kind)
        parsed = (
            tuple(parse_point(kind, raw) for raw in points) if points else DEFAULT_POINTS[kind]
        )
        seeds = seeds_per_point or getattr(settings, "SWEEP_SEEDS_PER_POINT", 20)
        if seeds < 1:
            raise ValidationError("A varredura precisa de pelo menos uma semente por ponto")
        document = read_document(base_path) if base_path else None
        return cls(kind, parsed, seeds, document, base_path or "")

    def base(self) -> dict:
        return self.base_document if self.base_document is not None else desk_document()


@dataclass(frozen=True)
class PointResult:
    label: str
    value: object
    rows: tuple[dict, ...] = ()
    failure: Optional[str] = None


@dataclass
class SweepResult:
    spec: SweepSpec
    files: list[Path] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)


def sweep_threads() -> int:
    return getattr(settings, "SWEEP_THREADS", None) or os.cpu_count() or 1


def summary_row(kind: SweepKind, value, rows: list[dict]) -> dict:
    """Médias sobre as sementes; colunas ausentes em todas ficam vazias"""
    summary = {"sweep_param": str(kind), "value": value, "seed": "mean"}
    for column in ("mce", "mcv", "std_ratio", "tsn_usage", "fiveg_usage", "drops"):
        values = [float(row[column]) for row in rows if row[column] not in ("", None)]
        summary[column] = float(np.mean(values)) if values else None
    return summary


def _simulate_seeds(kind, value, scenario, schedule, mode, seeds, **params) -> list[dict]:
    return [
        report_row(run(scenario, schedule, mode, seed, **params), str(kind), value)
        for seed in range(1, seeds + 1)
    ]


def _mode_point(spec: SweepSpec, scenario: Scenario, schedules: dict, mode: SimMode, value) -> PointResult:
    params = {"jitter_ns": value} if spec.kind == SweepKind.JITTER else {"skew_ns": value}
    try:
        rows = _simulate_seeds(
            spec.kind, value, scenario, schedules[mode], mode, spec.seeds_per_point, **params
        )
    except SimulationError as exc:
        logger.warning("Falha no ponto %s=%s (%s): %s", spec.kind, value, mode, exc)
        return PointResult(str(mode), value, failure=str(exc))
    return PointResult(str(mode), value, tuple(rows))


def _model_point(spec: SweepSpec, model: ModelKind, value, limits) -> PointResult:
    try:
        if spec.kind == SweepKind.FLOW_COUNT:
            scenario = load_scenario(flowcount_document(value))
            gamma = None
        else:
            scenario = load_scenario(spec.base())
            gamma = Fraction(value)
        outcome = schedule_scenario(scenario, model, gamma, limits)
        if not outcome.is_optimal:
            raise SweepError(outcome.message or str(outcome.status))
        rows = _simulate_seeds(
            spec.kind, value, scenario, outcome.schedule, MODEL_MODES[model], spec.seeds_per_point
        )
    except (SweepError, SimulationError, ValidationError) as exc:
        logger.warning("Falha no ponto %s=%s (%s): %s", spec.kind, value, model, exc)
        return PointResult(str(model), value, failure=str(exc))
    return PointResult(str(model), value, tuple(rows))


def _mode_schedules(scenario: Scenario, limits) -> dict:
    schedules = {}
    for mode, model in MODE_MODELS.items():
        outcome = schedule_scenario(scenario, model, limits=limits)
        if not outcome.is_optimal:
            raise SweepError(
                f"Cenário base sem escalonamento {model} ótimo: {outcome.message or outcome.status}"
            )
        schedules[mode] = outcome.schedule
    return schedules


def run_sweep(
    spec: SweepSpec,
    out_dir: Union[str, Path],
    threads: Optional[int] = None,
    limits: Optional[SolveLimits] = None,
) -> SweepResult:
    """
    Executa a varredura e escreve um CSV por modo/modelo e o metadata.json.

    Raises:
        SweepError: cenário base sem escalonamento ótimo nos dois modelos
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    limits = (limits or SolveLimits.from_settings()).without_wall_time()
    threads = threads or sweep_threads()
    base_digest = ""

    with ThreadPoolExecutor(max_workers=threads) as pool:
        if spec.kind.compares_modes:
            scenario = load_scenario(spec.base())
            if spec.kind == SweepKind.SKEW and scenario.sim.skew_offset_ns is not None:
                raise SweepError("A varredura de desvio exige cenário sem skew_offset_ns fixo")
            base_digest = scenario.digest
            schedules = _mode_schedules(scenario, limits)
            futures = [
                pool.submit(_mode_point, spec, scenario, schedules, mode, value)
                for mode in MODE_MODELS
                for value in spec.points
            ]
        else:
            if spec.kind == SweepKind.GAMMA:
                base_digest = load_scenario(spec.base()).digest
            futures = [
                pool.submit(_model_point, spec, model, value, limits)
                for model in MODEL_MODES
                for value in spec.points
            ]
        points = [future.result() for future in futures]

    result = SweepResult(spec)
    by_label: dict[str, list[PointResult]] = {}
    for point in points:
        by_label.setdefault(point.label, []).append(point)
        if point.failure:
            result.failures.append(
                {"label": point.label, "value": str(point.value), "error": point.failure}
            )

    for label, label_points in sorted(by_label.items()):
        rows = []
        for point in sorted(label_points, key=lambda p: p.value):
            rows.extend(sorted(point.rows, key=lambda row: row["seed"]))
            if point.rows:
                rows.append(summary_row(spec.kind, point.value, list(point.rows)))
        path = out_dir / f"{spec.kind}_{label}.csv"
        with open(path, "w", encoding="utf-8", newline="") as handle:
            write_report_rows(rows, handle)
        result.files.append(path)

    _log_usage_ratio(spec, by_label)

    metadata = {
        "kind": str(spec.kind),
        "points": [str(point) for point in spec.points],
        "seeds_per_point": spec.seeds_per_point,
        "base_scenario": spec.base_path or "desk",
        "base_digest": base_digest,
        "files": [path.name for path in result.files],
        "failures": result.failures,
    }
    metadata_path = out_dir / "metadata.json"
    metadata_path.write_text(json.dumps(metadata, indent=2), encoding="utf-8")
    result.files.append(metadata_path)
    logger.info(
        "Varredura %s concluída: %d pontos, %d falhas", spec.kind, len(points), len(result.failures)
    )
    return result


def _log_usage_ratio(spec: SweepSpec, by_label: dict[str, list[PointResult]]):
    """Razão de uso TSN ATSM/STSM por ponto, quando os dois modelos resolveram"""
    if spec.kind.compares_modes:
        return
    usage = {
        (point.label, str(point.value)): float(point.rows[0]["tsn_usage"])
        for points in by_label.values()
        for point in points
        if point.rows
    }
    for value in spec.points:
        atsm = usage.get((str(ModelKind.ATSM), str(value)))
        stsm = usage.get((str(ModelKind.STSM), str(value)))
        if atsm is not None and stsm:
            logger.info("Uso TSN ATSM/STSM em %s=%s: %.3f", spec.kind, value, atsm / stsm)
