import logging
from typing import Optional

from apps.network.types import Scenario, SimMode, TimeNs
from apps.scheduling.serializers import schedule_from_document
from utils.cache import cache_manager

from .engine import run

logger = logging.getLogger(__name__)


def simulate_document(
    scenario: Scenario,
    schedule_document: dict,
    mode: Optional[SimMode] = None,
    seed: Optional[int] = None,
    jitter_ns: Optional[TimeNs] = None,
    skew_ns: Optional[TimeNs] = None,
    skew_offset_ns: Optional[TimeNs] = None,
    duration_ns: Optional[TimeNs] = None,
    use_cache: bool = True,
) -> dict:
    """
    Simula um arquivo de escalonamento e retorna o relatório em dicionário.

    Os relatórios ficam em cache pela combinação de cenário, escalonamento e
    parâmetros; a execução é determinística, então o cache é sempre válido.

    Raises:
        django.core.exceptions.ValidationError: documento inválido ou digest diferente
        SimulationError: violação de protocolo durante a execução
    """
    schedule = schedule_from_document(schedule_document, scenario)
    params = {
        "mode": mode,
        "seed": seed,
        "jitter_ns": jitter_ns,
        "skew_ns": skew_ns,
        "skew_offset_ns": skew_offset_ns,
        "duration_ns": duration_ns,
    }

    def fetch():
        return run(scenario, schedule, **params).to_dict()

    if not use_cache or not scenario.digest:
        return fetch()

    key = cache_manager.simulation_key(scenario.digest, schedule_document, **params)
    return cache_manager.get_or_set_cache(key, fetch, ttl_type="LONG", digest=scenario.digest)
