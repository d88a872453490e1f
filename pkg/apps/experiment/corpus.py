"""
Geradores de documentos de cenário

Documentos produzidos aqui passam pelo mesmo ScenarioDocumentSerializer dos
arquivos em scenarios/, portanto usam apenas chaves do formato de arquivo.
"""

from typing import Optional

import networkx as nx

# Tipos de fluxo da carga de referência: (prefixo, período, bytes, quantidade)
DESK_FLOW_TYPES = (
    ("I", 500_000, 96, 2),
    ("II", 1_000_000, 128, 2),
    ("III", 2_000_000, 256, 4),
)

FLOWCOUNT_PERIOD_NS = 1_000_000
FLOWCOUNT_LENGTH_BYTES = 200


def line_network(
    switch_count: int = 4,
    end_stations: int = 8,
    user_equipments: int = 8,
    rate_bps: int = 100_000_000,
    prop_delay_ns: int = 1_000,
) -> dict:
    """
    Topologia em linha: gw - sw1 - ... - swN, estações finais distribuídas
    entre os switches em rodízio, UEs ligados apenas pela interface 5G.
    """
    nodes = [{"id": "gw", "role": "gateway"}, {"id": "bs", "role": "base_station"}]
    links = []
    switches = [f"sw{index}" for index in range(1, switch_count + 1)]
    previous = "gw"
    for switch in switches:
        nodes.append({"id": switch, "role": "tsn_switch"})
        links.append({"a": previous, "b": switch, "rate_bps": rate_bps, "prop_delay_ns": prop_delay_ns})
        previous = switch
    for index in range(1, end_stations + 1):
        station = f"es{index}"
        nodes.append({"id": station, "role": "end_station"})
        links.append(
            {
                "a": switches[(index - 1) % switch_count],
                "b": station,
                "rate_bps": rate_bps,
                "prop_delay_ns": prop_delay_ns,
            }
        )
    for index in range(1, user_equipments + 1):
        nodes.append({"id": f"ue{index}", "role": "user_equipment"})
    return {"nodes": nodes, "links": links}


def route_nodes(network: dict, user_equipment: str, end_station: str) -> list[str]:
    """Rota UE -> gateway -> ... -> estação final pelo menor caminho cabeado"""
    wired = nx.Graph()
    wired.add_edges_from((link["a"], link["b"]) for link in network["links"])
    gateway = next(node["id"] for node in network["nodes"] if node["role"] == "gateway")
    return [user_equipment] + nx.shortest_path(wired, gateway, end_station)


def scenario_document(
    name: str,
    network: dict,
    flows: list[dict],
    radio: Optional[dict] = None,
    scheduler: Optional[dict] = None,
    sim: Optional[dict] = None,
    description: str = "",
) -> dict:
    document = {"name": name, "description": description, "network": network, "flows": flows}
    for key, section in (("radio", radio), ("scheduler", scheduler), ("sim", sim)):
        if section is not None:
            document[key] = section
    return document


def desk_document(k_max: int = 6) -> dict:
    """Cenário de bancada: 4 switches em linha, 8 ES, 8 UE e 2/2/4 fluxos"""
    network = line_network()
    flows = []
    index = 0
    for prefix, period, length, count in DESK_FLOW_TYPES:
        for number in range(1, count + 1):
            index += 1
            flows.append(
                {
                    "id": f"f{prefix}{number}",
                    "period_ns": period,
                    "length_bytes": length,
                    "deadline_ns": period,
                    "route": route_nodes(network, f"ue{index}", f"es{index}"),
                }
            )
    return scenario_document(
        "desk",
        network,
        flows,
        radio={"tti_ns": 62_500, "k_max": k_max, "t_proc_ttis": 1, "rb_bytes": 128},
        scheduler={"gamma": "0.5", "min_p_ns": 100_000},
        description="Topologia de bancada com os três tipos de fluxo TT",
    )


def flowcount_document(count: int, k_max: int = 10) -> dict:
    """Fluxos de 200 B com período e deadline de 1 ms atribuídos em rodízio"""
    network = line_network()
    ues = [node["id"] for node in network["nodes"] if node["role"] == "user_equipment"]
    stations = [node["id"] for node in network["nodes"] if node["role"] == "end_station"]
    flows = [
        {
            "id": f"f{index}",
            "period_ns": FLOWCOUNT_PERIOD_NS,
            "length_bytes": FLOWCOUNT_LENGTH_BYTES,
            "deadline_ns": FLOWCOUNT_PERIOD_NS,
            "route": route_nodes(network, ues[(index - 1) % len(ues)], stations[(index - 1) % len(stations)]),
        }
        for index in range(1, count + 1)
    ]
    return scenario_document(
        f"flowcount-{count}",
        network,
        flows,
        radio={"tti_ns": 62_500, "k_max": k_max, "t_proc_ttis": 1, "rb_bytes": 200},
        scheduler={"gamma": "0.5", "min_p_ns": 100_000},
    )


def example_document(skew_offset_ns: Optional[int] = None, mode: str = "aam") -> dict:
    """
    Exemplo de referência: TTI de 10 ms, período de 100 ms, enlaces de
    100 kbps (quadro de 125 B = 10 ms) e propagação de 2,5 ms.
    """
    network = {
        "nodes": [
            {"id": "ue1", "role": "user_equipment"},
            {"id": "bs", "role": "base_station"},
            {"id": "gw", "role": "gateway"},
            {"id": "edge", "role": "tsn_switch"},
            {"id": "es1", "role": "end_station"},
        ],
        "links": [
            {"a": "gw", "b": "edge", "rate_bps": 100_000, "prop_delay_ns": 2_500_000},
            {"a": "edge", "b": "es1", "rate_bps": 100_000, "prop_delay_ns": 2_500_000},
        ],
    }
    sim = {"mode": mode, "duration_ns": 1_000_000_000}
    if skew_offset_ns is not None:
        sim["skew_ns"] = 2 * abs(skew_offset_ns)
        sim["skew_offset_ns"] = skew_offset_ns
    return scenario_document(
        "example",
        network,
        [
            {
                "id": "f1",
                "period_ns": 100_000_000,
                "length_bytes": 125,
                "deadline_ns": 70_000_000,
                "route": ["ue1", "gw", "edge", "es1"],
            }
        ],
        radio={"tti_ns": 10_000_000, "k_max": 1, "t_proc_ttis": 1, "rb_bytes": 125},
        scheduler={"gamma": "0.5", "min_p_ns": 25_000_000, "tam_budget_ns": 0},
        sim=sim,
        description="Exemplo trabalhado de atraso e jitter com TAM e AAM",
    )
