import copy
from fractions import Fraction

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, TestCase
from rest_framework import status
from rest_framework.test import APITestCase

from apps.experiment.corpus import desk_document, example_document
from utils.cache import cache_manager

from .loader import format_errors, load_scenario
from .models import Scenario
from .types import MAX_TIME_NS, NodeRole, SimMode
from .utils import hyper_period, scenario_digest, wire_span


def minimal_document() -> dict:
    """Cenário com um fluxo e todos os blocos opcionais omitidos"""
    return {
        "name": "minimal",
        "network": {
            "nodes": [
                {"id": "gw", "role": "gateway"},
                {"id": "bs", "role": "base_station"},
                {"id": "sw", "role": "tsn_switch"},
                {"id": "es", "role": "end_station"},
                {"id": "ue", "role": "user_equipment"},
            ],
            "links": [{"a": "gw", "b": "sw"}, {"a": "sw", "b": "es"}],
        },
        "flows": [
            {
                "id": "f1",
                "period_ns": 1_000_000,
                "length_bytes": 100,
                "deadline_ns": 1_000_000,
                "route": ["ue", "gw", "sw", "es"],
            }
        ],
    }


class ArithmeticTestCase(SimpleTestCase):
    def test_wire_span_rounds_up(self):
        self.assertEqual(wire_span(125, 100_000), 10_000_000)
        self.assertEqual(wire_span(100, 100_000_000), 8_000)
        self.assertEqual(wire_span(1, 3_000_000_000), 3)

    def test_wire_span_requires_rate(self):
        with self.assertRaises(ValidationError):
            wire_span(100, 0)

    def test_hyper_period(self):
        self.assertEqual(hyper_period([500_000, 1_000_000, 2_000_000]), 2_000_000)
        self.assertEqual(hyper_period([3, 4, 6]), 12)
        self.assertEqual(hyper_period([]), 0)

    def test_hyper_period_overflow(self):
        with self.assertRaises(ValidationError):
            hyper_period([MAX_TIME_NS - 1, MAX_TIME_NS - 3])

    def test_digest_ignores_key_order(self):
        document = minimal_document()
        reordered = dict(reversed(list(document.items())))
        self.assertEqual(scenario_digest(document), scenario_digest(reordered))
        changed = copy.deepcopy(document)
        changed["flows"][0]["deadline_ns"] += 1
        self.assertNotEqual(scenario_digest(document), scenario_digest(changed))


class LoadScenarioTestCase(SimpleTestCase):
    def test_defaults(self):
        """Blocos omitidos recebem os valores padrão"""
        scenario = load_scenario(minimal_document())
        self.assertEqual(scenario.radio.tti_ns, 62_500)
        self.assertEqual(scenario.radio.k_max, 10)
        self.assertEqual(scenario.radio.proc_delay_ns, 62_500)
        self.assertEqual(scenario.radio.bytes_per_rb("f1"), (96,) * 10)
        self.assertEqual(scenario.scheduler.gamma, Fraction(1, 2))
        self.assertEqual(scenario.scheduler.min_p_ns, 100_000)
        self.assertEqual(scenario.scheduler.tam_budget_ns, 5_000)
        self.assertEqual(scenario.sim.mode, SimMode.AAM)
        self.assertEqual(scenario.sim.seed, 1)
        link = scenario.network.link("gw", "sw")
        self.assertEqual((link.rate_bps, link.prop_delay_ns), (100_000_000, 1_000))

    def test_route_resolution(self):
        flow = load_scenario(minimal_document()).flows[0]
        self.assertTrue(flow.uplink.is_radio)
        self.assertEqual([link.label for link in flow.scheduled_links], ["gw>sw"])
        self.assertEqual(flow.last_hop.label, "sw>es")
        self.assertEqual(flow.end_station, "es")
        self.assertEqual(flow.user_equipment, "ue")

    def test_dataflow_links(self):
        """Cada enlace cabeado gera dois enlaces direcionados mais a subida 5GS"""
        network = load_scenario(minimal_document()).network
        self.assertEqual(len(network.dataflow_links), 5)
        self.assertEqual(network.uplink.label, "bs>gw")
        self.assertEqual(network.gateway.role, NodeRole.GATEWAY)

    def test_digest_attached(self):
        document = minimal_document()
        self.assertEqual(load_scenario(document).digest, scenario_digest(document))

    def test_desk_corpus(self):
        scenario = load_scenario(desk_document())
        self.assertEqual(len(scenario.flows), 8)
        self.assertEqual(len(scenario.network.dataflow_links), 2 * 12 + 1)


class ScenarioValidationTestCase(SimpleTestCase):
    def assertInvalid(self, document, fragment):
        with self.assertRaises(ValidationError) as context:
            load_scenario(document)
        self.assertTrue(
            any(fragment in message for message in context.exception.messages),
            context.exception.messages,
        )

    def test_unknown_key(self):
        document = minimal_document()
        document["flows"][0]["priority"] = 7
        self.assertInvalid(document, "flows[0].priority")

    def test_route_not_starting_at_ue(self):
        document = minimal_document()
        document["flows"][0]["route"] = ["sw", "gw", "sw", "es"]
        self.assertInvalid(document, "UE")

    def test_route_through_missing_link(self):
        document = minimal_document()
        document["network"]["nodes"].append({"id": "sw2", "role": "tsn_switch"})
        document["network"]["links"].append({"a": "sw", "b": "sw2"})
        document["flows"][0]["route"] = ["ue", "gw", "sw2", "es"]
        self.assertInvalid(document, "Enlace inexistente")

    def test_two_gateways(self):
        document = minimal_document()
        document["network"]["nodes"].append({"id": "gw2", "role": "gateway"})
        self.assertInvalid(document, "gateway")

    def test_duplicate_flow_ids(self):
        document = minimal_document()
        document["flows"].append(copy.deepcopy(document["flows"][0]))
        self.assertInvalid(document, "duplicados")

    def test_gamma_out_of_range(self):
        document = minimal_document()
        document["scheduler"] = {"gamma": "1.2"}
        self.assertInvalid(document, "scheduler.gamma")

    def test_skew_offset_wider_than_width(self):
        document = minimal_document()
        document["sim"] = {"skew_ns": 10, "skew_offset_ns": 6}
        self.assertInvalid(document, "skew_offset_ns")

    def test_rb_bytes_per_flow_length(self):
        document = minimal_document()
        document["radio"] = {"k_max": 2, "rb_bytes_per_flow": {"f1": [96]}}
        self.assertInvalid(document, "k_max")

    def test_format_errors(self):
        messages = format_errors({"flows": [{"route": ["Obrigatório."]}], "name": ["Inválido."]})
        self.assertEqual(messages, ["flows[0].route: Obrigatório.", "name: Inválido."])


class ScenarioModelTestCase(TestCase):
    def test_save_computes_digest(self):
        scenario = Scenario.objects.create(name="example", document=example_document())
        self.assertEqual(scenario.digest, scenario_digest(example_document()))
        self.assertEqual(scenario.flow_count, 1)
        self.assertEqual(scenario.get_node_count(), 5)
        self.assertEqual(scenario.to_domain().digest, scenario.digest)

    def test_document_change_invalidates_cache(self):
        """Alterar o documento remove as entradas em cache do digest anterior"""
        scenario = Scenario.objects.create(name="example", document=example_document())
        old_digest = scenario.digest
        key = cache_manager.schedule_key(old_digest, "atsm", "1/2")
        cache_manager.cache.set(key, {"status": "optimal"})
        cache_manager.register_key(old_digest, key)

        scenario.document = example_document(skew_offset_ns=1_000_000)
        scenario.save()

        self.assertIsNone(cache_manager.cache.get(key))
        self.assertNotEqual(scenario.digest, old_digest)

    def test_delete_invalidates_cache(self):
        scenario = Scenario.objects.create(name="example", document=example_document())
        key = cache_manager.schedule_key(scenario.digest, "stsm", "1/2")
        cache_manager.cache.set(key, {"status": "optimal"})
        cache_manager.register_key(scenario.digest, key)
        scenario.delete()
        self.assertIsNone(cache_manager.cache.get(key))


class ScenarioApiTestCase(APITestCase):
    def test_create_scenario(self):
        response = self.client.post(
            "/api/v1/scenarios/",
            {"name": "minimal", "document": minimal_document()},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["digest"], scenario_digest(minimal_document()))
        self.assertEqual(response.data["flow_count"], 1)

    def test_create_invalid_scenario(self):
        document = minimal_document()
        document["flows"][0]["route"] = ["ue", "gw"]
        response = self.client.post(
            "/api/v1/scenarios/", {"name": "broken", "document": document}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_validate_action(self):
        scenario = Scenario.objects.create(name="desk", document=desk_document())
        response = self.client.get(f"/api/v1/scenarios/{scenario.id}/validate/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data["valid"])
        self.assertEqual(response.data["flow_count"], 8)
        self.assertEqual(response.data["hyper_period_ns"], 2_000_000)

    def test_list_and_search(self):
        Scenario.objects.create(name="desk", document=desk_document())
        Scenario.objects.create(name="example", document=example_document())
        response = self.client.get("/api/v1/scenarios/", {"search": "exam"})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["count"], 1)
