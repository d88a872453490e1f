import itertools
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from django.conf import settings
from django.core.cache import cache
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from rest_framework import status
from rest_framework.test import APITestCase

from apps.experiment.corpus import desk_document, example_document, flowcount_document
from apps.network.loader import load_scenario, read_document
from apps.network.models import Scenario
from apps.network.types import ModelKind
from apps.solver.bnb import SolveStatus
from apps.solver.schedule_check import check_schedule

from .builder import (
    build_atsm,
    build_model,
    build_period_candidates,
    build_stsm,
    var_c,
    var_d,
    var_offset,
    var_x,
    var_z,
)
from .exceptions import InfeasibleScenarioError
from .models import ScheduleRun
from .serializers import schedule_from_document, schedule_to_document
from .utils import schedule_scenario, solve_scenario, verify_schedule

MS = 1_000_000


def tight_document(deadline_ns: int = 30 * MS) -> dict:
    """Exemplo de referência com deadline abaixo do atraso mínimo da cadeia"""
    document = example_document()
    document["flows"][0]["deadline_ns"] = deadline_ns
    return document


def unit_document(
    flows: list[dict],
    k_max: int = 1,
    rb_bytes: int = 1,
    min_p_ns: int = 1,
    rate_bps: int = 8_000_000_000,
) -> dict:
    """
    Rede mínima em tempo unitário: TTI de 1 ns, sem processamento nem
    propagação; com a taxa padrão um quadro de 1 B ocupa 1 ns.
    """
    nodes = [
        {"id": "gw", "role": "gateway"},
        {"id": "bs", "role": "base_station"},
        {"id": "s1", "role": "tsn_switch"},
        {"id": "s2", "role": "tsn_switch"},
        {"id": "e1", "role": "end_station"},
        {"id": "e2", "role": "end_station"},
    ]
    nodes += [{"id": f"u{index}", "role": "user_equipment"} for index in range(1, len(flows) + 1)]
    link = {"rate_bps": rate_bps, "prop_delay_ns": 0}
    return {
        "name": "unit",
        "network": {
            "nodes": nodes,
            "links": [
                {"a": "gw", "b": "s1", **link},
                {"a": "s1", "b": "s2", **link},
                {"a": "s1", "b": "e1", **link},
                {"a": "s2", "b": "e2", **link},
            ],
        },
        "radio": {"tti_ns": 1, "k_max": k_max, "t_proc_ttis": 0, "rb_bytes": rb_bytes},
        "flows": flows,
        "scheduler": {"gamma": "0.5", "min_p_ns": min_p_ns, "tam_budget_ns": 0},
    }


def unit_flow(index: int, period: int, length: int, deadline: int, long_route: bool = False) -> dict:
    tail = ["s1", "s2", "e2"] if long_route else ["s1", "e1"]
    return {
        "id": f"f{index}",
        "period_ns": period,
        "length_bytes": length,
        "deadline_ns": deadline,
        "route": [f"u{index}", "gw", *tail],
    }


def family_holds(model, family: str, values: dict) -> bool:
    """Verdadeiro se cada disjunção da família aceita algum valor do seu seletor"""
    by_selector: dict[str, list] = {}
    for constraint in model.constraints_of(family):
        selector = next(
            (name for name, _ in constraint.terms if model.variable(name).role == "s"), None
        )
        by_selector.setdefault(selector, []).append(constraint)

    for selector, constraints in by_selector.items():
        choices = (0, 1) if selector else (None,)
        if not any(
            all(constraint.residual({**values, selector: choice}) == 0 for constraint in constraints)
            for choice in choices
        ):
            return False
    return True


def desk_path() -> Path:
    return Path(settings.BASE_DIR) / "scenarios" / "desk.json"


def desk_slice(count: int) -> dict:
    document = desk_document()
    document["flows"] = document["flows"][:count]
    return document


class BuilderTestCase(SimpleTestCase):
    def setUp(self):
        self.scenario = load_scenario(example_document())

    def test_period_candidates(self):
        candidates = build_period_candidates(self.scenario.flows[0], 25 * MS)
        self.assertEqual(candidates.periods, (25 * MS, 50 * MS, 100 * MS))
        self.assertEqual(candidates.size, 3)

    def test_atsm_declares_period_selection(self):
        model = build_atsm(self.scenario)
        self.assertEqual(len(model.variables_with_role("b")), 3)
        self.assertTrue({"window", "e2e", "rb"} <= model.families())

    def test_stsm_has_no_period_selection(self):
        model = build_stsm(self.scenario)
        self.assertEqual(model.variables_with_role("b"), [])
        self.assertEqual(model.candidates, {})
        self.assertIn("e2e", model.families())

    def test_min_p_above_period(self):
        document = example_document()
        document["scheduler"]["min_p_ns"] = 200 * MS
        with self.assertRaises(InfeasibleScenarioError) as context:
            build_atsm(load_scenario(document))
        self.assertEqual(context.exception.family, "window")
        self.assertEqual(context.exception.flow_id, "f1")

    def test_deadline_below_chain_delay(self):
        scenario = load_scenario(tight_document())
        for kind in (ModelKind.ATSM, ModelKind.STSM):
            with self.assertRaises(InfeasibleScenarioError) as context:
                build_model(scenario, kind)
            self.assertEqual(context.exception.family, "e2e")


class SolveScenarioTestCase(SimpleTestCase):
    def setUp(self):
        cache.clear()
        self.scenario = load_scenario(example_document())

    def test_atsm_reference_schedule(self):
        """Deadline de 70 ms força T = 25 ms e atraso planejado de 70 ms"""
        outcome = solve_scenario(self.scenario, ModelKind.ATSM)
        self.assertTrue(outcome.is_optimal)
        entry = outcome.schedule.flow("f1")
        self.assertEqual(entry.hold_period_ns, 25 * MS)
        self.assertEqual(entry.instances[0].period_ns, 25 * MS)
        self.assertEqual(entry.instances[0].span_ns, 10 * MS)
        self.assertEqual(entry.scheduled_e2e_delay_ns, 70 * MS)
        self.assertEqual(outcome.schedule.scenario_digest, self.scenario.digest)

    def test_infeasible_outcome(self):
        outcome = solve_scenario(load_scenario(tight_document()), ModelKind.STSM)
        self.assertEqual(outcome.status, SolveStatus.INFEASIBLE)
        self.assertEqual(outcome.infeasible_family, "e2e")
        self.assertIsNone(outcome.schedule)

    def test_cached_outcome(self):
        first = schedule_scenario(self.scenario, ModelKind.ATSM)
        second = schedule_scenario(self.scenario, ModelKind.ATSM)
        self.assertFalse(first.cached)
        self.assertTrue(second.cached)
        self.assertEqual(second.schedule, first.schedule)

        fresh = schedule_scenario(self.scenario, ModelKind.ATSM, use_cache=False)
        self.assertFalse(fresh.cached)

    def test_gamma_is_part_of_cache_key(self):
        schedule_scenario(self.scenario, ModelKind.ATSM)
        other = schedule_scenario(self.scenario, ModelKind.ATSM, Fraction(1, 4))
        self.assertFalse(other.cached)
        self.assertEqual(other.schedule.gamma, Fraction(1, 4))


class ScheduleDocumentTestCase(SimpleTestCase):
    def setUp(self):
        cache.clear()
        self.scenario = load_scenario(example_document())
        self.schedule = solve_scenario(self.scenario, ModelKind.ATSM).schedule

    def test_document_restores_schedule(self):
        document = schedule_to_document(self.schedule)
        self.assertEqual(document["model"], "atsm")
        self.assertEqual(document["gamma"], "1/2")
        self.assertEqual(document["flows"][0]["instances"][0]["link"], "gw>edge")
        self.assertEqual(schedule_from_document(document, self.scenario), self.schedule)

    def test_digest_mismatch(self):
        other = load_scenario(example_document(skew_offset_ns=MS))
        with self.assertRaises(ValidationError):
            schedule_from_document(schedule_to_document(self.schedule), other)

    def test_unknown_link(self):
        document = schedule_to_document(self.schedule)
        document["flows"][0]["instances"][0]["link"] = "gw>es1"
        with self.assertRaises(ValidationError):
            schedule_from_document(document, self.scenario)


class VerifyScheduleTestCase(SimpleTestCase):
    def setUp(self):
        cache.clear()
        self.scenario = load_scenario(example_document())
        self.schedule = solve_scenario(self.scenario, ModelKind.ATSM).schedule

    def test_solved_schedule_passes(self):
        result = verify_schedule(self.scenario, self.schedule)
        self.assertTrue(result.valid, result.violations)
        self.assertTrue(all(result.families.values()))

    def test_shrunk_window_fails(self):
        """Janela de 30 ms não pertence aos candidatos minP·2^j"""
        entry = self.schedule.flow("f1")
        instance = replace(entry.instances[0], period_ns=30 * MS)
        broken = replace(
            self.schedule,
            flows=(replace(entry, instances=(instance,), hold_period_ns=30 * MS),),
            assignment={},
        )
        result = verify_schedule(self.scenario, broken)
        self.assertFalse(result.valid)
        self.assertFalse(result.families["window"])

    def test_other_scenario(self):
        with self.assertRaises(ValidationError):
            verify_schedule(load_scenario(tight_document(60 * MS)), self.schedule)


class FamilyExamplesTestCase(SimpleTestCase):
    """Famílias de restrições avaliadas em instâncias de tempo unitário"""

    def test_ofdma_two_orderings(self):
        """Dois fluxos num único RB com 2 TTIs e d = 1: só as duas ordens são aceitas"""
        scenario = load_scenario(unit_document([unit_flow(1, 2, 1, 4), unit_flow(2, 2, 1, 4)]))
        model = build_stsm(scenario)
        first, second = scenario.flows

        accepted = set()
        for c_first, c_second in itertools.product(range(2), repeat=2):
            values = {
                var_c(first): c_first,
                var_c(second): c_second,
                var_d(first): 1,
                var_d(second): 1,
                var_x(first, 1): 1,
                var_x(second, 1): 1,
            }
            if family_holds(model, "ofdma", values):
                accepted.add((c_first, c_second))
        self.assertEqual(accepted, {(0, 1), (1, 0)})

    def test_ofdma_released_by_other_rb(self):
        scenario = load_scenario(unit_document([unit_flow(1, 2, 1, 4), unit_flow(2, 2, 1, 4)]))
        model = build_stsm(scenario)
        first, second = scenario.flows
        values = {
            var_c(first): 0,
            var_c(second): 0,
            var_d(first): 1,
            var_d(second): 1,
            var_x(first, 1): 1,
            var_x(second, 1): 0,
        }
        self.assertTrue(family_holds(model, "ofdma", values))

    def resource_pairs(self, length: int) -> set[tuple[int, int]]:
        """Pares (quantidade de RBs, d) aceitos para um fluxo com 96 B por RB e TTI"""
        document = unit_document(
            [unit_flow(1, 4, length, 100)], k_max=2, rb_bytes=96, rate_bps=1_024_000_000_000
        )
        scenario = load_scenario(document)
        model = build_stsm(scenario)
        flow = scenario.flows[0]

        accepted = set()
        for rb_count in (1, 2):
            for d in range(1, 5):
                values = {var_d(flow): d}
                for k in (1, 2):
                    x = int(k <= rb_count)
                    values[var_x(flow, k)] = x
                    values[var_z(flow, k)] = x * d
                if all(c.residual(values) == 0 for c in model.constraints_of("resource")):
                    accepted.add((rb_count, d))
        return accepted

    def test_resource_pairs(self):
        """128 B: um RB exige d = 2 e dois RBs permitem d = 1; 96 B cabe com d = 1"""
        self.assertEqual(self.resource_pairs(128), {(1, 2), (2, 1)})
        self.assertEqual(self.resource_pairs(96), {(1, 1), (2, 1)})

    def test_tdma_two_and_three_repeats(self):
        """Períodos 6 e 4 no mesmo enlace: 2 e 3 janelas por hiperperíodo de 12 ns"""
        scenario = load_scenario(unit_document([unit_flow(1, 6, 1, 6), unit_flow(2, 4, 1, 4)]))
        model = build_stsm(scenario)
        first, second = scenario.flows
        link = first.scheduled_links[0]

        for o_first in range(6):
            for o_second in range(4):
                windows_first = {o_first, o_first + 6}
                windows_second = {o_second, o_second + 4, o_second + 8}
                values = {
                    var_offset(first, link): o_first,
                    var_offset(second, link): o_second,
                }
                with self.subTest(o_first=o_first, o_second=o_second):
                    self.assertEqual(
                        family_holds(model, "tdma", values),
                        windows_first.isdisjoint(windows_second),
                    )

    def test_isolation_from_same_input_link(self):
        """Fluxos vindos do mesmo enlace de entrada ainda recebem a restrição de isolamento"""
        flows = [unit_flow(1, 8, 1, 8, long_route=True), unit_flow(2, 8, 1, 8, long_route=True)]
        scenario = load_scenario(unit_document(flows))
        model = build_stsm(scenario)
        first, second = scenario.flows
        ingress, shared = first.scheduled_links
        self.assertEqual(second.scheduled_links, (ingress, shared))

        constraints = model.constraints_of("isolation")
        self.assertEqual(len(constraints), 2)
        self.assertTrue(all(f":{shared}:" in c.tag for c in constraints))
        selector = next(
            name for name, _ in constraints[0].terms if model.variable(name).role == "s"
        )

        def offsets(first_in, first_out, second_in, second_out):
            return {
                var_offset(first, ingress): first_in,
                var_offset(first, shared): first_out,
                var_offset(second, ingress): second_in,
                var_offset(second, shared): second_out,
            }

        # f1 sai antes de f2 chegar: seletor em 1
        first_ahead = {**offsets(0, 1, 1, 2), selector: 1}
        self.assertTrue(all(c.residual(first_ahead) == 0 for c in constraints))
        # f2 sai antes de f1 chegar: seletor em 0
        second_ahead = {**offsets(1, 2, 0, 1), selector: 0}
        self.assertTrue(all(c.residual(second_ahead) == 0 for c in constraints))
        # f2 chega enquanto o quadro de f1 ainda espera na fila
        self.assertFalse(family_holds(model, "isolation", offsets(0, 2, 1, 3)))


class DeskScheduleTestCase(SimpleTestCase):
    """Cenário de bancada distribuído em scenarios/ com os limites padrão do solver"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.scenario = load_scenario(read_document(desk_path()))
        cls.outcomes = {
            kind: solve_scenario(cls.scenario, kind) for kind in (ModelKind.ATSM, ModelKind.STSM)
        }

    def test_both_models_optimal(self):
        for kind, outcome in self.outcomes.items():
            with self.subTest(kind=kind):
                self.assertEqual(outcome.status, SolveStatus.OPTIMAL, outcome.message)
                self.assertEqual(outcome.schedule.rbs_used, (1,))

    def test_schedules_pass_verification(self):
        for kind, outcome in self.outcomes.items():
            with self.subTest(kind=kind):
                result = verify_schedule(self.scenario, outcome.schedule)
                self.assertTrue(result.valid, result.violations)
                self.assertEqual(check_schedule(self.scenario, outcome.schedule), [])

    def test_atsm_opportunity_periods(self):
        """Maior T de cada tipo que ainda cabe no deadline"""
        schedule = self.outcomes[ModelKind.ATSM].schedule
        periods = {entry.flow_id: entry.hold_period_ns for entry in schedule.flows}
        self.assertEqual(
            periods,
            {
                "fI1": 200_000,
                "fI2": 200_000,
                "fII1": 800_000,
                "fII2": 800_000,
                "fIII1": 1_600_000,
                "fIII2": 1_600_000,
                "fIII3": 1_600_000,
                "fIII4": 1_600_000,
            },
        )

    def test_four_flow_slice(self):
        scenario = load_scenario(desk_slice(4))
        for kind in (ModelKind.ATSM, ModelKind.STSM):
            with self.subTest(kind=kind):
                outcome = solve_scenario(scenario, kind)
                self.assertEqual(outcome.status, SolveStatus.OPTIMAL, outcome.message)
                self.assertTrue(verify_schedule(scenario, outcome.schedule).valid)

    def test_flowcount_five(self):
        scenario = load_scenario(flowcount_document(5))
        for kind in (ModelKind.ATSM, ModelKind.STSM):
            with self.subTest(kind=kind):
                self.assertEqual(solve_scenario(scenario, kind).status, SolveStatus.OPTIMAL)


class ObjectiveBehaviourTestCase(SimpleTestCase):
    def test_adding_a_flow_never_decreases_rb_count(self):
        """Fluxos de 4 B com 1 B por RB e período de 8 TTIs: dois fluxos por RB, 1 ns por quadro no cabo"""
        counts = []
        for count in range(1, 6):
            flows = [unit_flow(index, 8, 4, 20) for index in range(1, count + 1)]
            document = unit_document(flows, k_max=3, min_p_ns=8, rate_bps=32_000_000_000)
            outcome = solve_scenario(load_scenario(document), ModelKind.ATSM)
            self.assertEqual(outcome.status, SolveStatus.OPTIMAL, outcome.message)
            counts.append(len(outcome.schedule.rbs_used))
        self.assertEqual(counts, [1, 1, 2, 2, 3])
        self.assertEqual(counts, sorted(counts))

    def test_gamma_endpoints(self):
        """γ = 1 usa o menor número de RBs e γ = 0 o maior ΣT/período entre todos os γ"""
        scenario = load_scenario(desk_slice(4))
        periods = {flow.id: flow.period_ns for flow in scenario.flows}
        rb_counts, period_sums = {}, {}
        for step in range(6):
            gamma = Fraction(step, 5)
            outcome = solve_scenario(scenario, ModelKind.ATSM, gamma)
            self.assertEqual(outcome.status, SolveStatus.OPTIMAL, outcome.message)
            rb_counts[gamma] = len(outcome.schedule.rbs_used)
            period_sums[gamma] = sum(
                Fraction(entry.hold_period_ns, periods[entry.flow_id])
                for entry in outcome.schedule.flows
            )
        self.assertEqual(rb_counts[Fraction(1)], min(rb_counts.values()))
        self.assertEqual(period_sums[Fraction(0)], max(period_sums.values()))


class ScheduleApiTestCase(APITestCase):
    def setUp(self):
        cache.clear()
        self.scenario = Scenario.objects.create(name="example", document=example_document())

    def test_solve_creates_run(self):
        response = self.client.post(
            "/api/v1/schedules/solve/",
            {"scenario": str(self.scenario.id), "model": "atsm"},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["status"], "optimal")
        self.assertEqual(response.data["scenario_name"], "example")
        self.assertEqual(response.data["document"]["flows"][0]["hold_period_ns"], 25 * MS)
        self.assertEqual(ScheduleRun.objects.count(), 1)

    def test_solve_infeasible_returns_conflict(self):
        tight = Scenario.objects.create(name="tight", document=tight_document())
        response = self.client.post(
            "/api/v1/schedules/solve/",
            {"scenario": str(tight.id), "model": "stsm"},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_409_CONFLICT)
        self.assertEqual(response.data["infeasible_family"], "e2e")
        self.assertIsNone(response.data["document"])

    def test_solve_unknown_scenario(self):
        response = self.client.post(
            "/api/v1/schedules/solve/",
            {"scenario": "00000000-0000-0000-0000-000000000000"},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_verify_action(self):
        solved = self.client.post(
            "/api/v1/schedules/solve/", {"scenario": str(self.scenario.id)}, format="json"
        )
        response = self.client.get(f"/api/v1/schedules/{solved.data['id']}/verify/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data["valid"])
        self.assertEqual(response.data["violations"], [])

    def test_verify_without_schedule(self):
        run = ScheduleRun.objects.create(
            scenario=self.scenario,
            model_kind="stsm",
            gamma="0.5",
            status="infeasible",
        )
        response = self.client.get(f"/api/v1/schedules/{run.id}/verify/")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
