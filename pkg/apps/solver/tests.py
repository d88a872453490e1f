import itertools
from fractions import Fraction

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from apps.network.loader import load_scenario
from apps.network.types import ModelKind
from apps.scheduling.builder import (
    build_model,
    candidate_options,
    var_b,
    var_c,
    var_d,
    var_offset,
    var_x,
    var_y,
    var_z,
)
from apps.scheduling.decoding import decode_schedule, derive_selectors
from apps.scheduling.exceptions import InfeasibleScenarioError
from apps.scheduling.ilp import IlpModel, Sense

from .bnb import SolveLimits, SolveStatus, solve
from .lp_format import export_lp, sanitize
from .schedule_check import check_schedule
from .verification import verify

# Taxa em que um quadro de 1 byte ocupa exatamente 1 ns
UNIT_RATE_BPS = 8_000_000_000


def tiny_document(seed: int) -> tuple[dict, ModelKind]:
    """
    Instância pequena e determinística: até 2 fluxos, até 2 saltos escalonados,
    kMax ≤ 2 e no máximo 2 períodos candidatos por fluxo.
    """
    rng = np.random.default_rng(seed)
    link = {"rate_bps": UNIT_RATE_BPS, "prop_delay_ns": 0}
    network = {
        "nodes": [
            {"id": "gw", "role": "gateway"},
            {"id": "bs", "role": "base_station"},
            {"id": "s1", "role": "tsn_switch"},
            {"id": "s2", "role": "tsn_switch"},
            {"id": "e1", "role": "end_station"},
            {"id": "e2", "role": "end_station"},
            {"id": "u1", "role": "user_equipment"},
            {"id": "u2", "role": "user_equipment"},
        ],
        "links": [
            {"a": "gw", "b": "s1", **link},
            {"a": "s1", "b": "s2", **link},
            {"a": "s1", "b": "e1", **link},
            {"a": "s2", "b": "e2", **link},
        ],
    }
    min_p = int(rng.choice([1, 2]))
    periods = [2, 3] if min_p == 1 else [2, 3, 4]
    proc_ttis = int(rng.integers(0, 2))
    flow_count = 1 if seed % 4 == 0 else 2

    flows = []
    for index in range(1, flow_count + 1):
        long_route = bool(rng.integers(0, 2))
        route = ["u%d" % index, "gw", "s1", "s2", "e2"] if long_route else ["u%d" % index, "gw", "s1", "e1"]
        period = int(rng.choice(periods))
        length = int(rng.integers(1, 3))
        hops = len(route) - 2
        floor = 1 + proc_ttis + hops * length + min(min_p, period)
        flows.append(
            {
                "id": f"f{index}",
                "period_ns": period,
                "length_bytes": length,
                "deadline_ns": floor + int(rng.integers(0, 4)),
                "route": route,
            }
        )

    kind = ModelKind.ATSM if seed % 3 else ModelKind.STSM
    document = {
        "name": f"tiny-{seed}",
        "network": network,
        "radio": {
            "tti_ns": 1,
            "k_max": int(rng.integers(1, 3)),
            "t_proc_ttis": proc_ttis,
            "rb_bytes": int(rng.integers(1, 3)),
        },
        "flows": flows,
        "scheduler": {
            "gamma": str(rng.choice(["0", "0.5", "1"])),
            "min_p_ns": min_p,
            "tam_budget_ns": 0,
        },
    }
    return document, kind


def local_assignments(model, scenario, flow):
    """Enumera as atribuições das variáveis de um fluxo que respeitam as restrições locais"""
    k_max = scenario.radio.k_max
    local_names = {var_c(flow), var_d(flow)}
    local_names.update(var_x(flow, k) for k in range(1, k_max + 1))
    local_names.update(var_z(flow, k) for k in range(1, k_max + 1))
    local_names.update(var_offset(flow, link) for link in flow.scheduled_links)
    options = candidate_options(model, flow)
    local_names.update(selector for _, _, selector in options if selector)
    local_constraints = [
        constraint
        for constraint in model.constraints
        if all(name in local_names for name, _ in constraint.terms)
    ]

    c_var = model.variable(var_c(flow))
    d_var = model.variable(var_d(flow))
    offset_vars = [model.variable(var_offset(flow, link)) for link in flow.scheduled_links]
    offset_ranges = [range(var.lower, var.upper + 1) for var in offset_vars]

    result = []
    for j, _, selector in options:
        for c in range(c_var.lower, c_var.upper + 1):
            for d in range(d_var.lower, d_var.upper + 1):
                for rbs in itertools.product((0, 1), repeat=k_max):
                    for offsets in itertools.product(*offset_ranges):
                        values = {var_c(flow): c, var_d(flow): d}
                        for other, _, other_selector in options:
                            if other_selector:
                                values[other_selector] = int(other == j)
                        for k, x in enumerate(rbs, start=1):
                            values[var_x(flow, k)] = x
                            values[var_z(flow, k)] = x * d
                        for var, offset in zip(offset_vars, offsets):
                            values[var.name] = offset
                        if all(constraint.residual(values) == 0 for constraint in local_constraints):
                            result.append(values)
    return result


def brute_force(model, scenario):
    """Oráculo exaustivo: retorna o menor objetivo viável ou None"""
    per_flow = [local_assignments(model, scenario, flow) for flow in scenario.flows]
    candidates = []
    for combination in itertools.product(*per_flow):
        assignment = {}
        for values in combination:
            assignment.update(values)
        for k in range(1, scenario.radio.k_max + 1):
            assignment[var_y(k)] = int(
                any(assignment[var_x(flow, k)] for flow in scenario.flows)
            )
        candidates.append((model.objective_value(assignment), assignment))

    candidates.sort(key=lambda item: item[0])
    for value, assignment in candidates:
        derive_selectors(model, assignment)
        if verify(model, assignment).is_feasible:
            return value
    return None


class EmptyModelTestCase(SimpleTestCase):
    """
    Testes do solver com modelos degenerados
    """

    def test_empty_model_is_optimal_with_zero_objective(self):
        """
        Testa que o modelo vazio é ótimo com objetivo 0
        """
        solution = solve(IlpModel())

        self.assertEqual(solution.status, SolveStatus.OPTIMAL)
        self.assertEqual(solution.objective, 0)
        self.assertEqual(solution.assignment, {})

    def test_contradictory_bounds_are_infeasible(self):
        """
        Testa que uma restrição impossível é reportada com a sua família
        """
        model = IlpModel()
        x = model.add_binary("x")
        y = model.add_binary("y")
        model.add_constraint("rb:0", x + y, Sense.GE, 3)

        solution = solve(model)

        self.assertEqual(solution.status, SolveStatus.INFEASIBLE)
        self.assertEqual(solution.infeasible_family, "rb")


class SmallModelTestCase(SimpleTestCase):
    """
    Testes do solver em modelos montados à mão
    """

    def test_minimizes_linear_objective(self):
        """
        Testa a minimização com pesos racionais
        """
        model = IlpModel()
        a = model.add_integer("a", 0, 10)
        b = model.add_integer("b", 0, 10)
        model.add_constraint("sum:0", a + b, Sense.GE, 7)
        model.add_constraint("gap:0", a - b, Sense.LE, 1)
        model.set_objective({"a": Fraction(1, 3), "b": Fraction(1, 2)})

        solution = solve(model)

        self.assertEqual(solution.status, SolveStatus.OPTIMAL)
        self.assertEqual(solution.assignment, {"a": 4, "b": 3})
        self.assertEqual(solution.objective, Fraction(4, 3) + Fraction(3, 2))

    def test_equality_constraint(self):
        """
        Testa que restrições de igualdade são respeitadas exatamente
        """
        model = IlpModel()
        terms = [model.add_binary(f"b{j}", role="b") for j in range(3)]
        model.add_constraint("window:f:select", terms[0] + terms[1] + terms[2], Sense.EQ, 1)
        model.set_objective({"b0": Fraction(-1), "b1": Fraction(-3), "b2": Fraction(-2)})

        solution = solve(model)

        self.assertEqual(solution.assignment, {"b0": 0, "b1": 1, "b2": 0})
        self.assertEqual(solution.objective, -3)

    def test_node_limit_returns_timed_out(self):
        """
        Testa que o limite de nós interrompe a busca com status TimedOut
        """
        model = IlpModel()
        for index in range(12):
            model.add_binary(f"x{index}")
        model.set_objective({f"x{index}": Fraction(1) for index in range(12)}, Fraction(0))

        solution = solve(model, SolveLimits(max_nodes=3, max_wall_time=60))

        self.assertEqual(solution.status, SolveStatus.TIMED_OUT)
        self.assertEqual(solution.nodes, 3)

    def test_limits_without_wall_time(self):
        """
        Testa que sem limite de tempo apenas o número de nós encerra a busca
        """
        limits = SolveLimits(max_nodes=10, max_wall_time=0.5).without_wall_time()

        self.assertIsNone(limits.max_wall_time)
        self.assertFalse(limits.exhausted(9, 3_600.0))
        self.assertTrue(limits.exhausted(10, 0.0))
        self.assertTrue(SolveLimits(max_nodes=10, max_wall_time=0.5).exhausted(1, 0.6))

    def test_solve_is_deterministic(self):
        """
        Testa que duas execuções produzem a mesma atribuição
        """
        document, kind = tiny_document(7)
        scenario = load_scenario(document)
        first = solve(build_model(scenario, kind))
        second = solve(build_model(scenario, kind))

        self.assertEqual(first.status, second.status)
        self.assertEqual(first.assignment, second.assignment)
        self.assertEqual(first.objective, second.objective)


class OracleCorpusTestCase(SimpleTestCase):
    """
    Compara o branch-and-bound com a enumeração exaustiva em instâncias pequenas
    """

    CORPUS_SIZE = 54

    def test_solver_matches_exhaustive_enumeration(self):
        """
        Testa status e objetivo em todo o corpus de instâncias pequenas
        """
        compared = 0
        for seed in range(self.CORPUS_SIZE):
            document, kind = tiny_document(seed)
            scenario = load_scenario(document)
            with self.subTest(seed=seed, kind=kind):
                try:
                    model = build_model(scenario, kind)
                except InfeasibleScenarioError:
                    continue
                expected = brute_force(model, scenario)
                solution = solve(model)
                if expected is None:
                    self.assertEqual(solution.status, SolveStatus.INFEASIBLE)
                else:
                    self.assertEqual(solution.status, SolveStatus.OPTIMAL)
                    self.assertEqual(solution.objective, expected)
                    self.assertTrue(verify(model, solution.assignment).is_feasible)
                compared += 1
        self.assertGreaterEqual(compared, 50)

    def test_decoded_solutions_pass_schedule_checker(self):
        """
        Testa que toda solução ótima decodificada passa no verificador independente
        """
        for seed in range(0, self.CORPUS_SIZE, 3):
            document, kind = tiny_document(seed)
            scenario = load_scenario(document)
            with self.subTest(seed=seed):
                try:
                    model = build_model(scenario, kind)
                except InfeasibleScenarioError:
                    continue
                solution = solve(model)
                if solution.status != SolveStatus.OPTIMAL:
                    continue
                schedule = decode_schedule(scenario, model, solution.assignment)
                self.assertEqual(check_schedule(scenario, schedule), [])


class VerifyTestCase(SimpleTestCase):
    """
    Testes da verificação de atribuições
    """

    def setUp(self):
        self.model = IlpModel()
        b0 = self.model.add_binary("b_f_0", role="b")
        b1 = self.model.add_binary("b_f_1", role="b")
        self.model.add_constraint("window:f:select", b0 + b1, Sense.EQ, 1)

    def test_feasible_assignment_has_empty_report(self):
        """
        Testa que uma atribuição viável não gera violações
        """
        report = verify(self.model, {"b_f_0": 1, "b_f_1": 0})

        self.assertTrue(report.is_feasible)
        self.assertEqual(len(report), 0)

    def test_all_zeros_flags_exactly_one_constraint(self):
        """
        Testa que zerar os binários de seleção viola somente a restrição de seleção
        """
        report = verify(self.model, {"b_f_0": 0, "b_f_1": 0})

        self.assertEqual(len(report), 1)
        self.assertEqual(report.violations[0].tag, "window:f:select")
        self.assertEqual(report.violations[0].family, "window")
        self.assertEqual(report.violations[0].residual, 1)

    def test_missing_variable_raises(self):
        """
        Testa que uma variável sem valor gera erro
        """
        with self.assertRaises(ValidationError):
            verify(self.model, {"b_f_0": 1})

    def test_out_of_bounds_value_is_flagged(self):
        """
        Testa que valores fora do domínio aparecem na família bounds
        """
        report = verify(self.model, {"b_f_0": 2, "b_f_1": 0})

        self.assertIn("bounds", report.families())


class LpExportTestCase(SimpleTestCase):
    """
    Testes da exportação em formato LP
    """

    def test_empty_model_skeleton(self):
        """
        Testa o esqueleto do modelo vazio
        """
        text = export_lp(IlpModel())

        self.assertIn("Minimize\n obj: 0\n", text)
        self.assertTrue(text.endswith("End\n"))

    def test_canonical_constraint_line(self):
        """
        Testa a linha canônica de uma restrição simples
        """
        model = IlpModel()
        x = model.add_binary("x")
        y = model.add_binary("y")
        model.add_constraint("rb:0", x + y, Sense.LE, 1)

        text = export_lp(model)

        self.assertIn("\n c_rb_0: x + y <= 1\n", text)
        self.assertIn("Binaries\n x y\n", text)

    def test_rational_objective_uses_twelve_significant_digits(self):
        """
        Testa a escrita decimal dos pesos racionais do objetivo
        """
        model = IlpModel()
        model.add_binary("y_1")
        model.add_integer("o_f_gw_s1", 0, 5)
        model.set_objective({"y_1": Fraction(1, 3), "o_f_gw_s1": Fraction(-1, 2)})

        text = export_lp(model)

        self.assertIn(" obj: 0.333333333333 y_1 - 0.5 o_f_gw_s1\n", text)
        self.assertIn(" 0 <= o_f_gw_s1 <= 5\n", text)
        self.assertIn("Generals\n o_f_gw_s1\n", text)

    def test_sanitize_names(self):
        """
        Testa a restrição de caracteres e de comprimento dos nomes
        """
        self.assertEqual(sanitize("tdma:f1:f2:gw>s1:0:1:0:0"), "tdma_f1_f2_gw_s1_0_1_0_0")
        self.assertLessEqual(len(sanitize("a" * 400)), 255)
        self.assertNotEqual(sanitize("a" * 400 + "x"), sanitize("a" * 400 + "y"))

    def test_export_is_byte_deterministic(self):
        """
        Testa que a exportação do mesmo cenário é idêntica entre montagens
        """
        document, kind = tiny_document(5)
        scenario = load_scenario(document)

        self.assertEqual(
            export_lp(build_model(scenario, kind)), export_lp(build_model(scenario, kind))
        )
