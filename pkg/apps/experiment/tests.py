import csv
import json
import shutil
import tempfile
from decimal import Decimal
from io import StringIO
from pathlib import Path
from unittest import mock

import environ
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from apps.network.loader import load_scenario
from apps.network.models import Scenario
from apps.network.types import ModelKind, NodeRole
from apps.scheduling.utils import schedule_scenario
from apps.solver.bnb import SolveLimits

from .corpus import desk_document, example_document, flowcount_document
from .sweeps import DEFAULT_POINTS, SweepKind, SweepSpec, run_sweep, summary_row

MS = 1_000_000


class CommandTestCase(SimpleTestCase):
    """Base com diretório temporário e o cenário de referência em disco"""

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())
        self.scenario_path = self.write_json("example.json", example_document())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write_json(self, name, document):
        path = self.tmp / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    def call(self, *args, **kwargs):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err, **kwargs)
        return out.getvalue()

    def solve(self, model="atsm"):
        path = str(self.tmp / f"{model}.json")
        self.call("schedule", self.scenario_path, model=model, out=path)
        return path


class CorpusTestCase(SimpleTestCase):
    def test_desk_document(self):
        scenario = load_scenario(desk_document())
        self.assertEqual(len(scenario.flows), 8)
        self.assertEqual(len(scenario.network.nodes_with_role(NodeRole.TSN_SWITCH)), 4)
        self.assertEqual(scenario.radio.k_max, 6)
        for flow in scenario.flows:
            self.assertEqual(flow.deadline_ns, flow.period_ns)
            self.assertGreaterEqual(len(flow.scheduled_links), 1)

    def test_flowcount_document(self):
        scenario = load_scenario(flowcount_document(5))
        self.assertEqual(len(scenario.flows), 5)
        self.assertEqual({flow.length_bytes for flow in scenario.flows}, {200})
        self.assertEqual({flow.period_ns for flow in scenario.flows}, {MS})

    def test_example_document(self):
        scenario = load_scenario(example_document(skew_offset_ns=-10 * MS))
        self.assertEqual(scenario.sim.skew_offset_ns, -10 * MS)
        self.assertEqual(scenario.sim.skew_ns, 20 * MS)
        self.assertEqual(scenario.radio.proc_delay_ns, 10 * MS)


class ScheduleCommandTestCase(CommandTestCase):
    def test_schedule_file(self):
        path = self.solve()
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        self.assertEqual(document["model"], "atsm")
        self.assertEqual(document["status"], "optimal")
        self.assertEqual(document["flows"][0]["scheduled_e2e_delay_ns"], 70 * MS)

    def test_gamma_out_of_range(self):
        with self.assertRaises(CommandError) as context:
            self.call("schedule", self.scenario_path, gamma="1.2")
        self.assertEqual(context.exception.returncode, 1)
        self.assertIn("--gamma", str(context.exception))

    def test_invalid_scenario(self):
        document = example_document()
        document["flows"][0]["route"] = ["ue1", "edge", "es1"]
        path = self.write_json("broken.json", document)
        with self.assertRaises(CommandError) as context:
            self.call("schedule", path)
        self.assertEqual(context.exception.returncode, 1)

    def test_infeasible_deadline(self):
        """Deadline menor que a cadeia mínima: saída 2"""
        document = example_document()
        document["flows"][0]["deadline_ns"] = 30 * MS
        path = self.write_json("tight.json", document)
        with self.assertRaises(CommandError) as context:
            self.call("schedule", path, no_cache=True)
        self.assertEqual(context.exception.returncode, 2)

    def test_lp_export(self):
        lp_path = self.tmp / "example.lp"
        self.call("schedule", self.scenario_path, out=str(self.tmp / "s.json"), lp=str(lp_path))
        content = lp_path.read_text(encoding="utf-8")
        self.assertTrue(content.startswith("\\ Problem:"))
        self.assertTrue(content.endswith("End\n"))


class PipelineTestCase(CommandTestCase):
    """schedule -> verify -> simulate"""

    def test_solver_output_passes_verify(self):
        for model in ("atsm", "stsm"):
            output = self.call("verify", self.scenario_path, self.solve(model))
            self.assertNotIn("FAIL", output)

    def test_simulation_matches_scheduled_delay(self):
        """Sem jitter e sem desvio, o atraso simulado é o planejado"""
        traces = self.tmp / "traces.csv"
        output = self.call(
            "simulate", self.scenario_path, self.solve(), mode="aam", traces=str(traces)
        )
        header, row = output.strip().splitlines()
        self.assertEqual(row.split(",")[3:5], ["1.000000", "0.000000"])

        with open(traces, encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(len(rows), 10)
        for trace in rows:
            self.assertEqual(int(trace["t_deliver_ns"]) - int(trace["t_gen_ns"]), 70 * MS)

    def test_aam_delay_independent_of_skew(self):
        schedule = self.solve()
        for offset in (-10 * MS, 10 * MS):
            json_path = self.tmp / f"report{offset}.json"
            self.call(
                "simulate", self.scenario_path, schedule, mode="aam",
                skew_offset_ns=offset, json=str(json_path),
            )
            report = json.loads(json_path.read_text(encoding="utf-8"))
            self.assertEqual(report["mce"], 1.0)
            self.assertEqual(report["drops"], 0)

    def test_simulate_digest_mismatch(self):
        schedule = self.solve()
        other = self.write_json("other.json", example_document(skew_offset_ns=MS))
        with self.assertRaises(CommandError) as context:
            self.call("simulate", other, schedule)
        self.assertEqual(context.exception.returncode, 1)

    def test_aam_with_stsm_schedule(self):
        with self.assertRaises(CommandError) as context:
            self.call("simulate", self.scenario_path, self.solve("stsm"), mode="aam")
        self.assertEqual(context.exception.returncode, 1)


class VerifyCommandTestCase(CommandTestCase):
    def edited(self, change):
        document = json.loads(Path(self.solve()).read_text(encoding="utf-8"))
        change(document)
        return self.write_json("edited.json", document)

    def test_window_not_a_candidate(self):
        """T fora da lista de candidatos: família window falha"""

        def change(document):
            for instance in document["flows"][0]["instances"]:
                instance["period_ns"] = 30 * MS
            document["flows"][0]["hold_period_ns"] = 30 * MS

        out = StringIO()
        with self.assertRaises(CommandError) as context:
            call_command("verify", self.scenario_path, self.edited(change), stdout=out)
        self.assertEqual(context.exception.returncode, 1)
        self.assertIn("window: ", out.getvalue())
        self.assertRegex(out.getvalue(), r"window: .*FAIL")

    def test_frame_outside_window(self):
        def change(document):
            document["flows"][0]["instances"][0]["offset_ns"] = 20 * MS

        with self.assertRaises(CommandError):
            self.call("verify", self.scenario_path, self.edited(change))


class SweepSpecTestCase(SimpleTestCase):
    def test_default_points(self):
        self.assertEqual(DEFAULT_POINTS[SweepKind.JITTER], (0, 10_000, 20_000, 30_000, 40_000, 50_000))
        self.assertEqual(DEFAULT_POINTS[SweepKind.SKEW], (20_000, 40_000, 60_000, 80_000, 100_000))
        self.assertEqual(DEFAULT_POINTS[SweepKind.FLOW_COUNT], (5, 10, 15, 20, 25))
        self.assertEqual(
            [str(point) for point in DEFAULT_POINTS[SweepKind.GAMMA]],
            ["0", "0.2", "0.4", "0.6", "0.8", "1"],
        )

    def test_create(self):
        spec = SweepSpec.create("gamma", ["0.25", "0.75"], 3)
        self.assertEqual(spec.points, (Decimal("0.25"), Decimal("0.75")))
        self.assertEqual(spec.seeds_per_point, 3)
        self.assertEqual(spec.base()["name"], "desk")

    def test_invalid_points(self):
        with self.assertRaises(ValidationError):
            SweepSpec.create("gamma", ["1.5"])
        with self.assertRaises(ValidationError):
            SweepSpec.create("flowcount", ["0"])
        with self.assertRaises(ValidationError):
            SweepSpec.create("jitter", ["abc"])

    def test_summary_row(self):
        rows = [
            {"mce": "1.000000", "mcv": "0.000000", "std_ratio": "", "tsn_usage": "0.4", "fiveg_usage": "1.0", "drops": 0},
            {"mce": "3.000000", "mcv": "0.200000", "std_ratio": "", "tsn_usage": "0.4", "fiveg_usage": "1.0", "drops": 2},
        ]
        summary = summary_row(SweepKind.JITTER, 10_000, rows)
        self.assertEqual(summary["seed"], "mean")
        self.assertEqual(summary["mce"], 2.0)
        self.assertEqual(summary["drops"], 1.0)
        self.assertIsNone(summary["std_ratio"])


class SkewSweepTestCase(CommandTestCase):
    def test_skew_sweep(self):
        """AAM mantém o MCE constante ao longo dos pontos de desvio"""
        spec = SweepSpec.create(
            "skew", [str(4 * MS), str(8 * MS), str(16 * MS)], 3, self.scenario_path
        )
        result = run_sweep(spec, self.tmp / "out", threads=2)
        names = sorted(path.name for path in result.files)
        self.assertEqual(names, ["metadata.json", "skew_aam.csv", "skew_tam.csv"])
        self.assertEqual(result.failures, [])

        with open(self.tmp / "out" / "skew_aam.csv", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(len(rows), 3 * (3 + 1))
        self.assertEqual({row["mce"] for row in rows}, {"1.000000"})
        self.assertEqual([row["seed"] for row in rows[:4]], ["1", "2", "3", "mean"])

        metadata = json.loads((self.tmp / "out" / "metadata.json").read_text(encoding="utf-8"))
        self.assertEqual(metadata["seeds_per_point"], 3)
        self.assertEqual(metadata["base_digest"], load_scenario(example_document()).digest)

    def test_skew_sweep_rejects_fixed_offset(self):
        path = self.write_json("fixed.json", example_document(skew_offset_ns=MS))
        with self.assertRaises(CommandError):
            self.call("sweep", "skew", scenario=path, seeds=1, out_dir=str(self.tmp / "x"))


class LoadCorpusTestCase(TestCase):
    def test_load_shipped_scenarios(self):
        call_command("load_corpus", stdout=StringIO())
        self.assertEqual(
            set(Scenario.objects.values_list("name", flat=True)), {"example", "desk"}
        )
        call_command("load_corpus", stdout=StringIO())
        self.assertEqual(Scenario.objects.count(), 2)


class DefaultSettingsTestCase(SimpleTestCase):
    def test_default_cache_url_is_understood(self):
        """A URL padrão do cache resolve para o backend em memória"""
        config = environ.Env.cache_url_config(settings.DEFAULT_CACHE_URL)
        self.assertEqual(config["BACKEND"], "django.core.cache.backends.locmem.LocMemCache")
        self.assertEqual(config["LOCATION"], "converged-sched")


class JitterSweepTestCase(SimpleTestCase):
    """Varredura de jitter no cenário de bancada com duas sementes por ponto"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = Path(tempfile.mkdtemp())
        spec = SweepSpec.create("jitter", ["0", "10000", "20000", "40000"], 2)
        cls.result = run_sweep(spec, cls.tmp, threads=2)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp, ignore_errors=True)
        super().tearDownClass()

    def means(self, mode: str) -> list[float]:
        with open(self.tmp / f"jitter_{mode}.csv", encoding="utf-8") as handle:
            rows = [row for row in csv.DictReader(handle) if row["seed"] == "mean"]
        self.assertEqual([int(row["value"]) for row in rows], [0, 10_000, 20_000, 40_000])
        return [float(row["mce"]) for row in rows]

    def test_no_failures(self):
        self.assertEqual(self.result.failures, [])

    def test_tam_expansion_grows_with_jitter(self):
        """Acima da folga de 5 µs a parcela de pacotes que perde a porta cresce com J"""
        tam = self.means("tam")
        for lower, higher in zip(tam, tam[1:]):
            self.assertLess(lower, higher)

    def test_aam_expansion_bounded_by_jitter(self):
        """AAM só soma o próprio jitter: CE ≤ 1 + J / menor atraso planejado"""
        scenario = load_scenario(desk_document())
        schedule = schedule_scenario(scenario, ModelKind.ATSM).schedule
        shortest = min(entry.scheduled_e2e_delay_ns for entry in schedule.flows)
        for jitter, mce in zip((0, 10_000, 20_000, 40_000), self.means("aam")):
            with self.subTest(jitter=jitter):
                self.assertLessEqual(mce, 1 + jitter / shortest + 1e-9)


class SweepSolverLimitsTestCase(CommandTestCase):
    def test_sweeps_solve_without_wall_clock_limit(self):
        """O solver das varreduras recebe só o limite de nós, mesmo com tempo configurado"""
        spec = SweepSpec.create("gamma", ["0.5"], 1, self.scenario_path)
        with mock.patch(
            "apps.experiment.sweeps.schedule_scenario", wraps=schedule_scenario
        ) as solve:
            result = run_sweep(
                spec, self.tmp / "out", threads=1, limits=SolveLimits(max_nodes=1_000, max_wall_time=0.5)
            )
        self.assertEqual(result.failures, [])
        self.assertEqual(solve.call_count, 2)
        for call in solve.call_args_list:
            limits = call.args[3]
            self.assertEqual(limits.max_nodes, 1_000)
            self.assertIsNone(limits.max_wall_time)
