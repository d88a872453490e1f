import io
from fractions import Fraction

from django.test import SimpleTestCase
from rest_framework import status
from rest_framework.test import APITestCase

from apps.experiment.corpus import desk_document, example_document
from apps.network.loader import load_scenario
from apps.network.models import Scenario
from apps.network.types import (
    FlowSchedule,
    ModelKind,
    RadioInstance,
    Schedule,
    SimMode,
    TsnInstance,
)
from apps.network.utils import wire_span
from apps.scheduling.decoding import with_scheduled_delays
from apps.scheduling.models import ScheduleRun
from apps.scheduling.serializers import schedule_to_document
from apps.scheduling.utils import solve_scenario

from .engine import Simulator, run
from .metrics import compute_metrics, count_overlaps, std_ratio
from .models import SimulationRun
from .nodes import EdgeSwitch
from .reports import REPORT_COLUMNS, TRACE_COLUMNS, write_report, write_trace
from .types import (
    ClockModel,
    DropReason,
    EventType,
    JitterModel,
    Packet,
    RngStreams,
    SimulationError,
)

MS = 1_000_000


def example_schedule(scenario, kind: ModelKind, offset_ns: int, window_ns: int) -> Schedule:
    """Escalonamento montado à mão para o exemplo de referência"""
    flow = scenario.flows[0]
    link = flow.scheduled_links[0]
    entry = FlowSchedule(
        flow_id=flow.id,
        radio=RadioInstance(flow.id, start_tti=0, tti_count=1, rb_set=(1,)),
        instances=(
            TsnInstance(flow.id, link, window_ns, offset_ns, wire_span(flow.length_bytes, link.rate_bps)),
        ),
        hold_period_ns=window_ns if kind == ModelKind.ATSM else 0,
    )
    schedule = Schedule(
        model_kind=kind,
        scenario_digest=scenario.digest,
        tti_ns=scenario.radio.tti_ns,
        proc_delay_ns=scenario.radio.proc_delay_ns,
        k_max=scenario.radio.k_max,
        flows=(entry,),
        rbs_used=(1,),
        hyper_period_tsn_ns=window_ns,
        hyper_period_5gs_ns=flow.period_ns,
    )
    return with_scheduled_delays(scenario, schedule)


class ExampleTestCase(SimpleTestCase):
    """Base com o exemplo de referência e os dois escalonamentos"""

    def setUp(self):
        self.scenario = load_scenario(example_document())
        self.atsm = example_schedule(self.scenario, ModelKind.ATSM, 0, 25 * MS)
        self.stsm = example_schedule(self.scenario, ModelKind.STSM, 20 * MS, 100 * MS)

    def delays(self, report):
        return set(report.flow("f1").delays)


class ScheduledDelayTestCase(ExampleTestCase):
    def test_scheduled_delays(self):
        """ATSM planeja 70 ms e STSM 45 ms"""
        self.assertEqual(self.atsm.flow("f1").scheduled_e2e_delay_ns, 70 * MS)
        self.assertEqual(self.stsm.flow("f1").scheduled_e2e_delay_ns, 45 * MS)


class AamRunTestCase(ExampleTestCase):
    def test_same_delay_for_both_skew_signs(self):
        """AAM entrega todos os pacotes com 70 ms para desvio de -10 ms e +10 ms"""
        for offset in (-10 * MS, 10 * MS):
            report = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=offset)
            self.assertEqual(self.delays(report), {70 * MS})
            self.assertEqual(report.flow("f1").delivered, 10)
            self.assertEqual(report.drops, 0)

    def test_zero_jitter_zero_skew(self):
        """Sem jitter e sem desvio: CE = 1 e CV = 0"""
        report = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=0)
        self.assertEqual(report.flow("f1").ce, Fraction(1))
        self.assertEqual(report.mce, 1.0)
        self.assertEqual(report.mcv, 0.0)
        self.assertEqual(report.deadline_misses, 0)

    def test_wait_stamps(self):
        """Com desvio de -10 ms o pacote chega 15 ms antes da oportunidade"""
        report = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=-10 * MS)
        first = report.packets[0]
        self.assertEqual(first.t_gw_arrive, 10 * MS)
        self.assertEqual(first.wait, 15 * MS)
        self.assertEqual(first.t_deliver, 60 * MS)
        for packet in report.packets:
            self.assertGreaterEqual(packet.wait, 0)
            self.assertLess(packet.wait, 25 * MS)

    def test_jitter_isolation(self):
        """A residência TSN é constante e σ(e2e)/σ(5GS) = 1 para qualquer J e semente"""
        for seed in (1, 2, 3):
            for jitter in (1 * MS, 10 * MS):
                report = run(self.scenario, self.atsm, SimMode.AAM, seed, jitter_ns=jitter, skew_ns=20 * MS)
                residences = {packet.tsn_residence for packet in report.packets}
                self.assertEqual(residences, {50 * MS})
                self.assertEqual(report.flow("f1").residence_std, 0.0)
                self.assertEqual(report.std_ratio, 1.0)

    def test_jitter_adds_to_scheduled_delay(self):
        """AAM: e2e - jitter = 70 ms em cada pacote, com J até 10 ms e desvio em [-10, +10] ms"""
        for offset in (-10 * MS, 0, 10 * MS):
            for jitter in (1 * MS, 10 * MS):
                report = run(
                    self.scenario, self.atsm, SimMode.AAM, 5, jitter_ns=jitter, skew_offset_ns=offset
                )
                self.assertEqual(report.drops, 0)
                for packet in report.packets:
                    drawn = packet.fiveg_delay - 20 * MS
                    self.assertGreaterEqual(drawn, 0)
                    self.assertLessEqual(drawn, jitter)
                    self.assertEqual(packet.e2e_delay - drawn, 70 * MS)

    def test_aam_requires_atsm_schedule(self):
        """AAM com escalonamento STSM é recusado antes do primeiro evento"""
        with self.assertRaises(SimulationError):
            run(self.scenario, self.stsm, SimMode.AAM)


class TamRunTestCase(ExampleTestCase):
    def test_example_delays(self):
        """TAM: 55 ms com desvio de -10 ms e 135 ms com +10 ms"""
        early = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=-10 * MS)
        late = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=10 * MS)
        self.assertEqual(self.delays(early), {55 * MS})
        self.assertEqual(self.delays(late), {135 * MS})

    def test_arrival_at_gate_opening(self):
        """Chegada exatamente na abertura é transmitida; 1 ns depois espera um período"""
        exact = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=0)
        after = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=1)
        self.assertEqual(self.delays(exact), {45 * MS})
        self.assertEqual(self.delays(after), {145 * MS - 1})

    def test_no_hold_under_tam(self):
        report = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=0)
        for packet in report.packets:
            self.assertIsNone(packet.wait)
            self.assertEqual(packet.t_deliver - packet.t_edge_arrive, 12_500_000)

    def test_tam_with_atsm_schedule(self):
        """TAM aceita janelas ATSM e não retém o pacote na borda"""
        report = run(self.scenario, self.atsm, SimMode.TAM, skew_offset_ns=0)
        self.assertEqual(self.delays(report), {50 * MS})


class RunPropertiesTestCase(ExampleTestCase):
    def test_determinism(self):
        first = run(self.scenario, self.atsm, SimMode.AAM, 7, jitter_ns=5 * MS, skew_ns=4 * MS)
        second = run(self.scenario, self.atsm, SimMode.AAM, 7, jitter_ns=5 * MS, skew_ns=4 * MS)
        self.assertEqual(first.to_dict(), second.to_dict())
        self.assertEqual(first.packets, second.packets)

    def test_conservation(self):
        for mode, schedule in ((SimMode.AAM, self.atsm), (SimMode.TAM, self.stsm)):
            report = run(self.scenario, schedule, mode, 3, jitter_ns=30 * MS)
            for stats in report.flows:
                self.assertEqual(
                    stats.generated, stats.delivered + stats.dropped + stats.in_flight
                )

    def test_usage(self):
        """Janelas de 25 ms abrem 40 vezes em 1 s; a de 100 ms abre 10 vezes"""
        aam = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=0)
        tam = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=0)
        self.assertAlmostEqual(aam.tsn_usage, 0.4)
        self.assertAlmostEqual(tam.tsn_usage, 0.1)
        self.assertEqual(aam.fiveg_usage, 1.0)
        self.assertGreaterEqual(aam.tsn_usage, tam.tsn_usage)

    def test_no_overlaps(self):
        report = run(self.scenario, self.atsm, SimMode.AAM, 1, jitter_ns=10 * MS)
        self.assertEqual(report.overlaps, 0)

    def test_digest_mismatch(self):
        other = load_scenario(example_document(skew_offset_ns=5 * MS))
        with self.assertRaises(SimulationError):
            run(other, self.atsm, SimMode.AAM)

    def test_invalid_parameters(self):
        with self.assertRaises(SimulationError):
            run(self.scenario, self.atsm, SimMode.AAM, jitter_ns=-1)


class NodeBehaviourTestCase(ExampleTestCase):
    """Gateway e switch de borda acionados diretamente"""

    def make_simulator(self, mode=SimMode.AAM, schedule=None):
        return Simulator(
            self.scenario,
            schedule or self.atsm,
            mode,
            ClockModel(0, 0),
            JitterModel(0, RngStreams(1), ("f1",)),
            1000 * MS,
        )

    def test_schedule_method_survives_construction(self):
        """O escalonamento fica em timetable e schedule continua agendando eventos"""
        simulator = self.make_simulator()
        self.assertIs(simulator.timetable, self.atsm)
        fired = []
        simulator.schedule(
            5 * MS, "gw", EventType.RECEIVE, "f1", 0, lambda: fired.append(simulator.now)
        )
        simulator.drain()
        self.assertEqual(fired, [5 * MS])

    def test_buffer_overwrite(self):
        """Duas chegadas antes da oportunidade: a primeira é substituída"""
        simulator = self.make_simulator()
        first = Packet("f1", 0, t_gen=0, t_gen_tsn=0)
        second = Packet("f1", 1, t_gen=0, t_gen_tsn=0)
        simulator.now = 10 * MS
        simulator.gateway.on_receive(first)
        simulator.now = 15 * MS
        simulator.gateway.on_receive(second)
        simulator.drain()

        self.assertEqual(first.drop_reason, DropReason.REPLACED_IN_BUFFER)
        self.assertIsNone(first.t_deliver)
        self.assertEqual(second.wait, 10 * MS)
        # borda em 37,5 ms, retenção de 15 ms, último salto de 12,5 ms
        self.assertEqual(second.t_edge_arrive, 37_500_000)
        self.assertEqual(second.t_deliver, 65 * MS)

    def test_zero_wait_holds_full_window(self):
        simulator = self.make_simulator()
        packet = Packet("f1", 0, t_gen=0, t_gen_tsn=0)
        simulator.now = 25 * MS
        simulator.gateway.on_receive(packet)
        simulator.drain()
        self.assertEqual(packet.wait, 0)
        self.assertEqual(packet.t_deliver - packet.t_edge_arrive, 25 * MS + 12_500_000)

    def test_wait_not_smaller_than_window(self):
        """Carimbo de espera ≥ T interrompe a execução"""
        simulator = self.make_simulator()
        edge = EdgeSwitch(simulator, "edge")
        packet = Packet("f1", 0, t_gen=0, t_gen_tsn=0, wait=25 * MS)
        with self.assertRaises(SimulationError):
            edge.on_receive(packet)

    def test_tam_queue_is_fifo(self):
        """Fila acumulada sai em rajada na abertura, um quadro atrás do outro"""
        simulator = self.make_simulator(SimMode.TAM, self.stsm)
        packets = [Packet("f1", seq, t_gen=0, t_gen_tsn=0) for seq in range(3)]
        simulator.now = 0
        with self.assertLogs("apps.netsim.nodes", level="WARNING"):
            for packet in packets:
                simulator.gateway.on_receive(packet)
        simulator.drain()
        self.assertEqual(
            [packet.t_gw_send for packet in packets], [20 * MS, 30 * MS, 40 * MS]
        )
        self.assertEqual([packet.burst_shift for packet in packets], [0, 10 * MS, 20 * MS])

    def test_late_packet_does_not_delay_next_one_by_a_period(self):
        """Pacote atrasado espera a abertura seguinte; o próximo sai logo atrás dele"""
        simulator = self.make_simulator(SimMode.TAM, self.stsm)
        late = Packet("f1", 0, t_gen=0, t_gen_tsn=0)
        on_time = Packet("f1", 1, t_gen=100 * MS, t_gen_tsn=100 * MS)
        simulator.now = 21 * MS
        simulator.gateway.on_receive(late)
        simulator.now = 110 * MS
        simulator.gateway.on_receive(on_time)
        simulator.drain()

        self.assertEqual((late.t_gw_send, late.t_deliver), (120 * MS, 145 * MS))
        self.assertEqual((on_time.t_gw_send, on_time.t_deliver), (130 * MS, 155 * MS))
        self.assertEqual(on_time.t_deliver - on_time.t_gen, 55 * MS)


class MetricsTestCase(ExampleTestCase):
    def test_example_tam_coefficients(self):
        """Atrasos {55, 135} ms contra 45 ms: CE = 95/45 e CV = 40/95"""
        packets = [
            Packet("f1", 0, t_gen=0, t_gen_tsn=0, t_gw_arrive=20 * MS, t_deliver=55 * MS),
            Packet("f1", 1, t_gen=100 * MS, t_gen_tsn=100 * MS, t_gw_arrive=120 * MS, t_deliver=235 * MS),
        ]
        report = compute_metrics(
            packets,
            self.stsm,
            self.scenario,
            mode=SimMode.TAM,
            seed=1,
            duration_ns=200 * MS,
            jitter_ns=0,
            clock=ClockModel(0, 0),
        )
        stats = report.flow("f1")
        self.assertEqual(stats.ce, Fraction(95, 45))
        self.assertAlmostEqual(stats.cv, 40 / 95)
        self.assertAlmostEqual(report.mce, 95 / 45)

    def test_flow_without_deliveries_is_flagged(self):
        packets = [Packet("f1", 0, t_gen=0, t_gen_tsn=0, drop_reason=DropReason.REPLACED_IN_BUFFER)]
        report = compute_metrics(
            packets,
            self.atsm,
            self.scenario,
            mode=SimMode.AAM,
            seed=1,
            duration_ns=100 * MS,
            jitter_ns=0,
            clock=ClockModel(0, 0),
        )
        stats = report.flow("f1")
        self.assertTrue(stats.flagged)
        self.assertIsNone(stats.ce)
        self.assertIsNone(report.mce)
        self.assertEqual(report.drops, 1)

    def test_std_ratio_is_shift_invariant(self):
        self.assertEqual(std_ratio([71, 75, 90], [1, 5, 20]), 1.0)
        self.assertIsNone(std_ratio([70, 70], [20, 20]))

    def test_count_overlaps(self):
        self.assertEqual(count_overlaps({"a>b": [(0, 10), (5, 15), (20, 30)]}), 1)
        self.assertEqual(count_overlaps({"a>b": [(0, 10), (10, 20)]}), 0)


class DeskRunTestCase(SimpleTestCase):
    """Escalonamentos ótimos do cenário de bancada executados no simulador"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.scenario = load_scenario(desk_document())
        cls.atsm = solve_scenario(cls.scenario, ModelKind.ATSM).schedule
        cls.stsm = solve_scenario(cls.scenario, ModelKind.STSM).schedule

    def test_aam_delay_matches_schedule(self):
        """Sem jitter e sem desvio cada fluxo é entregue com o atraso planejado"""
        report = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=0)
        for entry in self.atsm.flows:
            with self.subTest(flow=entry.flow_id):
                stats = report.flow(entry.flow_id)
                self.assertGreater(stats.delivered, 0)
                self.assertEqual(set(stats.delays), {entry.scheduled_e2e_delay_ns})

    def test_aam_isolates_jitter(self):
        for seed in (1, 2):
            report = run(self.scenario, self.atsm, SimMode.AAM, seed, jitter_ns=10_000)
            for stats in report.flows:
                with self.subTest(seed=seed, flow=stats.flow_id):
                    self.assertEqual(stats.residence_std, 0.0)
                    self.assertEqual(stats.std_ratio, 1.0)

    def test_no_overlaps_nor_misses(self):
        for mode, schedule in ((SimMode.AAM, self.atsm), (SimMode.TAM, self.stsm)):
            with self.subTest(mode=mode):
                report = run(self.scenario, schedule, mode, skew_offset_ns=0)
                self.assertEqual(report.overlaps, 0)
                self.assertEqual(report.deadline_misses, 0)
                self.assertEqual(report.drops, 0)

    def test_atsm_uses_more_tsn_time(self):
        aam = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=0)
        tam = run(self.scenario, self.stsm, SimMode.TAM, skew_offset_ns=0)
        self.assertGreaterEqual(aam.tsn_usage, tam.tsn_usage)


class RandomModelsTestCase(SimpleTestCase):
    def test_skew_within_half_width(self):
        for seed in range(20):
            clock = ClockModel.sample(20_000, RngStreams(seed))
            self.assertLessEqual(abs(clock.skew_offset_ns), 10_000)

    def test_skew_with_odd_width(self):
        """Largura ímpar: o desvio nunca passa de floor(S/2)"""
        for seed in range(50):
            self.assertEqual(ClockModel.sample(1, RngStreams(seed)).skew_offset_ns, 0)
            self.assertLessEqual(abs(ClockModel.sample(3, RngStreams(seed)).skew_offset_ns), 1)

    def test_fixed_offset(self):
        clock = ClockModel.sample(20_000, RngStreams(1), offset_ns=-7)
        self.assertEqual(clock.skew_offset_ns, -7)
        self.assertEqual(clock.to_tsn(100), 93)
        self.assertEqual(ClockModel.sample(0, RngStreams(1)).skew_offset_ns, 0)

    def test_jitter_bounds_and_monotonicity(self):
        """Mesma semente: o jitter de cada pacote cresce com J"""
        small = JitterModel(10_000, RngStreams(5), ("f1", "f2"))
        large = JitterModel(50_000, RngStreams(5), ("f1", "f2"))
        for _ in range(50):
            a, b = small.draw("f1"), large.draw("f1")
            self.assertTrue(0 <= a <= 10_000)
            self.assertTrue(0 <= b <= 50_000)
            self.assertLessEqual(a, b)

    def test_zero_jitter(self):
        model = JitterModel(0, RngStreams(1), ("f1",))
        self.assertEqual({model.draw("f1") for _ in range(10)}, {0})


class ReportWriterTestCase(ExampleTestCase):
    def test_trace_csv(self):
        report = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=0)
        stream = io.StringIO()
        write_trace(report.packets, stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], ",".join(TRACE_COLUMNS))
        self.assertEqual(len(lines), 11)
        self.assertTrue(lines[1].startswith("f1,0,0,20000000,5000000,"))

    def test_report_csv(self):
        report = run(self.scenario, self.atsm, SimMode.AAM, skew_offset_ns=0)
        stream = io.StringIO()
        write_report(report, stream)
        header, row = stream.getvalue().splitlines()
        self.assertEqual(header, ",".join(REPORT_COLUMNS))
        self.assertEqual(row, ",,1,1.000000,0.000000,,0.400000,1.000000,0")


class SimulationApiTestCase(APITestCase):
    def setUp(self):
        document = example_document()
        self.scenario = Scenario.objects.create(name="example", document=document)
        spec = load_scenario(document)
        self.schedule_run = ScheduleRun.objects.create(
            scenario=self.scenario,
            model_kind=ScheduleRun.ModelKind.ATSM,
            gamma="0.5",
            status=ScheduleRun.Status.OPTIMAL,
            document=schedule_to_document(example_schedule(spec, ModelKind.ATSM, 0, 25 * MS)),
        )

    def test_run_simulation(self):
        response = self.client.post(
            "/api/v1/simulations/run/",
            {"schedule_run": str(self.schedule_run.id), "mode": "aam", "skew_offset_ns": -10 * MS},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["mce"], 1.0)
        self.assertEqual(response.data["drops"], 0)
        self.assertEqual(SimulationRun.objects.count(), 1)

    def test_list_simulations(self):
        self.client.post(
            "/api/v1/simulations/run/",
            {"schedule_run": str(self.schedule_run.id), "mode": "aam"},
            format="json",
        )
        response = self.client.get("/api/v1/simulations/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)

    def test_schedule_without_document(self):
        self.schedule_run.document = None
        self.schedule_run.save()
        response = self.client.post(
            "/api/v1/simulations/run/",
            {"schedule_run": str(self.schedule_run.id)},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
