"""
Simula um arquivo de escalonamento sob TAM ou AAM
"""

from django.core.management.base import BaseCommand, CommandError

from apps.netsim.engine import run
from apps.netsim.reports import report_json, write_report, write_trace
from apps.netsim.types import SimulationError
from apps.network.types import SimMode

from ._common import EXIT_VALIDATION, scenario_from_path, schedule_from_path


class Command(BaseCommand):
    help = "Executa a simulação e escreve o relatório CSV (opcionalmente o rastro por pacote)"

    def add_arguments(self, parser):
        parser.add_argument("scenario", help="Arquivo JSON do cenário")
        parser.add_argument("schedule", help="Arquivo do escalonamento produzido por schedule")
        parser.add_argument("--mode", choices=[mode.value for mode in SimMode])
        parser.add_argument("--jitter-ns", type=int)
        parser.add_argument("--skew-ns", type=int)
        parser.add_argument("--skew-offset-ns", type=int, help="Desvio de relógio fixo")
        parser.add_argument("--seed", type=int, default=1)
        parser.add_argument("--duration-ns", type=int)
        parser.add_argument("--traces", help="Arquivo CSV do rastro por pacote")
        parser.add_argument("--out", help="Arquivo CSV do relatório (padrão: saída padrão)")
        parser.add_argument("--json", help="Arquivo JSON com o relatório completo por fluxo")

    def handle(self, *args, **options):
        scenario = scenario_from_path(options["scenario"])
        schedule = schedule_from_path(options["schedule"], scenario)

        try:
            report = run(
                scenario,
                schedule,
                options["mode"],
                options["seed"],
                jitter_ns=options["jitter_ns"],
                skew_ns=options["skew_ns"],
                skew_offset_ns=options["skew_offset_ns"],
                duration_ns=options["duration_ns"],
            )
        except SimulationError as exc:
            raise CommandError(str(exc), returncode=EXIT_VALIDATION)

        if options["traces"]:
            with open(options["traces"], "w", encoding="utf-8", newline="") as handle:
                write_trace(report.packets, handle)
        if options["json"]:
            with open(options["json"], "w", encoding="utf-8") as handle:
                handle.write(report_json(report) + "\n")

        if options["out"]:
            with open(options["out"], "w", encoding="utf-8", newline="") as handle:
                write_report(report, handle)
        else:
            write_report(report, self.stdout)

        for stats in report.flows:
            if stats.flagged:
                self.stderr.write(f"Fluxo {stats.flow_id} sem entregas")
