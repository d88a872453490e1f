"""
Resolve o modelo ATSM ou STSM de um cenário e grava o arquivo de escalonamento
"""

import json
from fractions import Fraction

from django.core.management.base import BaseCommand, CommandError

from apps.network.types import ModelKind
from apps.scheduling.builder import build_model
from apps.scheduling.exceptions import InfeasibleScenarioError
from apps.scheduling.serializers import schedule_to_document
from apps.scheduling.utils import schedule_scenario
from apps.solver.bnb import SolveLimits, SolveStatus
from apps.solver.lp_format import export_lp

from ._common import EXIT_INFEASIBLE, EXIT_TIMEOUT, parse_gamma, scenario_from_path


class Command(BaseCommand):
    help = "Resolve o escalonamento de um cenário (saída 2: inviável, 3: tempo esgotado)"

    def add_arguments(self, parser):
        parser.add_argument("scenario", help="Arquivo JSON do cenário")
        parser.add_argument(
            "--model", choices=[kind.value for kind in ModelKind], default=ModelKind.ATSM.value
        )
        parser.add_argument("--gamma", help="Peso do uso 5GS no objetivo, em [0, 1]")
        parser.add_argument("--out", help="Arquivo do escalonamento (padrão: saída padrão)")
        parser.add_argument("--lp", help="Exporta também o modelo no formato LP")
        parser.add_argument("--max-nodes", type=int, help="Limite de nós do branch-and-bound")
        parser.add_argument("--max-wall-time", type=float, help="Limite de tempo em segundos")
        parser.add_argument("--no-cache", action="store_true", help="Ignora escalonamentos em cache")

    def handle(self, *args, **options):
        scenario = scenario_from_path(options["scenario"])
        kind = ModelKind(options["model"])
        gamma = Fraction(parse_gamma(options["gamma"])) if options["gamma"] is not None else None

        defaults = SolveLimits.from_settings()
        limits = SolveLimits(
            max_nodes=options["max_nodes"] or defaults.max_nodes,
            max_wall_time=options["max_wall_time"] or defaults.max_wall_time,
        )

        if options["lp"]:
            try:
                model = build_model(scenario, kind, gamma)
            except InfeasibleScenarioError as exc:
                raise CommandError(str(exc), returncode=EXIT_INFEASIBLE)
            with open(options["lp"], "w", encoding="utf-8") as handle:
                handle.write(export_lp(model))

        outcome = schedule_scenario(scenario, kind, gamma, limits, use_cache=not options["no_cache"])

        if outcome.schedule is not None:
            document = json.dumps(schedule_to_document(outcome.schedule), indent=2)
            if options["out"]:
                with open(options["out"], "w", encoding="utf-8") as handle:
                    handle.write(document + "\n")
            else:
                self.stdout.write(document)

        stats = ", ".join(f"{key}={value}" for key, value in sorted(outcome.stats.items()))
        summary = self.stdout if options["out"] else self.stderr
        summary.write(f"{kind} {scenario.name}: {outcome.status} ({stats})")

        if outcome.status == SolveStatus.INFEASIBLE:
            raise CommandError(
                outcome.message or f"Cenário inviável ({outcome.infeasible_family})",
                returncode=EXIT_INFEASIBLE,
            )
        if outcome.status == SolveStatus.TIMED_OUT:
            raise CommandError(outcome.message or "Tempo esgotado", returncode=EXIT_TIMEOUT)
