"""
Reverifica um arquivo de escalonamento por família de restrições
"""

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.scheduling.utils import verify_schedule

from ._common import EXIT_VALIDATION, scenario_from_path, schedule_from_path, validation_error


class Command(BaseCommand):
    help = "Verifica o escalonamento contra o modelo e o verificador semântico (saída 1 em violação)"

    def add_arguments(self, parser):
        parser.add_argument("scenario", help="Arquivo JSON do cenário")
        parser.add_argument("schedule", help="Arquivo do escalonamento")

    def handle(self, *args, **options):
        scenario = scenario_from_path(options["scenario"])
        schedule = schedule_from_path(options["schedule"], scenario)
        try:
            result = verify_schedule(scenario, schedule)
        except ValidationError as exc:
            raise validation_error(exc)

        for family, passed in result.families.items():
            if passed:
                self.stdout.write(f"{family}: {self.style.SUCCESS('PASS')}")
            else:
                self.stdout.write(f"{family}: {self.style.ERROR('FAIL')}")
        for message in result.violations:
            self.stdout.write(f"  {message}")

        if not result.valid:
            raise CommandError(
                f"{len(result.violations)} violações encontradas", returncode=EXIT_VALIDATION
            )
