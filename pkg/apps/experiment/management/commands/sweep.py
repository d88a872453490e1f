"""
Executa uma das varreduras de experimento e grava os CSVs agregados
"""

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.experiment.sweeps import SweepError, SweepKind, SweepSpec, run_sweep

from ._common import EXIT_VALIDATION, validation_error


class Command(BaseCommand):
    help = "Varreduras de jitter, desvio de relógio, quantidade de fluxos e gamma"

    def add_arguments(self, parser):
        parser.add_argument("kind", choices=[kind.value for kind in SweepKind])
        parser.add_argument("--scenario", help="Cenário base (padrão: corpus de bancada)")
        parser.add_argument("--points", nargs="+", help="Pontos da varredura")
        parser.add_argument("--seeds", type=int, help="Sementes por ponto")
        parser.add_argument("--threads", type=int, help="Limite de threads do pool")
        parser.add_argument("--out-dir", default="results", help="Diretório de saída")

    def handle(self, *args, **options):
        try:
            spec = SweepSpec.create(
                options["kind"], options["points"], options["seeds"], options["scenario"]
            )
            result = run_sweep(spec, options["out_dir"], threads=options["threads"])
        except ValidationError as exc:
            raise validation_error(exc)
        except SweepError as exc:
            raise CommandError(str(exc), returncode=EXIT_VALIDATION)

        for path in result.files:
            self.stdout.write(str(path))
        if result.failures:
            self.stderr.write(
                self.style.WARNING(f"{len(result.failures)} pontos falharam; veja metadata.json")
            )
