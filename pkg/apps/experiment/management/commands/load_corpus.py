"""
Armazena os cenários distribuídos em scenarios/ no banco
"""

from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.db import transaction

from apps.network.loader import load_scenario, read_document
from apps.network.models import Scenario

from ._common import EXIT_VALIDATION


class Command(BaseCommand):
    help = "Carrega os arquivos de cenário no banco (atualiza pelo nome)"

    def add_arguments(self, parser):
        parser.add_argument(
            "paths", nargs="*", help="Arquivos de cenário (padrão: scenarios/*.json)"
        )

    def handle(self, *args, **options):
        paths = [Path(path) for path in options["paths"]] or sorted(
            (Path(settings.BASE_DIR) / "scenarios").glob("*.json")
        )
        if not paths:
            raise CommandError("Nenhum arquivo de cenário encontrado", returncode=EXIT_VALIDATION)

        with transaction.atomic():
            for path in paths:
                try:
                    document = read_document(path)
                    load_scenario(document)
                except ValidationError as exc:
                    raise CommandError(
                        f"{path}: {'; '.join(exc.messages)}", returncode=EXIT_VALIDATION
                    )
                scenario, created = Scenario.objects.update_or_create(
                    name=document["name"],
                    defaults={
                        "document": document,
                        "description": document.get("description", ""),
                    },
                )
                action = "criado" if created else "atualizado"
                self.stdout.write(self.style.SUCCESS(f"✅ {scenario.name} {action} ({scenario.digest[:12]})"))
