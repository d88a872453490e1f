import uuid

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        ("scheduling", "0001_initial"),
    ]

    operations = [
        migrations.CreateModel(
            name="SimulationRun",
            fields=[
                (
                    "id",
                    models.UUIDField(
                        default=uuid.uuid4,
                        editable=False,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "mode",
                    models.CharField(
                        choices=[("tam", "TAM"), ("aam", "AAM")], max_length=3, verbose_name="Modo"
                    ),
                ),
                ("seed", models.PositiveIntegerField(default=1, verbose_name="Semente")),
                ("jitter_ns", models.BigIntegerField(default=0, verbose_name="Jitter (ns)")),
                ("skew_ns", models.BigIntegerField(default=0, verbose_name="Desvio de relógio (ns)")),
                ("skew_offset_ns", models.BigIntegerField(default=0, verbose_name="Desvio sorteado (ns)")),
                ("duration_ns", models.BigIntegerField(verbose_name="Duração (ns)")),
                ("mce", models.FloatField(blank=True, null=True, verbose_name="MCE")),
                ("mcv", models.FloatField(blank=True, null=True, verbose_name="MCV")),
                ("std_ratio", models.FloatField(blank=True, null=True, verbose_name="Razão de desvios")),
                ("tsn_usage", models.FloatField(default=0.0, verbose_name="Uso TSN")),
                ("fiveg_usage", models.FloatField(default=0.0, verbose_name="Uso 5GS")),
                ("drops", models.PositiveIntegerField(default=0, verbose_name="Descartes")),
                ("overlaps", models.PositiveIntegerField(default=0, verbose_name="Sobreposições")),
                ("deadline_misses", models.PositiveIntegerField(default=0, verbose_name="Prazos perdidos")),
                ("report", models.JSONField(verbose_name="Relatório")),
                ("created_at", models.DateTimeField(auto_now_add=True, verbose_name="Criado em")),
                (
                    "schedule_run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="simulation_runs",
                        to="scheduling.schedulerun",
                        verbose_name="Escalonamento",
                    ),
                ),
            ],
            options={
                "verbose_name": "Execução de Simulação",
                "verbose_name_plural": "Execuções de Simulação",
                "db_table": "simulation_runs",
                "ordering": ["-created_at"],
            },
        ),
    ]
