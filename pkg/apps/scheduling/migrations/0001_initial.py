import uuid

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        ("network", "0001_initial"),
    ]

    operations = [
        migrations.CreateModel(
            name="ScheduleRun",
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
                    "model_kind",
                    models.CharField(
                        choices=[("atsm", "ATSM"), ("stsm", "STSM")],
                        default="atsm",
                        max_length=4,
                        verbose_name="Modelo",
                    ),
                ),
                ("gamma", models.DecimalField(decimal_places=6, max_digits=8, verbose_name="Gamma")),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("optimal", "Ótimo"),
                            ("infeasible", "Inviável"),
                            ("timed_out", "Tempo esgotado"),
                        ],
                        max_length=20,
                        verbose_name="Status",
                    ),
                ),
                ("objective", models.CharField(blank=True, max_length=100, verbose_name="Objetivo")),
                ("nodes", models.PositiveIntegerField(default=0, verbose_name="Nós explorados")),
                ("wall_time", models.FloatField(default=0.0, verbose_name="Tempo (s)")),
                (
                    "infeasible_family",
                    models.CharField(blank=True, max_length=20, verbose_name="Família inviável"),
                ),
                ("message", models.TextField(blank=True, verbose_name="Mensagem")),
                ("document", models.JSONField(blank=True, null=True, verbose_name="Escalonamento")),
                ("created_at", models.DateTimeField(auto_now_add=True, verbose_name="Criado em")),
                (
                    "scenario",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="schedule_runs",
                        to="network.scenario",
                        verbose_name="Cenário",
                    ),
                ),
            ],
            options={
                "verbose_name": "Execução de Escalonamento",
                "verbose_name_plural": "Execuções de Escalonamento",
                "db_table": "schedule_runs",
                "ordering": ["-created_at"],
            },
        ),
    ]
