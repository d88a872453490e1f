from uuid import uuid4

from django.db import models

from apps.network.models import Scenario


# Create your models here.
class ScheduleRun(models.Model):
    class Meta:
        verbose_name = "Execução de Escalonamento"
        verbose_name_plural = "Execuções de Escalonamento"
        ordering = ["-created_at"]
        db_table = "schedule_runs"

    class ModelKind(models.TextChoices):
        ATSM = "atsm", "ATSM"
        STSM = "stsm", "STSM"

    class Status(models.TextChoices):
        OPTIMAL = "optimal", "Ótimo"
        INFEASIBLE = "infeasible", "Inviável"
        TIMED_OUT = "timed_out", "Tempo esgotado"

    id = models.UUIDField(
        primary_key=True, default=uuid4, editable=False, verbose_name="ID"
    )
    scenario = models.ForeignKey(
        Scenario,
        on_delete=models.CASCADE,
        related_name="schedule_runs",
        verbose_name="Cenário",
    )
    model_kind = models.CharField(
        max_length=4, choices=ModelKind.choices, default=ModelKind.ATSM, verbose_name="Modelo"
    )
    gamma = models.DecimalField(max_digits=8, decimal_places=6, verbose_name="Gamma")
    status = models.CharField(max_length=20, choices=Status.choices, verbose_name="Status")
    objective = models.CharField(max_length=100, blank=True, verbose_name="Objetivo")
    nodes = models.PositiveIntegerField(default=0, verbose_name="Nós explorados")
    wall_time = models.FloatField(default=0.0, verbose_name="Tempo (s)")
    infeasible_family = models.CharField(max_length=20, blank=True, verbose_name="Família inviável")
    message = models.TextField(blank=True, verbose_name="Mensagem")
    document = models.JSONField(null=True, blank=True, verbose_name="Escalonamento")
    created_at = models.DateTimeField(auto_now_add=True, verbose_name="Criado em")

    def __str__(self):
        return f"{self.scenario.name} [{self.model_kind}] {self.status}"

    @property
    def has_schedule(self):
        return self.document is not None
