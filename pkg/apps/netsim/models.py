from uuid import uuid4

from django.db import models

from apps.scheduling.models import ScheduleRun


# Create your models here.
class SimulationRun(models.Model):
    class Meta:
        verbose_name = "Execução de Simulação"
        verbose_name_plural = "Execuções de Simulação"
        ordering = ["-created_at"]
        db_table = "simulation_runs"

    class Mode(models.TextChoices):
        TAM = "tam", "TAM"
        AAM = "aam", "AAM"

    id = models.UUIDField(
        primary_key=True, default=uuid4, editable=False, verbose_name="ID"
    )
    schedule_run = models.ForeignKey(
        ScheduleRun,
        on_delete=models.CASCADE,
        related_name="simulation_runs",
        verbose_name="Escalonamento",
    )
    mode = models.CharField(max_length=3, choices=Mode.choices, verbose_name="Modo")
    seed = models.PositiveIntegerField(default=1, verbose_name="Semente")
    jitter_ns = models.BigIntegerField(default=0, verbose_name="Jitter (ns)")
    skew_ns = models.BigIntegerField(default=0, verbose_name="Desvio de relógio (ns)")
    skew_offset_ns = models.BigIntegerField(default=0, verbose_name="Desvio sorteado (ns)")
    duration_ns = models.BigIntegerField(verbose_name="Duração (ns)")
    mce = models.FloatField(null=True, blank=True, verbose_name="MCE")
    mcv = models.FloatField(null=True, blank=True, verbose_name="MCV")
    std_ratio = models.FloatField(null=True, blank=True, verbose_name="Razão de desvios")
    tsn_usage = models.FloatField(default=0.0, verbose_name="Uso TSN")
    fiveg_usage = models.FloatField(default=0.0, verbose_name="Uso 5GS")
    drops = models.PositiveIntegerField(default=0, verbose_name="Descartes")
    overlaps = models.PositiveIntegerField(default=0, verbose_name="Sobreposições")
    deadline_misses = models.PositiveIntegerField(default=0, verbose_name="Prazos perdidos")
    report = models.JSONField(verbose_name="Relatório")
    created_at = models.DateTimeField(auto_now_add=True, verbose_name="Criado em")

    def __str__(self):
        return f"{self.schedule_run.scenario.name} [{self.mode}] semente {self.seed}"
