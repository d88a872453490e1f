from uuid import uuid4

from django.db import models

from .utils import scenario_digest


# Create your models here.
class Scenario(models.Model):
    class Meta:
        verbose_name = "Cenário"
        verbose_name_plural = "Cenários"
        ordering = ["-created_at"]
        db_table = "scenarios"

    id = models.UUIDField(
        primary_key=True, default=uuid4, editable=False, verbose_name="ID"
    )
    name = models.CharField(max_length=200, verbose_name="Nome")
    description = models.TextField(blank=True, verbose_name="Descrição")
    document = models.JSONField(verbose_name="Documento")
    digest = models.CharField(
        max_length=64, db_index=True, editable=False, verbose_name="Digest"
    )
    flow_count = models.PositiveIntegerField(default=0, verbose_name="Quantidade de Fluxos")
    created_at = models.DateTimeField(auto_now_add=True, verbose_name="Criado em")
    updated_at = models.DateTimeField(auto_now=True, verbose_name="Atualizado em")

    def __str__(self):
        return f"{self.name} ({self.digest[:8]})"

    def save(self, *args, **kwargs):
        self.digest = scenario_digest(self.document)
        self.flow_count = len(self.document.get("flows", []))
        super().save(*args, **kwargs)

    def to_domain(self):
        """Retorna o cenário validado como tipos de domínio"""
        from .loader import load_scenario

        return load_scenario(self.document)

    def get_node_count(self):
        """Retorna o número de nós da rede"""
        return len(self.document.get("network", {}).get("nodes", []))
