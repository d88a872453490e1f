from django.apps import AppConfig


class CacheConfig(AppConfig):
    """Cache de escalonamentos e simulações indexado pelo digest do cenário"""

    default_auto_field = "django.db.models.BigAutoField"
    name = "utils.cache"
    verbose_name = "Cache de Resultados"

    def ready(self):
        # Invalidação por digest quando um cenário muda ou é removido
        from . import signals  # noqa: F401
