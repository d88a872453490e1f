"""
Sistema de invalidação de cache por signals Django

Quando um cenário armazenado muda ou é removido, os escalonamentos em cache
do digest antigo deixam de ser válidos.
"""

from django.db.models.signals import post_delete, pre_save
from django.dispatch import receiver

from utils.cache import cache_manager


@receiver(pre_save, sender="network.Scenario")
def invalidate_scenario_cache(sender, instance, **kwargs):
    """
    Invalida o cache do digest anterior quando o documento do cenário muda
    """
    if instance._state.adding:
        return
    previous = sender.objects.filter(pk=instance.pk).values_list("digest", flat=True).first()
    if previous:
        cache_manager.invalidate_digest(previous)


@receiver(post_delete, sender="network.Scenario")
def invalidate_scenario_cache_on_delete(sender, instance, **kwargs):
    """
    Invalida cache quando um cenário é deletado
    """
    cache_manager.invalidate_digest(instance.digest)
