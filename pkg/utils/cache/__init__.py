"""
Inicialização do módulo de cache
"""

from .cache_utils import CacheKeys, CacheManager, cache_manager

__all__ = [
    "cache_manager",
    "CacheKeys",
    "CacheManager",
]
