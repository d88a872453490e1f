"""
Cache utilities para escalonamentos e simulações

Escalonamentos resolvidos são caros: ficam em cache pela chave
(digest do cenário, modelo, gamma). Cada digest mantém um índice das suas
chaves, o que permite invalidar tudo de um cenário em qualquer backend
(locmem nos testes, Redis em produção via django-redis).
"""

import hashlib
import json
import logging
from typing import Any, Callable, List

from django.conf import settings
from django.core.cache import caches

logger = logging.getLogger(__name__)


class CacheKeys:
    """Constantes para chaves de cache organizadas por contexto"""

    SCENARIO_PREFIX = "scenario"
    SCHEDULE_PREFIX = "schedule"
    SIMULATION_PREFIX = "simulation"

    SCENARIO_DETAIL = f"{SCENARIO_PREFIX}:detail"
    SCHEDULE_RESULT = f"{SCHEDULE_PREFIX}:result"
    SIMULATION_REPORT = f"{SIMULATION_PREFIX}:report"

    DIGEST_INDEX = "digest:index"


class CacheManager:
    """Gerenciador centralizado de cache"""

    def __init__(self, cache_name: str = "default"):
        self.cache = caches[cache_name]
        self.ttl_config = getattr(settings, "CACHE_TTL", {})

    def get_backend_info(self) -> dict:
        """Retorna informações sobre o backend configurado"""
        cache_config = settings.CACHES.get("default", {})
        return {
            "backend": cache_config.get("BACKEND", "Unknown"),
            "location": cache_config.get("LOCATION", "N/A"),
        }

    def get_ttl(self, ttl_type: str) -> int:
        """Retorna TTL baseado no tipo configurado"""
        return self.ttl_config.get(ttl_type, self.ttl_config.get("MEDIUM", 1800))

    def generate_cache_key(self, prefix: str, **kwargs) -> str:
        """Gera chave de cache consistente baseada nos parâmetros"""
        key_parts = [prefix]

        for key, value in sorted(kwargs.items()):
            if isinstance(value, (dict, list)):
                value_str = hashlib.md5(
                    json.dumps(value, sort_keys=True).encode()
                ).hexdigest()[:8]
            else:
                value_str = str(value)
            key_parts.append(f"{key}:{value_str}")

        return ":".join(key_parts)

    def schedule_key(self, digest: str, model_kind: str, gamma) -> str:
        return self.generate_cache_key(
            CacheKeys.SCHEDULE_RESULT, digest=digest, model=model_kind, gamma=gamma
        )

    def simulation_key(self, digest: str, schedule_document: dict, **params) -> str:
        return self.generate_cache_key(
            CacheKeys.SIMULATION_REPORT, digest=digest, schedule=schedule_document, **params
        )

    def get_or_set_cache(
        self,
        key: str,
        fetch_func: Callable,
        ttl_type: str = "MEDIUM",
        digest: str = "",
        **fetch_kwargs,
    ) -> Any:
        """
        Busca dados do cache ou executa função para obter/cachear

        Args:
            key: Chave do cache
            fetch_func: Função para buscar dados se não estiver em cache
            ttl_type: Tipo de TTL (SHORT, MEDIUM, LONG, SCHEDULE)
            digest: Digest do cenário dono da chave, para invalidação
            **fetch_kwargs: Argumentos para a função de busca
        """
        cached_data = self.cache.get(key)

        if cached_data is not None:
            logger.debug("Cache hit: %s", key)
            return cached_data

        data = fetch_func(**fetch_kwargs)
        if data is None:
            return None
        self.cache.set(key, data, self.get_ttl(ttl_type))
        if digest:
            self.register_key(digest, key)

        return data

    def register_key(self, digest: str, key: str):
        """Registra a chave no índice do digest"""
        index_key = f"{CacheKeys.DIGEST_INDEX}:{digest}"
        keys = self.cache.get(index_key) or []
        if key not in keys:
            keys.append(key)
            self.cache.set(index_key, keys, self.get_ttl("LONG"))

    def get_keys_for_digest(self, digest: str) -> List[str]:
        return list(self.cache.get(f"{CacheKeys.DIGEST_INDEX}:{digest}") or [])

    def invalidate_digest(self, digest: str) -> int:
        """
        Invalida todas as entradas ligadas a um cenário

        Returns:
            Número de chaves removidas
        """
        keys = self.get_keys_for_digest(digest)
        if keys:
            self.cache.delete_many(keys)
            logger.info("Removidas %d chaves do cenário %s", len(keys), digest[:12])
        self.cache.delete(f"{CacheKeys.DIGEST_INDEX}:{digest}")
        return len(keys)

    def health_check(self) -> tuple[bool, str]:
        """Verifica se o cache está funcionando corretamente"""
        try:
            test_key = "health_check_test"
            test_value = {"status": "ok"}

            self.cache.set(test_key, test_value, 10)
            result = self.cache.get(test_key)
            self.cache.delete(test_key)

            if result != test_value:
                return False, "Cache set/get failed"
            return True, "Cache is healthy"

        except Exception as e:
            error_msg = f"Cache health check failed: {e}"
            logger.error(error_msg)
            return False, error_msg


# Instância global do cache manager
cache_manager = CacheManager()
