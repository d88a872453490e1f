"""
Throttles personalizados para as operações caras da API

Resolver um modelo ou executar uma simulação pode levar segundos; estes
throttles limitam essas ações por cliente, separadamente das leituras.
"""

from django.contrib.auth.models import AnonymousUser
from rest_framework.throttling import SimpleRateThrottle


class ClientScopedThrottle(SimpleRateThrottle):
    """
    Throttle por escopo identificado pelo usuário ou, se anônimo, pelo IP.
    """

    def get_cache_key(self, request, view):
        user = getattr(request, "user", None)
        if user is None or isinstance(user, AnonymousUser) or not user.is_authenticated:
            ident = self.get_ident(request)
        else:
            ident = user.pk

        return f"throttle_{self.scope}_{ident}"


class SolverThrottle(ClientScopedThrottle):
    """
    Throttle para a montagem e resolução de modelos.
    """

    scope = "solver"


class SimulationThrottle(ClientScopedThrottle):
    """
    Throttle para a execução de simulações.
    """

    scope = "simulation"
