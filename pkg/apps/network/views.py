from django.core.exceptions import ValidationError as DjangoValidationError
from django_filters.rest_framework import DjangoFilterBackend
from drf_spectacular.utils import extend_schema, extend_schema_view
from rest_framework import filters, status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from .models import Scenario
from .serializers import (
    ScenarioListSerializer,
    ScenarioSerializer,
    ScenarioValidationSerializer,
)
from .utils import hyper_period


@extend_schema_view(
    list=extend_schema(
        summary="Listar cenários",
        description="Lista os cenários armazenados com paginação e filtros.",
        tags=["scenarios"],
    ),
    create=extend_schema(
        summary="Criar cenário",
        description="Armazena um documento de cenário validado.",
        tags=["scenarios"],
    ),
    retrieve=extend_schema(
        summary="Detalhar cenário",
        description="Retorna o documento completo de um cenário.",
        tags=["scenarios"],
    ),
    update=extend_schema(summary="Atualizar cenário", tags=["scenarios"]),
    partial_update=extend_schema(summary="Atualizar cenário parcialmente", tags=["scenarios"]),
    destroy=extend_schema(summary="Deletar cenário", tags=["scenarios"]),
)
class ScenarioViewSet(viewsets.ModelViewSet):
    """
    ViewSet para gerenciar cenários de rede convergente.
    """

    queryset = Scenario.objects.all()
    serializer_class = ScenarioSerializer
    filter_backends = [
        DjangoFilterBackend,
        filters.SearchFilter,
        filters.OrderingFilter,
    ]
    filterset_fields = ["digest", "flow_count"]
    search_fields = ["name", "description"]
    ordering_fields = ["name", "flow_count", "created_at"]
    ordering = ["-created_at"]

    def get_serializer_class(self):
        if self.action == "list":
            return ScenarioListSerializer
        return ScenarioSerializer

    @extend_schema(
        summary="Validar cenário",
        description="Valida o documento armazenado e retorna um resumo da rede.",
        responses={200: ScenarioValidationSerializer},
        tags=["scenarios"],
    )
    @action(detail=True, methods=["get"])
    def validate(self, request, pk=None):
        scenario = self.get_object()
        try:
            spec = scenario.to_domain()
        except DjangoValidationError as exc:
            return Response({"valid": False, "errors": exc.messages}, status=status.HTTP_400_BAD_REQUEST)

        summary = ScenarioValidationSerializer(
            {
                "valid": True,
                "digest": spec.digest,
                "flow_count": len(spec.flows),
                "dataflow_link_count": len(spec.network.dataflow_links),
                "hyper_period_ns": hyper_period(flow.period_ns for flow in spec.flows),
            }
        )
        return Response(summary.data)
