from django.core.exceptions import ValidationError as DjangoValidationError
from django.shortcuts import get_object_or_404
from django_filters.rest_framework import DjangoFilterBackend
from drf_spectacular.utils import extend_schema, extend_schema_view
from rest_framework import filters, status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from apps.scheduling.models import ScheduleRun
from utils.throttles import SimulationThrottle

from .models import SimulationRun
from .serializers import (
    SimulateRequestSerializer,
    SimulationRunListSerializer,
    SimulationRunSerializer,
)
from .types import SimulationError
from .utils import simulate_document


@extend_schema_view(
    list=extend_schema(
        summary="Listar simulações",
        description="Lista as simulações com filtros por escalonamento, modo e semente.",
        tags=["simulations"],
    ),
    retrieve=extend_schema(
        summary="Detalhar simulação",
        description="Retorna o relatório completo da simulação, com estatísticas por fluxo.",
        tags=["simulations"],
    ),
)
class SimulationRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    ViewSet para consultar e executar simulações de escalonamentos.
    """

    queryset = SimulationRun.objects.select_related("schedule_run__scenario")
    serializer_class = SimulationRunSerializer
    filter_backends = [
        DjangoFilterBackend,
        filters.OrderingFilter,
    ]
    filterset_fields = ["schedule_run", "mode", "seed"]
    ordering_fields = ["created_at", "mce", "mcv", "jitter_ns", "skew_ns"]
    ordering = ["-created_at"]

    def get_serializer_class(self):
        if self.action == "list":
            return SimulationRunListSerializer
        return SimulationRunSerializer

    def get_throttles(self):
        if self.action == "run":
            return [SimulationThrottle()]
        return super().get_throttles()

    @extend_schema(
        summary="Simular escalonamento",
        description=(
            "Executa o escalonamento armazenado sob TAM ou AAM com jitter e desvio "
            "de relógio injetados. Parâmetros omitidos vêm do cenário."
        ),
        request=SimulateRequestSerializer,
        responses={201: SimulationRunSerializer},
        tags=["simulations"],
    )
    @action(detail=False, methods=["post"])
    def run(self, request):
        params = SimulateRequestSerializer(data=request.data)
        params.is_valid(raise_exception=True)
        data = dict(params.validated_data)
        schedule_run = get_object_or_404(
            ScheduleRun.objects.select_related("scenario"), pk=data.pop("schedule_run")
        )
        if schedule_run.document is None:
            return Response(
                {"error": "Execução sem escalonamento para simular"},
                status=status.HTTP_400_BAD_REQUEST,
            )

        try:
            scenario = schedule_run.scenario.to_domain()
            report = simulate_document(scenario, schedule_run.document, **data)
        except DjangoValidationError as exc:
            return Response({"errors": exc.messages}, status=status.HTTP_400_BAD_REQUEST)
        except SimulationError as exc:
            return Response({"error": str(exc)}, status=status.HTTP_400_BAD_REQUEST)

        simulation = SimulationRun.objects.create(
            schedule_run=schedule_run,
            mode=report["mode"],
            seed=report["seed"],
            jitter_ns=report["jitter_ns"],
            skew_ns=report["skew_ns"],
            skew_offset_ns=report["skew_offset_ns"],
            duration_ns=report["duration_ns"],
            mce=report["mce"],
            mcv=report["mcv"],
            std_ratio=report["std_ratio"],
            tsn_usage=report["tsn_usage"],
            fiveg_usage=report["fiveg_usage"],
            drops=report["drops"],
            overlaps=report["overlaps"],
            deadline_misses=report["deadline_misses"],
            report=report,
        )
        return Response(SimulationRunSerializer(simulation).data, status=status.HTTP_201_CREATED)
