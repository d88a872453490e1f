from decimal import Decimal
from fractions import Fraction

from django.core.exceptions import ValidationError as DjangoValidationError
from django.shortcuts import get_object_or_404
from django_filters.rest_framework import DjangoFilterBackend
from drf_spectacular.utils import extend_schema, extend_schema_view
from rest_framework import filters, status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from apps.network.models import Scenario
from apps.network.types import ModelKind
from apps.solver.bnb import SolveStatus
from utils.throttles import SolverThrottle

from .models import ScheduleRun
from .serializers import (
    ScheduleRunListSerializer,
    ScheduleRunSerializer,
    ScheduleVerificationSerializer,
    SolveRequestSerializer,
    schedule_from_document,
    schedule_to_document,
)
from .utils import schedule_scenario, verify_schedule


@extend_schema_view(
    list=extend_schema(
        summary="Listar escalonamentos",
        description="Lista as execuções do escalonador com filtros por cenário, modelo e status.",
        tags=["schedules"],
    ),
    retrieve=extend_schema(
        summary="Detalhar escalonamento",
        description="Retorna o arquivo de escalonamento e as estatísticas do solver.",
        tags=["schedules"],
    ),
)
class ScheduleRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    ViewSet para consultar, resolver e verificar escalonamentos.
    """

    queryset = ScheduleRun.objects.select_related("scenario")
    serializer_class = ScheduleRunSerializer
    filter_backends = [
        DjangoFilterBackend,
        filters.OrderingFilter,
    ]
    filterset_fields = ["scenario", "model_kind", "status"]
    ordering_fields = ["created_at", "wall_time", "nodes"]
    ordering = ["-created_at"]

    def get_serializer_class(self):
        if self.action == "list":
            return ScheduleRunListSerializer
        return ScheduleRunSerializer

    def get_throttles(self):
        if self.action == "solve":
            return [SolverThrottle()]
        return super().get_throttles()

    @extend_schema(
        summary="Resolver cenário",
        description=(
            "Monta o modelo ATSM ou STSM do cenário armazenado e resolve. "
            "Retorna 201 com o escalonamento ou 409 quando inviável ou sem solução no tempo."
        ),
        request=SolveRequestSerializer,
        responses={201: ScheduleRunSerializer, 409: ScheduleRunSerializer},
        tags=["schedules"],
    )
    @action(detail=False, methods=["post"])
    def solve(self, request):
        params = SolveRequestSerializer(data=request.data)
        params.is_valid(raise_exception=True)
        scenario = get_object_or_404(Scenario, pk=params.validated_data["scenario"])

        try:
            spec = scenario.to_domain()
        except DjangoValidationError as exc:
            return Response({"errors": exc.messages}, status=status.HTTP_400_BAD_REQUEST)

        kind = ModelKind(params.validated_data["model"])
        gamma = params.validated_data.get("gamma")
        if gamma is None:
            gamma = Decimal(spec.scheduler.gamma.numerator) / Decimal(spec.scheduler.gamma.denominator)
        outcome = schedule_scenario(spec, kind, Fraction(gamma))

        schedule = outcome.schedule
        run = ScheduleRun.objects.create(
            scenario=scenario,
            model_kind=kind,
            gamma=gamma,
            status=outcome.status,
            objective="" if schedule is None or schedule.objective is None else str(schedule.objective),
            nodes=outcome.stats.get("nodes", 0),
            wall_time=outcome.stats.get("wall_time", 0.0),
            infeasible_family=outcome.infeasible_family or "",
            message=outcome.message,
            document=schedule_to_document(schedule) if schedule else None,
        )
        response_status = (
            status.HTTP_201_CREATED
            if outcome.status == SolveStatus.OPTIMAL
            else status.HTTP_409_CONFLICT
        )
        return Response(ScheduleRunSerializer(run).data, status=response_status)

    @extend_schema(
        summary="Verificar escalonamento",
        description="Reverifica o escalonamento armazenado por família de restrições.",
        responses={200: ScheduleVerificationSerializer},
        tags=["schedules"],
    )
    @action(detail=True, methods=["get"])
    def verify(self, request, pk=None):
        run = self.get_object()
        if run.document is None:
            return Response(
                {"error": "Execução sem escalonamento para verificar"},
                status=status.HTTP_400_BAD_REQUEST,
            )

        try:
            spec = run.scenario.to_domain()
            schedule = schedule_from_document(run.document, spec)
            result = verify_schedule(spec, schedule)
        except DjangoValidationError as exc:
            return Response({"errors": exc.messages}, status=status.HTTP_400_BAD_REQUEST)

        data = ScheduleVerificationSerializer(
            {"valid": result.valid, "families": result.families, "violations": list(result.violations)}
        ).data
        return Response(data)
