from fractions import Fraction

from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers

from apps.network.serializers import StrictSerializer
from apps.network.types import (
    FlowSchedule,
    ModelKind,
    RadioInstance,
    Scenario,
    Schedule,
    TsnInstance,
)

from .models import ScheduleRun

SCHEDULE_FORMAT_VERSION = 1


class FractionField(serializers.CharField):
    """Racional exato serializado como 'p/q'"""

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            self.fail("invalid")

    def to_representation(self, value):
        return str(Fraction(value))

    default_error_messages = {"invalid": "Informe um racional no formato 'p/q'."}


class TsnInstanceSerializer(StrictSerializer):
    link = serializers.RegexField(r"^[A-Za-z0-9]+>[A-Za-z0-9]+$")
    period_ns = serializers.IntegerField(min_value=1)
    offset_ns = serializers.IntegerField()
    span_ns = serializers.IntegerField(min_value=0)


class FlowScheduleSerializer(StrictSerializer):
    id = serializers.CharField(max_length=64)
    start_tti = serializers.IntegerField()
    tti_count = serializers.IntegerField()
    rb_set = serializers.ListField(child=serializers.IntegerField(), allow_empty=True)
    hold_period_ns = serializers.IntegerField(min_value=0)
    scheduled_e2e_delay_ns = serializers.IntegerField(required=False, allow_null=True)
    instances = TsnInstanceSerializer(many=True)


class ScheduleDocumentSerializer(StrictSerializer):
    """Serializer for the schedule file written by the schedule command"""

    version = serializers.IntegerField(default=SCHEDULE_FORMAT_VERSION)
    scenario_digest = serializers.CharField(max_length=64)
    model = serializers.ChoiceField(choices=[kind.value for kind in ModelKind])
    gamma = FractionField()
    status = serializers.CharField(max_length=20)
    objective = FractionField(required=False, allow_null=True)
    stats = serializers.DictField(required=False, default=dict)
    tti_ns = serializers.IntegerField(min_value=1)
    proc_delay_ns = serializers.IntegerField(min_value=0)
    k_max = serializers.IntegerField(min_value=1)
    hyper_period_tsn_ns = serializers.IntegerField(min_value=0)
    hyper_period_5gs_ns = serializers.IntegerField(min_value=0)
    rbs_used = serializers.ListField(child=serializers.IntegerField(), allow_empty=True)
    flows = FlowScheduleSerializer(many=True)
    assignment = serializers.DictField(
        child=serializers.IntegerField(), required=False, default=dict
    )

    def to_schedule(self, scenario: Scenario) -> Schedule:
        """
        Reconstrói o Schedule resolvendo os rótulos de enlace no cenário.

        Raises:
            ValidationError: enlace desconhecido no cenário
        """
        data = self.validated_data
        flows = []
        for flow in data["flows"]:
            instances = []
            for instance in flow["instances"]:
                src, dst = instance["link"].split(">")
                link = scenario.network.link(src, dst)
                if link is None:
                    raise DjangoValidationError(
                        f"Enlace desconhecido no escalonamento: {instance['link']}"
                    )
                instances.append(
                    TsnInstance(
                        flow_id=flow["id"],
                        link=link,
                        period_ns=instance["period_ns"],
                        offset_ns=instance["offset_ns"],
                        span_ns=instance["span_ns"],
                    )
                )
            flows.append(
                FlowSchedule(
                    flow_id=flow["id"],
                    radio=RadioInstance(
                        flow_id=flow["id"],
                        start_tti=flow["start_tti"],
                        tti_count=flow["tti_count"],
                        rb_set=tuple(flow["rb_set"]),
                    ),
                    instances=tuple(instances),
                    hold_period_ns=flow["hold_period_ns"],
                    scheduled_e2e_delay_ns=flow.get("scheduled_e2e_delay_ns"),
                )
            )
        return Schedule(
            model_kind=ModelKind(data["model"]),
            scenario_digest=data["scenario_digest"],
            tti_ns=data["tti_ns"],
            proc_delay_ns=data["proc_delay_ns"],
            k_max=data["k_max"],
            flows=tuple(flows),
            rbs_used=tuple(data["rbs_used"]),
            hyper_period_tsn_ns=data["hyper_period_tsn_ns"],
            hyper_period_5gs_ns=data["hyper_period_5gs_ns"],
            gamma=data["gamma"],
            status=data["status"],
            objective=data.get("objective"),
            assignment=dict(data["assignment"]),
            stats=dict(data["stats"]),
        )


def schedule_to_document(schedule: Schedule) -> dict:
    """Converte o Schedule no documento JSON do arquivo de escalonamento"""
    return {
        "version": SCHEDULE_FORMAT_VERSION,
        "scenario_digest": schedule.scenario_digest,
        "model": str(schedule.model_kind),
        "gamma": str(Fraction(schedule.gamma)),
        "status": str(schedule.status),
        "objective": None if schedule.objective is None else str(schedule.objective),
        "stats": dict(schedule.stats),
        "tti_ns": schedule.tti_ns,
        "proc_delay_ns": schedule.proc_delay_ns,
        "k_max": schedule.k_max,
        "hyper_period_tsn_ns": schedule.hyper_period_tsn_ns,
        "hyper_period_5gs_ns": schedule.hyper_period_5gs_ns,
        "rbs_used": list(schedule.rbs_used),
        "flows": [
            {
                "id": entry.flow_id,
                "start_tti": entry.radio.start_tti,
                "tti_count": entry.radio.tti_count,
                "rb_set": list(entry.radio.rb_set),
                "hold_period_ns": entry.hold_period_ns,
                "scheduled_e2e_delay_ns": entry.scheduled_e2e_delay_ns,
                "instances": [
                    {
                        "link": instance.link.label,
                        "period_ns": instance.period_ns,
                        "offset_ns": instance.offset_ns,
                        "span_ns": instance.span_ns,
                    }
                    for instance in entry.instances
                ],
            }
            for entry in schedule.flows
        ],
        "assignment": dict(sorted(schedule.assignment.items())),
    }


def schedule_from_document(document: dict, scenario: Scenario) -> Schedule:
    """
    Valida o documento e reconstrói o Schedule.

    Raises:
        ValidationError: documento inválido ou digest diferente do cenário
    """
    from apps.network.loader import format_errors

    serializer = ScheduleDocumentSerializer(data=document)
    if not serializer.is_valid():
        raise DjangoValidationError(format_errors(serializer.errors))
    if serializer.validated_data["scenario_digest"] != scenario.digest:
        raise DjangoValidationError(
            "O escalonamento não corresponde ao cenário (digest diferente)"
        )
    return serializer.to_schedule(scenario)


class ScheduleRunSerializer(serializers.ModelSerializer):
    """Serializer for ScheduleRun model with all fields"""

    scenario_name = serializers.CharField(source="scenario.name", read_only=True)

    class Meta:
        model = ScheduleRun
        fields = [
            "id",
            "scenario",
            "scenario_name",
            "model_kind",
            "gamma",
            "status",
            "objective",
            "nodes",
            "wall_time",
            "infeasible_family",
            "message",
            "document",
            "created_at",
        ]
        read_only_fields = fields


class ScheduleRunListSerializer(serializers.ModelSerializer):
    """Serializer for listing schedule runs with essential fields"""

    class Meta:
        model = ScheduleRun
        fields = ["id", "scenario", "model_kind", "gamma", "status", "objective", "created_at"]
        read_only_fields = fields


class SolveRequestSerializer(serializers.Serializer):
    """Parâmetros da ação de resolver um cenário armazenado"""

    scenario = serializers.UUIDField()
    model = serializers.ChoiceField(
        choices=[kind.value for kind in ModelKind], default=ModelKind.ATSM.value
    )
    gamma = serializers.DecimalField(
        max_digits=8, decimal_places=6, min_value=0, max_value=1, required=False
    )


class ScheduleVerificationSerializer(serializers.Serializer):
    """Resultado da verificação por família"""

    valid = serializers.BooleanField()
    families = serializers.DictField(child=serializers.BooleanField())
    violations = serializers.ListField(child=serializers.CharField())
