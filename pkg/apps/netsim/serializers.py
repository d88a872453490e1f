from rest_framework import serializers

from apps.network.types import SimMode

from .models import SimulationRun


class SimulationRunSerializer(serializers.ModelSerializer):
    """Serializer for SimulationRun model with all fields"""

    scenario_name = serializers.CharField(source="schedule_run.scenario.name", read_only=True)
    model_kind = serializers.CharField(source="schedule_run.model_kind", read_only=True)

    class Meta:
        model = SimulationRun
        fields = [
            "id",
            "schedule_run",
            "scenario_name",
            "model_kind",
            "mode",
            "seed",
            "jitter_ns",
            "skew_ns",
            "skew_offset_ns",
            "duration_ns",
            "mce",
            "mcv",
            "std_ratio",
            "tsn_usage",
            "fiveg_usage",
            "drops",
            "overlaps",
            "deadline_misses",
            "report",
            "created_at",
        ]
        read_only_fields = fields


class SimulationRunListSerializer(serializers.ModelSerializer):
    """Serializer for listing simulation runs with essential fields"""

    class Meta:
        model = SimulationRun
        fields = ["id", "schedule_run", "mode", "seed", "jitter_ns", "skew_ns", "mce", "mcv", "created_at"]
        read_only_fields = fields


class SimulateRequestSerializer(serializers.Serializer):
    """Parâmetros da ação de simular um escalonamento armazenado"""

    schedule_run = serializers.UUIDField()
    mode = serializers.ChoiceField(choices=[mode.value for mode in SimMode], required=False)
    seed = serializers.IntegerField(min_value=0, required=False)
    jitter_ns = serializers.IntegerField(min_value=0, required=False)
    skew_ns = serializers.IntegerField(min_value=0, required=False)
    skew_offset_ns = serializers.IntegerField(required=False)
    duration_ns = serializers.IntegerField(min_value=1, required=False)
