from decimal import Decimal
from fractions import Fraction

from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers

from .models import Scenario
from .types import (
    NetworkGraph,
    Node,
    NodeRole,
    RadioConfig,
    Scenario as ScenarioSpec,
    SchedulerConfig,
    SimConfig,
    SimMode,
    FlowSpec,
    WiredLink,
)
from .utils import hyper_period, resolve_route

ID_PATTERN = r"^[A-Za-z][A-Za-z0-9]*$"


class StrictSerializer(serializers.Serializer):
    """Serializer base que rejeita chaves desconhecidas"""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError(
                    {key: ["Campo desconhecido."] for key in unknown}
                )
        return super().to_internal_value(data)


class NodeSerializer(StrictSerializer):
    id = serializers.RegexField(ID_PATTERN, max_length=64)
    role = serializers.ChoiceField(choices=[role.value for role in NodeRole])


class WiredLinkSerializer(StrictSerializer):
    a = serializers.RegexField(ID_PATTERN, max_length=64)
    b = serializers.RegexField(ID_PATTERN, max_length=64)
    rate_bps = serializers.IntegerField(min_value=1, default=100_000_000)
    prop_delay_ns = serializers.IntegerField(min_value=0, default=1_000)

    def validate(self, attrs):
        if attrs["a"] == attrs["b"]:
            raise serializers.ValidationError("Um enlace não pode ligar um nó a ele mesmo.")
        return attrs


class NetworkSerializer(StrictSerializer):
    nodes = NodeSerializer(many=True)
    links = WiredLinkSerializer(many=True)

    def validate(self, attrs):
        ids = [node["id"] for node in attrs["nodes"]]
        if len(ids) != len(set(ids)):
            raise serializers.ValidationError({"nodes": "Identificadores de nó duplicados."})

        roles = [node["role"] for node in attrs["nodes"]]
        for role in (NodeRole.GATEWAY, NodeRole.BASE_STATION):
            if roles.count(role) != 1:
                raise serializers.ValidationError(
                    {"nodes": f"A rede deve ter exatamente um nó com papel '{role}'."}
                )

        known = set(ids)
        seen = set()
        for link in attrs["links"]:
            for endpoint in (link["a"], link["b"]):
                if endpoint not in known:
                    raise serializers.ValidationError(
                        {"links": f"Nó desconhecido no enlace: {endpoint}"}
                    )
            pair = frozenset((link["a"], link["b"]))
            if pair in seen:
                raise serializers.ValidationError(
                    {"links": f"Enlace duplicado: {link['a']} - {link['b']}"}
                )
            seen.add(pair)
        if not attrs["links"]:
            raise serializers.ValidationError(
                {"links": "A rede precisa de pelo menos um enlace cabeado."}
            )
        return attrs


class RadioSerializer(StrictSerializer):
    tti_ns = serializers.IntegerField(min_value=1, default=62_500)
    k_max = serializers.IntegerField(min_value=1, default=10)
    t_proc_ttis = serializers.IntegerField(min_value=0, default=1)
    rb_bytes = serializers.IntegerField(min_value=1, default=96)
    rb_bytes_per_flow = serializers.DictField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=1)),
        required=False,
    )


class FlowSerializer(StrictSerializer):
    id = serializers.RegexField(ID_PATTERN, max_length=64)
    period_ns = serializers.IntegerField(min_value=1)
    length_bytes = serializers.IntegerField(min_value=1)
    deadline_ns = serializers.IntegerField(min_value=0)
    route = serializers.ListField(
        child=serializers.RegexField(ID_PATTERN, max_length=64), min_length=4
    )


class SchedulerSerializer(StrictSerializer):
    gamma = serializers.DecimalField(
        max_digits=8,
        decimal_places=6,
        min_value=Decimal("0"),
        max_value=Decimal("1"),
        default=Decimal("0.5"),
    )
    min_p_ns = serializers.IntegerField(min_value=1, default=100_000)
    big_m = serializers.ChoiceField(choices=["per_constraint"], default="per_constraint")
    tam_budget_ns = serializers.IntegerField(min_value=0, default=5_000)


class SimSerializer(StrictSerializer):
    mode = serializers.ChoiceField(choices=[mode.value for mode in SimMode], default="aam")
    jitter_ns = serializers.IntegerField(min_value=0, default=0)
    skew_ns = serializers.IntegerField(min_value=0, default=0)
    skew_offset_ns = serializers.IntegerField(required=False, allow_null=True, default=None)
    duration_ns = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, default=1)


class ScenarioDocumentSerializer(StrictSerializer):
    """Serializer for the scenario file, the single source of truth of a run"""

    name = serializers.CharField(max_length=200, required=False, default="scenario")
    description = serializers.CharField(required=False, allow_blank=True, default="")
    network = NetworkSerializer()
    radio = RadioSerializer(required=False)
    flows = FlowSerializer(many=True)
    scheduler = SchedulerSerializer(required=False)
    sim = SimSerializer(required=False)

    def to_internal_value(self, data):
        attrs = super().to_internal_value(data)
        for section, serializer_class in (
            ("radio", RadioSerializer),
            ("scheduler", SchedulerSerializer),
            ("sim", SimSerializer),
        ):
            if section not in attrs:
                defaults = serializer_class(data={})
                defaults.is_valid(raise_exception=True)
                attrs[section] = defaults.validated_data
        return attrs

    def validate(self, attrs):
        graph = self.build_graph(attrs["network"])
        try:
            graph.dataflow_links
        except DjangoValidationError as exc:
            raise serializers.ValidationError({"network": exc.messages})

        flow_ids = [flow["id"] for flow in attrs["flows"]]
        if len(flow_ids) != len(set(flow_ids)):
            raise serializers.ValidationError({"flows": "Identificadores de fluxo duplicados."})

        for flow in attrs["flows"]:
            try:
                resolve_route(graph, flow["route"])
            except DjangoValidationError as exc:
                raise serializers.ValidationError(
                    {"flows": f"{flow['id']}: {' '.join(exc.messages)}"}
                )

        try:
            hyper_period(flow["period_ns"] for flow in attrs["flows"])
        except DjangoValidationError as exc:
            raise serializers.ValidationError({"flows": exc.messages})

        radio = attrs["radio"]
        for flow_id, row in radio.get("rb_bytes_per_flow", {}).items():
            if flow_id not in flow_ids:
                raise serializers.ValidationError(
                    {"radio": f"rb_bytes_per_flow referencia fluxo desconhecido: {flow_id}"}
                )
            if len(row) != radio["k_max"]:
                raise serializers.ValidationError(
                    {"radio": f"rb_bytes_per_flow[{flow_id}] deve ter k_max entradas."}
                )

        sim = attrs["sim"]
        offset = sim.get("skew_offset_ns")
        if offset is not None and sim["skew_ns"] and abs(offset) * 2 > sim["skew_ns"]:
            raise serializers.ValidationError(
                {"sim": "|skew_offset_ns| deve ser no máximo skew_ns / 2."}
            )
        return attrs

    @staticmethod
    def build_graph(network: dict) -> NetworkGraph:
        return NetworkGraph(
            nodes=tuple(Node(node["id"], NodeRole(node["role"])) for node in network["nodes"]),
            wired_links=tuple(
                WiredLink(link["a"], link["b"], link["rate_bps"], link["prop_delay_ns"])
                for link in network["links"]
            ),
        )

    def to_scenario(self, digest: str = "") -> ScenarioSpec:
        """Converte os dados validados nos tipos de domínio imutáveis"""
        data = self.validated_data
        graph = self.build_graph(data["network"])
        radio = data["radio"]
        per_flow = radio.get("rb_bytes_per_flow", {})

        flows = tuple(
            FlowSpec(
                id=flow["id"],
                period_ns=flow["period_ns"],
                length_bytes=flow["length_bytes"],
                deadline_ns=flow["deadline_ns"],
                route=resolve_route(graph, flow["route"]),
                user_equipment=flow["route"][0],
            )
            for flow in data["flows"]
        )
        rb_rows = tuple(
            (flow.id, tuple(per_flow.get(flow.id, [radio["rb_bytes"]] * radio["k_max"])))
            for flow in flows
        )
        scheduler = data["scheduler"]
        sim = data["sim"]
        return ScenarioSpec(
            name=data["name"],
            network=graph,
            radio=RadioConfig(
                tti_ns=radio["tti_ns"],
                k_max=radio["k_max"],
                proc_delay_ns=radio["t_proc_ttis"] * radio["tti_ns"],
                rb_bytes=rb_rows,
            ),
            flows=flows,
            scheduler=SchedulerConfig(
                gamma=Fraction(scheduler["gamma"]),
                min_p_ns=scheduler["min_p_ns"],
                big_m=scheduler["big_m"],
                tam_budget_ns=scheduler["tam_budget_ns"],
            ),
            sim=SimConfig(
                mode=SimMode(sim["mode"]),
                jitter_ns=sim["jitter_ns"],
                skew_ns=sim["skew_ns"],
                skew_offset_ns=sim.get("skew_offset_ns"),
                duration_ns=sim.get("duration_ns"),
                seed=sim["seed"],
            ),
            digest=digest,
        )


class ScenarioSerializer(serializers.ModelSerializer):
    """Serializer for Scenario model with all fields"""

    class Meta:
        model = Scenario
        fields = [
            "id",
            "name",
            "description",
            "document",
            "digest",
            "flow_count",
            "created_at",
            "updated_at",
        ]
        read_only_fields = ["id", "digest", "flow_count", "created_at", "updated_at"]

    def validate_document(self, value):
        document = ScenarioDocumentSerializer(data=value)
        document.is_valid(raise_exception=True)
        return value


class ScenarioListSerializer(serializers.ModelSerializer):
    """Serializer for listing scenarios with essential fields"""

    class Meta:
        model = Scenario
        fields = ["id", "name", "digest", "flow_count", "created_at"]
        read_only_fields = fields


class ScenarioValidationSerializer(serializers.Serializer):
    """Serializer for the validation summary of a scenario document"""

    valid = serializers.BooleanField()
    digest = serializers.CharField()
    flow_count = serializers.IntegerField()
    dataflow_link_count = serializers.IntegerField()
    hyper_period_ns = serializers.IntegerField()
