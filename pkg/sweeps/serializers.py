import math

from rest_framework import serializers

from core.services.params import INFINITE, STRATEGIES, DomainError, parse_level
from sweeps.models import SweepJob
from sweeps.services.grid import METRICS, REQUIRED_FIXED, ReportRow, SweepSpec


class LevelOrRealField(serializers.Field):
    """Numbers pass through, INFINITE travels as the string "inf"."""

    default_error_messages = {"invalid": "Expected a number, 'inf' or a label."}

    def to_representation(self, value):
        if isinstance(value, float):
            if math.isinf(value):
                return "inf"
            if math.isnan(value):
                return None
        return value

    def to_internal_value(self, data):
        if data == "inf":
            return INFINITE
        if isinstance(data, bool):
            self.fail("invalid")
        if isinstance(data, (int, float, str)):
            return data
        self.fail("invalid")


class SweepSpecSerializer(serializers.Serializer):
    metric = serializers.ChoiceField(choices=METRICS)
    alpha_start = serializers.FloatField()
    alpha_stop = serializers.FloatField()
    alpha_step = serializers.FloatField()
    gamma_start = serializers.FloatField()
    gamma_stop = serializers.FloatField()
    gamma_step = serializers.FloatField()
    level = serializers.CharField(required=False, allow_null=True)
    k = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    strategy = serializers.ChoiceField(choices=STRATEGIES, required=False, allow_null=True)

    def validate(self, attrs):
        errors = {}
        for axis in ("alpha", "gamma"):
            start, stop, step = attrs[f"{axis}_start"], attrs[f"{axis}_stop"], attrs[f"{axis}_step"]
            if step <= 0:
                errors[f"{axis}_step"] = "step must be > 0"
            if stop < start:
                errors[f"{axis}_stop"] = "stop must be >= start"
        if not (0 < attrs["alpha_start"] and attrs["alpha_stop"] < 0.5):
            errors["alpha_start"] = "alpha range must lie strictly inside (0, 0.5)"
        if not (0 <= attrs["gamma_start"] and attrs["gamma_stop"] <= 1):
            errors["gamma_start"] = "gamma range must lie inside [0, 1]"
        for name in REQUIRED_FIXED[attrs["metric"]]:
            if attrs.get(name) is None:
                errors[name] = f"required by metric {attrs['metric']}"
        if attrs.get("level") is not None:
            try:
                attrs["level"] = parse_level(attrs["level"])
            except DomainError as exc:
                errors["level"] = str(exc)
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def create(self, validated_data):
        fixed = {
            name: validated_data[name]
            for name in ("level", "k", "strategy")
            if validated_data.get(name) is not None
        }
        return SweepSpec(
            alpha_range=(validated_data["alpha_start"], validated_data["alpha_stop"], validated_data["alpha_step"]),
            gamma_range=(validated_data["gamma_start"], validated_data["gamma_stop"], validated_data["gamma_step"]),
            metric=validated_data["metric"],
            fixed=fixed,
        )


class ReportRowSerializer(serializers.Serializer):
    alpha = serializers.FloatField()
    gamma = serializers.FloatField()
    value = LevelOrRealField()
    aux = serializers.DictField(child=LevelOrRealField(), required=False)

    def create(self, validated_data):
        return ReportRow(
            alpha=validated_data["alpha"],
            gamma=validated_data["gamma"],
            value=validated_data["value"],
            aux=dict(validated_data.get("aux") or {}),
        )


class SweepJobSerializer(serializers.ModelSerializer):
    class Meta:
        model = SweepJob
        fields = [
            "id",
            "status",
            "output_format",
            "output_path",
            "summary_json",
            "created_at",
            "started_at",
            "finished_at",
            "error_message",
        ]


def error_text(errors):
    parts = []
    for name, messages in errors.items():
        if isinstance(messages, (list, tuple)):
            messages = " ".join(str(message) for message in messages)
        parts.append(f"{name}: {messages}")
    return "; ".join(parts)


def parse_spec(data):
    serializer = SweepSpecSerializer(data=data)
    if not serializer.is_valid():
        raise DomainError(f"invalid sweep: {error_text(serializer.errors)}")
    return serializer.save()


def parse_rows(items):
    serializer = ReportRowSerializer(data=items, many=True)
    if not serializer.is_valid():
        raise DomainError("invalid report rows")
    return serializer.save()
