from rest_framework import serializers

from telemetry.models import REPORT_SCHEMA_VERSION


class TelemetryReportSerializer(serializers.Serializer):
    """Serializer for run statistics."""

    schema_version = serializers.IntegerField(default=REPORT_SCHEMA_VERSION)
    counters = serializers.DictField(child=serializers.IntegerField(min_value=0))
    timers = serializers.DictField(child=serializers.FloatField(min_value=0), required=False)
