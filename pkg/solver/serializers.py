from rest_framework import serializers


class PathSerializer(serializers.Serializer):
    """Serializer for a solution path."""

    status = serializers.CharField()
    cost = serializers.FloatField(allow_null=True)
    tour = serializers.ListField(child=serializers.IntegerField(min_value=0))
    consumptions = serializers.ListField(child=serializers.FloatField())
    elementary = serializers.BooleanField()


class SolveStatsSerializer(serializers.Serializer):
    """Serializer for solver statistics."""

    labels_fw = serializers.IntegerField()
    labels_bw = serializers.IntegerField()
    dominated_fw = serializers.IntegerField()
    dominated_bw = serializers.IntegerField()
    join_attempts = serializers.IntegerField()
    join_successes = serializers.IntegerField()
    iterations = serializers.IntegerField()
    relaxed_costs = serializers.ListField(child=serializers.FloatField(allow_null=True))
    incumbents = serializers.ListField(child=serializers.FloatField(allow_null=True))
    hwp_history = serializers.ListField(child=serializers.FloatField())
    phase_times = serializers.DictField(child=serializers.FloatField())


class SolveReportSerializer(serializers.Serializer):
    """Path plus statistics, the document written by the solve command."""

    path = PathSerializer()
    stats = SolveStatsSerializer()
    seed = serializers.IntegerField()
    telemetry = serializers.DictField(required=False)
