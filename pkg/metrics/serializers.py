from rest_framework import serializers


class CountSummarySerializer(serializers.Serializer):
    mae = serializers.FloatField(min_value=0.0)
    obo = serializers.FloatField(min_value=0.0, max_value=1.0)


class InterruptionSubsetSerializer(serializers.Serializer):
    n_videos = serializers.IntegerField(min_value=1)
    model = CountSummarySerializer()
    baseline = CountSummarySerializer(required=False)


class PerVideoSerializer(serializers.Serializer):
    id = serializers.CharField()
    gt_count = serializers.IntegerField(min_value=0)
    pred_count = serializers.FloatField()
    abs_error = serializers.FloatField(min_value=0.0)
    frame_acc = serializers.FloatField(min_value=0.0, max_value=100.0)
    edit = serializers.FloatField(min_value=0.0, max_value=100.0)
    f1_10 = serializers.FloatField(min_value=0.0, max_value=100.0)
    f1_25 = serializers.FloatField(min_value=0.0, max_value=100.0)
    f1_50 = serializers.FloatField(min_value=0.0, max_value=100.0)
    has_interruption = serializers.BooleanField()


class EvalReportSerializer(serializers.Serializer):
    """Renders and validates report.json."""
    split = serializers.CharField(allow_blank=True)
    n_videos = serializers.IntegerField(min_value=1)
    mae = serializers.FloatField(min_value=0.0)
    obo = serializers.FloatField(min_value=0.0, max_value=1.0)
    frame_acc = serializers.FloatField(min_value=0.0, max_value=100.0)
    edit = serializers.FloatField(min_value=0.0, max_value=100.0)
    f1 = serializers.DictField(child=serializers.FloatField(min_value=0.0, max_value=100.0))
    per_video = PerVideoSerializer(many=True)
    baseline = CountSummarySerializer(required=False, allow_null=True)
    interruption_subset = InterruptionSubsetSerializer(required=False, allow_null=True)

    def validate_f1(self, value):
        if sorted(value) != ['10', '25', '50']:
            raise serializers.ValidationError(f'expected F1 at thresholds 10, 25 and 50, got {sorted(value)}')
        return value
