from rest_framework import serializers

from .sequences import GenConfig


class RangeField(serializers.ListField):
    """A [min, max] pair of non-negative integers."""

    def __init__(self, **kwargs):
        kwargs.setdefault('child', serializers.IntegerField(min_value=0))
        kwargs.setdefault('min_length', 2)
        kwargs.setdefault('max_length', 2)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        low, high = super().to_internal_value(data)
        if low > high:
            raise serializers.ValidationError(f'min must not exceed max, got [{low}, {high}]')
        return (low, high)


class GenConfigSerializer(serializers.Serializer):
    defaults = GenConfig()

    seq_len = serializers.IntegerField(min_value=1, default=defaults.seq_len)
    embed_dim = serializers.IntegerField(min_value=1, default=defaults.embed_dim)
    cycle_len_range = RangeField(default=list(defaults.cycle_len_range))
    n_cycles_range = RangeField(default=list(defaults.n_cycles_range))
    interruption_prob = serializers.FloatField(min_value=0.0, max_value=1.0, default=defaults.interruption_prob)
    interruption_len_range = RangeField(default=list(defaults.interruption_len_range))
    noise_sigma = serializers.FloatField(min_value=0.0, default=defaults.noise_sigma)
    lead_tail_range = RangeField(default=list(defaults.lead_tail_range))
    seed = serializers.IntegerField(min_value=0, default=defaults.seed)

    def validate_cycle_len_range(self, value):
        if value[0] < 1:
            raise serializers.ValidationError('cycles need at least one frame')
        return value

    def validate_n_cycles_range(self, value):
        if value[0] < 1:
            raise serializers.ValidationError('at least one cycle per sequence is required')
        return value

    def create(self, validated_data):
        return GenConfig(**validated_data)


class AnnotationFileSerializer(serializers.Serializer):
    id = serializers.CharField()
    count = serializers.IntegerField(min_value=0)
    cycles = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, max_length=2),
    )

    def validate(self, data):
        if data['count'] != len(data['cycles']):
            raise serializers.ValidationError(
                f"count {data['count']} does not match {len(data['cycles'])} annotated cycles"
            )
        return data


class ManifestEntrySerializer(serializers.Serializer):
    id = serializers.CharField()
    embeddings = serializers.CharField()
    annotations = serializers.CharField()
    count = serializers.IntegerField(min_value=0)


class ManifestSerializer(serializers.Serializer):
    format = serializers.ChoiceField(choices=['lmrl-dataset'])
    version = serializers.IntegerField(min_value=1, max_value=1)
    gen_config = GenConfigSerializer()
    splits = serializers.DictField(child=ManifestEntrySerializer(many=True))
    total_count = serializers.IntegerField(min_value=0)

    def validate(self, data):
        listed = sum(entry['count'] for entries in data['splits'].values() for entry in entries)
        if listed != data['total_count']:
            raise serializers.ValidationError(
                f"total_count {data['total_count']} does not match the {listed} cycles listed per sequence"
            )
        return data
