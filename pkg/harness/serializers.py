from rest_framework import serializers

from fusion.integration import MODES, FusionConfig
from mpr.branch import VARIANTS, MprConfig
from rfl.branch import RflConfig
from supervision.losses import LossConfig
from synthgen.serializers import GenConfigSerializer
from utils.seeding import MAX_SEED

from .config import DataConfig, OptimConfig, PathsConfig, RunConfig


class PathsSerializer(serializers.Serializer):
    data_dir = serializers.CharField(allow_blank=True, default='')
    out_dir = serializers.CharField(allow_blank=True, default='')


class MprConfigSerializer(serializers.Serializer):
    defaults = MprConfig()

    scale_orders = serializers.ListField(
        child=serializers.IntegerField(min_value=1), min_length=1, default=list(defaults.scale_orders),
    )
    dilation_rates = serializers.ListField(
        child=serializers.IntegerField(min_value=1), default=list(defaults.dilation_rates),
    )
    attention_heads = serializers.IntegerField(min_value=1, default=defaults.attention_heads)
    out_channels = serializers.IntegerField(min_value=1, default=defaults.out_channels)
    variant = serializers.ChoiceField(choices=list(VARIANTS), default=defaults.variant)

    def validate_scale_orders(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('scale orders must be distinct')
        return value


class RflConfigSerializer(serializers.Serializer):
    defaults = RflConfig()

    n_blocks = serializers.IntegerField(min_value=1, default=defaults.n_blocks)
    channels = serializers.IntegerField(min_value=1, default=defaults.channels)
    kernel_size = serializers.IntegerField(min_value=1, default=defaults.kernel_size)
    dilation_base = serializers.IntegerField(min_value=1, default=defaults.dilation_base)

    def validate_kernel_size(self, value):
        if value % 2 == 0:
            raise serializers.ValidationError('kernel size must be odd')
        return value


class FusionConfigSerializer(serializers.Serializer):
    defaults = FusionConfig()

    mode = serializers.ChoiceField(choices=list(MODES), default=defaults.mode)
    fused_dim = serializers.IntegerField(min_value=2, default=defaults.fused_dim)
    predictor_layers = serializers.IntegerField(min_value=1, default=defaults.predictor_layers)
    predictor_heads = serializers.IntegerField(min_value=1, default=defaults.predictor_heads)
    ffn_multiplier = serializers.IntegerField(min_value=1, default=defaults.ffn_multiplier)

    def validate(self, data):
        if data['fused_dim'] % 2:
            raise serializers.ValidationError({'fused_dim': 'must be even'})
        if data['fused_dim'] % data['predictor_heads']:
            raise serializers.ValidationError({'predictor_heads': f"must divide fused_dim {data['fused_dim']}"})
        return data


class LossConfigSerializer(serializers.Serializer):
    defaults = LossConfig()

    alpha = serializers.FloatField(min_value=0.0, default=defaults.alpha)
    margin = serializers.FloatField(min_value=0.0, default=defaults.margin)
    max_triplets = serializers.IntegerField(min_value=0, default=defaults.max_triplets)
    use_loc = serializers.BooleanField(default=defaults.use_loc)
    use_tri = serializers.BooleanField(default=defaults.use_tri)
    use_den = serializers.BooleanField(default=defaults.use_den)

    def validate(self, data):
        if not (data['use_loc'] or data['use_tri'] or data['use_den']):
            raise serializers.ValidationError('at least one of use_loc, use_tri and use_den must be true')
        return data


class OptimConfigSerializer(serializers.Serializer):
    defaults = OptimConfig()

    lr = serializers.FloatField(min_value=0.0, default=defaults.lr)
    betas = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=0.999999),
        min_length=2, max_length=2, default=list(defaults.betas),
    )
    eps = serializers.FloatField(min_value=0.0, default=defaults.eps)
    epochs = serializers.IntegerField(min_value=1, default=defaults.epochs)
    batch_size = serializers.IntegerField(min_value=1, default=defaults.batch_size)

    def validate_lr(self, value):
        if value <= 0:
            raise serializers.ValidationError('must be positive')
        return value


class DataConfigSerializer(serializers.Serializer):
    defaults = DataConfig()

    n_train = serializers.IntegerField(min_value=1, default=defaults.n_train)
    n_val = serializers.IntegerField(min_value=0, default=defaults.n_val)
    n_test = serializers.IntegerField(min_value=0, default=defaults.n_test)


class RunConfigSerializer(serializers.Serializer):
    """Validates a RunConfig document; missing sections take their defaults."""
    SECTIONS = {
        'paths': (PathsSerializer, PathsConfig),
        'gen': (GenConfigSerializer, None),
        'mpr': (MprConfigSerializer, MprConfig),
        'rfl': (RflConfigSerializer, RflConfig),
        'fusion': (FusionConfigSerializer, FusionConfig),
        'loss': (LossConfigSerializer, LossConfig),
        'optim': (OptimConfigSerializer, OptimConfig),
        'data': (DataConfigSerializer, DataConfig),
    }

    paths = PathsSerializer(required=False)
    gen = GenConfigSerializer(required=False)
    mpr = MprConfigSerializer(required=False)
    rfl = RflConfigSerializer(required=False)
    fusion = FusionConfigSerializer(required=False)
    loss = LossConfigSerializer(required=False)
    optim = OptimConfigSerializer(required=False)
    data = DataConfigSerializer(required=False)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)

    def validate(self, data):
        unknown = set(self.initial_data) - set(self.fields)
        if unknown:
            raise serializers.ValidationError(f'unknown sections {sorted(unknown)}')
        return data

    def create(self, validated_data):
        sections = {}
        for name, (serializer_class, config_class) in self.SECTIONS.items():
            # absent sections still pass through their serializer for defaults
            values = validated_data.get(name)
            if values is None:
                section = serializer_class(data={})
                section.is_valid(raise_exception=True)
                values = section.validated_data
            values = dict(values)
            sections[name] = GenConfigSerializer().create(values) if config_class is None else config_class(**values)
        return RunConfig(seed=validated_data['seed'], **sections)
