from rest_framework import serializers

from network.conf import get_setting
from network.exceptions import CacheNetError
from network.system import DEMAND_MODES, MAX_SEED, SystemParams, as_fraction

from .models import ExperimentRun
from .schemes import Scheme

SCHEME_KINDS = ('up', 'rlfu', 'rap', 'sup')
RUN_KINDS = ('analytical', 'empirical', 'both')
GRID_AXES = ('n', 'm', 'M', 'L', 'B', 'alpha', 'm_tilde', 'mode')


class RationalField(serializers.Field):
    """Cache sizes: integers, decimals or 'a/b' strings, kept exact."""
    default_error_messages = {
        'invalid': 'A non-negative rational number is required.',
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        try:
            value = as_fraction(data)
        except CacheNetError:
            self.fail('invalid')
        if value < 0:
            self.fail('invalid')
        return value

    def to_representation(self, value):
        return int(value) if value.denominator == 1 else float(value)


class ExperimentConfigSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=1)
    m = serializers.IntegerField(min_value=1)
    M = RationalField()
    L = serializers.IntegerField(min_value=1)
    B = serializers.IntegerField(min_value=1, default=1)
    alpha = serializers.FloatField(min_value=0, required=False)
    q_file = serializers.CharField(required=False)
    q = serializers.ListField(child=serializers.FloatField(min_value=0), required=False, allow_empty=False)
    mode = serializers.ChoiceField(choices=DEMAND_MODES, default='iid')
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED - 1, required=False)
    scheme = serializers.ChoiceField(choices=SCHEME_KINDS, default='up')
    m_tilde = serializers.IntegerField(min_value=1, required=False)
    p = serializers.ListField(child=serializers.FloatField(min_value=0), required=False, allow_empty=False)
    trials = serializers.IntegerField(min_value=1, required=False)
    scaled_cached_mass = serializers.BooleanField(default=False)
    field_bits = serializers.IntegerField(min_value=1, max_value=32, required=False)

    def validate(self, attrs):
        sources = [key for key in ('alpha', 'q_file', 'q') if key in attrs]
        if len(sources) > 1:
            raise serializers.ValidationError(f'give at most one of alpha, q_file, q; got {", ".join(sources)}')
        attrs.setdefault('seed', get_setting('DEFAULT_SEED'))
        attrs.setdefault('trials', get_setting('DEFAULT_TRIALS'))
        attrs.setdefault('field_bits', get_setting('FIELD_BITS'))
        try:
            SystemParams(n=attrs['n'], m=attrs['m'], M=attrs['M'], L=attrs['L'], B=attrs['B'], seed=attrs['seed'])
        except CacheNetError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        if 'q' in attrs and len(attrs['q']) != attrs['m']:
            raise serializers.ValidationError({'q': f'expected {attrs["m"]} probabilities, got {len(attrs["q"])}'})

        scheme = attrs['scheme']
        if scheme == 'rap' and 'p' not in attrs:
            raise serializers.ValidationError({'p': 'the rap scheme needs a caching distribution p'})
        if 'p' in attrs and len(attrs['p']) != attrs['m']:
            raise serializers.ValidationError({'p': f'expected {attrs["m"]} probabilities, got {len(attrs["p"])}'})
        if scheme == 'sup' and (attrs['B'] != 1 or attrs['M'].denominator != 1):
            raise serializers.ValidationError({'scheme': 'sup stores whole files: it needs B=1 and an integer M'})
        if 'm_tilde' in attrs and not attrs['M'] <= attrs['m_tilde'] <= attrs['m']:
            raise serializers.ValidationError({'m_tilde': f'cut-off must lie in [M, m] = [{attrs["M"]}, {attrs["m"]}]'})
        return attrs


class SweepConfigSerializer(serializers.Serializer):
    base = serializers.DictField()
    grid = serializers.DictField(child=serializers.ListField(allow_empty=True), default=dict)
    schemes = serializers.ListField(child=serializers.CharField(), default=['up'], allow_empty=False)
    run = serializers.ChoiceField(choices=RUN_KINDS, default='analytical')
    trials = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED - 1, required=False)

    def validate_grid(self, value):
        unknown = sorted(set(value) - set(GRID_AXES))
        if unknown:
            raise serializers.ValidationError(f'unknown grid axes: {", ".join(unknown)}')
        return value

    def validate_schemes(self, value):
        for text in value:
            try:
                Scheme.parse(text)
            except CacheNetError as exc:
                raise serializers.ValidationError(str(exc)) from exc
        return value


class ExperimentRunSerializer(serializers.ModelSerializer):
    duration_seconds = serializers.SerializerMethodField()

    class Meta:
        model = ExperimentRun
        fields = (
            'id', 'command', 'scheme', 'parameters', 'seed', 'trials', 'mean_rate', 'std_error',
            'bounds', 'output_path', 'status', 'started_at', 'completed_at', 'error_message', 'duration_seconds',
        )
        read_only_fields = fields

    def get_duration_seconds(self, obj):
        return obj.duration.total_seconds()
