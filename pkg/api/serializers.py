from rest_framework import serializers

from .models import SuiteRun
from .services import codec
from .services.errors import CalculusError
from .services.partitions import PartitionFamily, SetPartition
from .services.suites import SUITES
from .services.weingarten import QuantumGroup

FAMILY_CHOICES = [family.value for family in PartitionFamily]
GROUP_CHOICES = [group.label for group in QuantumGroup]


class RationalField(serializers.Field):
    """Exact rationals as "p/q" strings; integers are accepted on input."""

    default_error_messages = {'invalid': 'Expected a rational such as "3" or "-1/20".'}

    def to_internal_value(self, data):
        try:
            return codec.parse_rational(data)
        except CalculusError:
            self.fail('invalid')

    def to_representation(self, value):
        return codec.format_rational(value)


class PartitionField(serializers.CharField):
    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            SetPartition.parse(text)
        except CalculusError as e:
            raise serializers.ValidationError(str(e))
        return text


class ElementField(serializers.ListField):
    """A square matrix of rationals."""

    child = serializers.ListField(child=RationalField(), allow_empty=False)

    def to_internal_value(self, data):
        rows = super().to_internal_value(data)
        if any(len(row) != len(rows) for row in rows):
            raise serializers.ValidationError('B elements must be square.')
        return rows


class PartitionQuerySerializer(serializers.Serializer):
    family = serializers.ChoiceField(choices=FAMILY_CHOICES, default='nc')
    k = serializers.IntegerField(min_value=0)


class WeingartenQuerySerializer(serializers.Serializer):
    group = serializers.ChoiceField(choices=GROUP_CHOICES)
    k = serializers.IntegerField(min_value=0)
    n = serializers.IntegerField(min_value=1)


class IntegrateSerializer(serializers.Serializer):
    group = serializers.ChoiceField(choices=GROUP_CHOICES)
    n = serializers.IntegerField(min_value=1)
    i = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=True)
    j = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=True)

    def validate(self, data):
        if len(data['i']) != len(data['j']):
            raise serializers.ValidationError('i and j must have the same length.')
        if any(index > data['n'] for index in data['i'] + data['j']):
            raise serializers.ValidationError(f"indices must lie in 1..{data['n']}.")
        return data


class MomentEntrySerializer(serializers.Serializer):
    word = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    pattern = PartitionField(required=False)
    indices = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False)
    value = RationalField()

    def validate(self, data):
        if ('pattern' in data) == ('indices' in data):
            raise serializers.ValidationError('Give exactly one of pattern or indices.')
        return data


class MomentArraySerializer(serializers.Serializer):
    s = serializers.IntegerField(min_value=1)
    n = serializers.IntegerField(min_value=1, allow_null=True, required=False)
    k_max = serializers.IntegerField(min_value=1)
    compressed = serializers.BooleanField(default=False)
    entries = MomentEntrySerializer(many=True)

    def validate(self, data):
        key = 'pattern' if data['compressed'] else 'indices'
        if any(key not in entry for entry in data['entries']):
            raise serializers.ValidationError(f"{'Compressed' if data['compressed'] else 'Expanded'} moments need {key}.")
        if not data['compressed'] and data.get('n') is None:
            raise serializers.ValidationError('Expanded moments need n.')
        return data


class CumulantEntrySerializer(serializers.Serializer):
    word = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    interior = serializers.ListField(child=serializers.IntegerField(min_value=0), default=list)
    value = ElementField()


class DistributionSpecSerializer(serializers.Serializer):
    d = serializers.IntegerField(min_value=1)
    s = serializers.IntegerField(min_value=1)
    K = serializers.IntegerField(min_value=1)
    involution = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    entries = CumulantEntrySerializer(many=True, default=list)


class EntryCumulantSerializer(serializers.Serializer):
    letters = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=3, max_length=3),
        allow_empty=False,
    )
    interior = serializers.ListField(child=serializers.IntegerField(min_value=0), default=list)
    value = ElementField()


class MatrixFamilySerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=1)
    d = serializers.IntegerField(min_value=1)
    s = serializers.IntegerField(min_value=1)
    K = serializers.IntegerField(min_value=1)
    involution = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    entries = EntryCumulantSerializer(many=True, default=list)


class InvarianceRequestSerializer(serializers.Serializer):
    group = serializers.ChoiceField(choices=GROUP_CHOICES)
    moments = MomentArraySerializer(required=False)
    family = MatrixFamilySerializer(required=False)
    k_max = serializers.IntegerField(min_value=1, required=False)

    def validate(self, data):
        if ('moments' in data) == ('family' in data):
            raise serializers.ValidationError('Give exactly one of moments or family.')
        if 'family' in data and 'k_max' not in data:
            raise serializers.ValidationError({'k_max': ['Required when a family is given.']})
        return data


class DivisibilityRequestSerializer(serializers.Serializer):
    base = DistributionSpecSerializer()
    n = serializers.IntegerField(min_value=1)


class VerifyRequestSerializer(serializers.Serializer):
    suite = serializers.ChoiceField(choices=sorted(SUITES))
    params = serializers.DictField(required=False, default=dict)


class SuiteRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = SuiteRun
        fields = '__all__'
        read_only_fields = ('item_count', 'failed_count', 'passed', 'created_at')
