from django.db import transaction
from rest_framework import serializers
from rest_framework.exceptions import ValidationError
from rest_framework.serializers import ModelSerializer, Serializer

from shapes.diagram import parse_diagram, serialize_diagram
from shapes.exceptions import ShapeError
from shapes.metrics import MetricKind
from shapes.models import Embedding, ShapeModel
from shapes.retrieval import embed_database
from shapes.transforms import TransformKind
from shapes.viete import database_width, default_k

TRANSFORM_CHOICES = [kind.value for kind in TransformKind]
COEFFICIENT_METRIC_CHOICES = [MetricKind.D1.value, MetricKind.D2.value, MetricKind.D3.value]
METRIC_CHOICES = [kind.value for kind in MetricKind]
RESERVED_MODEL_IDS = ('embed', 'distance')


class EmbeddingSerializer(ModelSerializer):
    class Meta:
        model = Embedding
        fields = ('transform', 'width', 'k', 'coefficients')


class ShapeModelSerializer(ModelSerializer):
    point_count = serializers.SerializerMethodField()

    class Meta:
        model = ShapeModel
        fields = ('id', 'model_id', 'label', 'diagram', 'essential_count', 'filter_kind', 'point_count', 'created_at')
        read_only_fields = ('id', 'essential_count', 'created_at')

    def get_point_count(self, obj):
        return obj.to_diagram().total_multiplicity

    def validate_model_id(self, value):
        if value in RESERVED_MODEL_IDS:
            raise ValidationError(f"'{value}' is a reserved route name")
        return value

    def validate_diagram(self, value):
        try:
            return serialize_diagram(parse_diagram(value))
        except ShapeError as exc:
            raise ValidationError(str(exc))

    def validate(self, attrs):
        if 'diagram' in attrs:
            attrs['essential_count'] = parse_diagram(attrs['diagram']).essential_count
        return attrs


class ShapeDetailSerializer(ShapeModelSerializer):
    embeddings = EmbeddingSerializer(many=True, read_only=True)

    class Meta(ShapeModelSerializer.Meta):
        fields = ShapeModelSerializer.Meta.fields + ('embeddings',)


class EmbedSerializer(Serializer):
    transform = serializers.ChoiceField(choices=TRANSFORM_CHOICES)
    k = serializers.IntegerField(min_value=1, required=False)

    def save(self, **kwargs):
        transform = TransformKind(self.validated_data['transform'])
        db = ShapeModel.objects.to_database()
        width = max(database_width(db.diagrams()), 1)
        k = self.validated_data.get('k') or default_k(width)
        if k > width:
            raise ValidationError({'k': f"k must not exceed the database width M={width}"})
        embedded = embed_database(db, transform, k, width)
        shapes = {shape.model_id: shape for shape in ShapeModel.objects.all()}
        with transaction.atomic():
            Embedding.objects.filter(transform=transform.value).delete()
            Embedding.objects.bulk_create([
                Embedding(
                    shape=shapes[entry.model_id], transform=transform.value, width=width, k=k,
                    coefficients=Embedding.pairs_from_vector(entry.vector(transform, k)),
                )
                for entry in embedded.entries
            ])
        return {'transform': transform.value, 'width': width, 'k': k, 'count': len(embedded)}


class QuerySerializer(Serializer):
    transform = serializers.ChoiceField(choices=TRANSFORM_CHOICES)
    metric = serializers.ChoiceField(choices=COEFFICIENT_METRIC_CHOICES)
    k = serializers.IntegerField(min_value=1, required=False)
    candidates = serializers.IntegerField(min_value=1, required=False)


class DistanceSerializer(Serializer):
    first = serializers.CharField(max_length=255)
    second = serializers.CharField(max_length=255)
    metric = serializers.ChoiceField(choices=METRIC_CHOICES)
    transform = serializers.ChoiceField(choices=TRANSFORM_CHOICES, required=False)
    k = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        if attrs['metric'] != MetricKind.BOTTLENECK.value and 'transform' not in attrs:
            raise ValidationError({'transform': "Coefficient metrics need a transform"})
        return attrs


class RankedHitSerializer(Serializer):
    model_id = serializers.CharField()
    prefilter_distance = serializers.FloatField()
    bottleneck_distance = serializers.FloatField(allow_null=True)
