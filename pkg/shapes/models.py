import numpy as np
from django.db.models import (
    CASCADE, CharField, DateTimeField, ForeignKey, JSONField, Manager, Model, PositiveIntegerField, TextChoices,
    TextField,
)

from shapes.diagram import parse_diagram
from shapes.retrieval import DatabaseEntry, LabeledDatabase
from shapes.transforms import TransformKind
from shapes.viete import CoefficientVector


class ShapeManager(Manager):
    def to_database(self):
        """Stored shapes with their diagrams and every stored embedding, ordered by model id."""
        entries = []
        for shape in self.get_queryset().prefetch_related('embeddings').order_by('model_id'):
            embeddings = {
                (TransformKind(embedding.transform), embedding.k): embedding.to_vector()
                for embedding in shape.embeddings.all()
            }
            entries.append(DatabaseEntry(shape.model_id, shape.label, shape.to_diagram(), embeddings))
        return LabeledDatabase(tuple(entries))


class ShapeModel(Model):
    class FilterChoices(TextChoices):
        LINE = 'line', 'Distance from line'
        PLANE = 'plane', 'Distance from plane'
        UNKNOWN = 'unknown', 'Unknown'

    model_id = CharField(max_length=255, unique=True)
    label = CharField(max_length=255)
    diagram = TextField()
    essential_count = PositiveIntegerField(default=0)
    filter_kind = CharField(max_length=20, choices=FilterChoices.choices, default=FilterChoices.UNKNOWN)
    created_at = DateTimeField(auto_now_add=True)
    objects = ShapeManager()

    class Meta:
        ordering = ('model_id',)

    def __str__(self):
        return f"{self.model_id} - {self.label}"

    def to_diagram(self):
        return parse_diagram(self.diagram)


class Embedding(Model):
    class TransformChoices(TextChoices):
        R = 'R', 'u + iv'
        S = 'S', 'Diagonal-scaled'
        T = 'T', 'Diagonal-scaled rotation'

    shape = ForeignKey('shapes.ShapeModel', on_delete=CASCADE, related_name='embeddings')
    transform = CharField(max_length=1, choices=TransformChoices.choices)
    width = PositiveIntegerField()
    k = PositiveIntegerField()
    coefficients = JSONField()
    created_at = DateTimeField(auto_now_add=True)

    class Meta:
        unique_together = ('shape', 'transform', 'k')

    def __str__(self):
        return f"{self.shape.model_id} - {self.transform} - M={self.width} k={self.k}"

    def to_vector(self):
        pairs = np.array(self.coefficients, dtype=float).reshape(-1, 2)
        return CoefficientVector(pairs[:, 0] + 1j * pairs[:, 1], self.width)

    @staticmethod
    def pairs_from_vector(vector):
        return [[float(value.real), float(value.imag)] for value in vector.coefficients]
