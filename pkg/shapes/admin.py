from django.contrib import admin

from shapes.models import Embedding, ShapeModel


@admin.register(ShapeModel)
class ShapeModelAdmin(admin.ModelAdmin):
    list_display = ('model_id', 'label', 'filter_kind', 'essential_count', 'created_at')
    list_filter = ('label', 'filter_kind')
    search_fields = ('model_id',)


@admin.register(Embedding)
class EmbeddingAdmin(admin.ModelAdmin):
    list_display = ('shape', 'transform', 'width', 'k', 'created_at')
    list_filter = ('transform', 'k')
