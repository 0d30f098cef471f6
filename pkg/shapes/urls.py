from django.urls import path

from shapes.views import DistanceAPIView, EmbedAPIView, QueryAPIView, ShapeDetailAPIView, ShapeListCreateAPIView


# --------------------- Shapes ---------------
urlpatterns = [
    path('shapes', ShapeListCreateAPIView.as_view(), name='shape-list-create'),
    path('shapes/embed', EmbedAPIView.as_view(), name='shape-embed'),
    path('shapes/distance', DistanceAPIView.as_view(), name='shape-distance'),
    path('shapes/<str:model_id>', ShapeDetailAPIView.as_view(), name='shape-detail'),
    path('shapes/<str:model_id>/query', QueryAPIView.as_view(), name='shape-query'),
]
