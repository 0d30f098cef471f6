from http import HTTPStatus

from django.conf import settings
from drf_spectacular.utils import extend_schema
from rest_framework.generics import ListCreateAPIView, RetrieveDestroyAPIView
from rest_framework.response import Response
from rest_framework.views import APIView

from shapes.exceptions import ShapeError, UnknownModelError
from shapes.metrics import MetricKind
from shapes.models import ShapeModel
from shapes.permissions import IsStaffOrReadOnly
from shapes.retrieval import pair_distance, two_stage_hits
from shapes.serializers import (
    DistanceSerializer, EmbedSerializer, QuerySerializer, RankedHitSerializer, ShapeDetailSerializer,
    ShapeModelSerializer,
)


def error_response(exc):
    if isinstance(exc, UnknownModelError):
        return Response({'status': HTTPStatus.NOT_FOUND, 'message': str(exc)}, status=HTTPStatus.NOT_FOUND)
    return Response({'status': HTTPStatus.BAD_REQUEST, 'message': str(exc)}, status=HTTPStatus.BAD_REQUEST)


@extend_schema(tags=['shapes'])
class ShapeListCreateAPIView(ListCreateAPIView):
    queryset = ShapeModel.objects.all()
    serializer_class = ShapeModelSerializer
    permission_classes = [IsStaffOrReadOnly]


@extend_schema(tags=['shapes'])
class ShapeDetailAPIView(RetrieveDestroyAPIView):
    queryset = ShapeModel.objects.prefetch_related('embeddings')
    serializer_class = ShapeDetailSerializer
    permission_classes = [IsStaffOrReadOnly]
    lookup_field = 'model_id'


@extend_schema(tags=['retrieval'], request=EmbedSerializer)
class EmbedAPIView(APIView):
    permission_classes = [IsStaffOrReadOnly]

    def post(self, request, *args, **kwargs):
        serializer = EmbedSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        try:
            summary = serializer.save()
        except ShapeError as exc:
            return error_response(exc)
        return Response({'status': HTTPStatus.CREATED, 'message': summary}, status=HTTPStatus.CREATED)


@extend_schema(tags=['retrieval'], parameters=[QuerySerializer], responses=RankedHitSerializer(many=True))
class QueryAPIView(APIView):
    def get(self, request, model_id, *args, **kwargs):
        serializer = QuerySerializer(data=request.query_params)
        serializer.is_valid(raise_exception=True)
        params = serializer.validated_data
        try:
            db = ShapeModel.objects.to_database()
            db.entry(model_id)
            candidates = params.get('candidates') or max(
                1, round(settings.SHAPES['DEFAULT_CANDIDATE_FRACTION'] * (len(db) - 1)),
            )
            hits = two_stage_hits(model_id, db, params['transform'], params['metric'], params.get('k'), candidates)
        except ShapeError as exc:
            return error_response(exc)
        return Response({'status': HTTPStatus.OK, 'message': RankedHitSerializer(hits, many=True).data})


@extend_schema(tags=['retrieval'], request=DistanceSerializer)
class DistanceAPIView(APIView):
    def post(self, request, *args, **kwargs):
        serializer = DistanceSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        params = serializer.validated_data
        try:
            db = ShapeModel.objects.to_database()
            metric = MetricKind(params['metric'])
            transform = params.get('transform') if metric.is_coefficient else None
            k = db.resolve_k(transform, params.get('k')) if transform else None
            distance = pair_distance(db.entry(params['first']), db.entry(params['second']), metric, transform, k)
        except ShapeError as exc:
            return error_response(exc)
        return Response({'status': HTTPStatus.OK, 'message': {'distance': distance}})
