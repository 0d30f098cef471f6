import pytest
from django.contrib.auth.hashers import make_password
from django.contrib.auth.models import User
from rest_framework.test import APIClient

from shapes.diagram import parse_diagram
from shapes.metrics import bottleneck
from shapes.models import Embedding, ShapeModel

DIAGRAMS = {
    'cup_001': ('cup', "0,0.5,1\n0.1,0.9,1\n0.2,0.3,1"),
    'cup_002': ('cup', "0,0.55,1\n0.1,0.85,1"),
    'cup_003': ('cup', "0,0.45,1\n0.12,0.9,1\n0.4,0.41,2"),
    'hand_001': ('hand', "0.3,0.35,1\n0.5,0.6,1\n0.6,0.95,1"),
    'hand_002': ('hand', "0.3,0.4,1\n0.5,0.65,1\n0.62,0.9,1"),
    'hand_003': ('hand', "0.35,0.4,1\n0.55,0.6,1\n0.6,1,1\n# essential_count=1"),
}


@pytest.fixture
def api_client():
    return APIClient()


@pytest.fixture
def staff_client():
    user = User.objects.create(username='curator', password=make_password('1'), is_staff=True)
    client = APIClient()
    client.force_authenticate(user=user)
    return client


@pytest.fixture
def shapes():
    for model_id, (label, diagram) in DIAGRAMS.items():
        ShapeModel.objects.create(model_id=model_id, label=label, diagram=diagram,
                                  essential_count=parse_diagram(diagram).essential_count)


@pytest.fixture
def embedded(shapes, staff_client):
    response = staff_client.post('/api/v1/shapes/embed', {'transform': 'S'}, format='json')
    assert response.status_code == 201
    return response.json()['message']


@pytest.mark.django_db
class TestShapes:
    def test_create(self, staff_client):
        response = staff_client.post('/api/v1/shapes', {
            'model_id': 'mug_001',
            'label': 'mug',
            'diagram': "0.2,0.4\n0,0.5,2\n0,inf,1",
            'filter_kind': 'line',
        }, format='json')
        assert response.status_code == 201
        data = response.json()
        assert data['point_count'] == 3
        assert data['essential_count'] == 1
        assert data['diagram'].splitlines()[-2:] == ['0,0.5,2', '0.2,0.4,1']
        assert ShapeModel.objects.filter(model_id='mug_001').exists()

    def test_create_needs_staff(self, api_client):
        response = api_client.post('/api/v1/shapes', {'model_id': 'x', 'label': 'y', 'diagram': "0,1"}, format='json')
        assert response.status_code == 403
        assert not ShapeModel.objects.exists()

    def test_invalid_diagram(self, staff_client):
        response = staff_client.post('/api/v1/shapes', {'model_id': 'x', 'label': 'y', 'diagram': "1,0"}, format='json')
        assert response.status_code == 400
        assert 'diagram' in response.json()

    @pytest.mark.parametrize('model_id', ['embed', 'distance'])
    def test_route_names_are_reserved(self, staff_client, model_id):
        response = staff_client.post('/api/v1/shapes', {'model_id': model_id, 'label': 'y', 'diagram': "0,1"},
                                     format='json')
        assert response.status_code == 400
        assert 'model_id' in response.json()
        assert not ShapeModel.objects.exists()

    def test_duplicate_model_id(self, shapes, staff_client):
        response = staff_client.post('/api/v1/shapes', {'model_id': 'cup_001', 'label': 'cup', 'diagram': "0,1"},
                                     format='json')
        assert response.status_code == 400

    def test_list(self, shapes, api_client):
        response = api_client.get('/api/v1/shapes')
        assert response.status_code == 200
        assert [item['model_id'] for item in response.json()] == sorted(DIAGRAMS)
        assert response.json()[2]['point_count'] == 4

    def test_detail_and_delete(self, embedded, api_client, staff_client):
        response = api_client.get('/api/v1/shapes/hand_003')
        assert response.status_code == 200
        assert response.json()['essential_count'] == 1
        assert [item['transform'] for item in response.json()['embeddings']] == ['S']
        assert staff_client.delete('/api/v1/shapes/hand_003').status_code == 204
        assert not Embedding.objects.filter(shape__model_id='hand_003').exists()
        assert api_client.get('/api/v1/shapes/hand_003').status_code == 404


@pytest.mark.django_db
class TestEmbed:
    def test_summary(self, embedded):
        assert embedded == {'transform': 'S', 'width': 4, 'k': 2, 'count': 6}
        assert Embedding.objects.count() == 6
        assert all(len(e.coefficients) == 2 for e in Embedding.objects.all())

    def test_re_embedding_replaces_rows(self, embedded, staff_client):
        response = staff_client.post('/api/v1/shapes/embed', {'transform': 'S', 'k': 3}, format='json')
        assert response.status_code == 201
        assert set(Embedding.objects.values_list('k', flat=True)) == {3}

    def test_k_above_width(self, shapes, staff_client):
        response = staff_client.post('/api/v1/shapes/embed', {'transform': 'R', 'k': 5}, format='json')
        assert response.status_code == 400
        assert not Embedding.objects.exists()

    def test_needs_staff(self, shapes, api_client):
        assert api_client.post('/api/v1/shapes/embed', {'transform': 'R'}, format='json').status_code == 403


@pytest.mark.django_db
class TestQuery:
    def test_two_stage(self, embedded, api_client):
        response = api_client.get('/api/v1/shapes/cup_001/query', {'transform': 'S', 'metric': 'd1', 'candidates': 2})
        assert response.status_code == 200
        hits = response.json()['message']
        assert sorted(hit['model_id'] for hit in hits) == sorted(set(DIAGRAMS) - {'cup_001'})
        assert [hit['bottleneck_distance'] is not None for hit in hits] == [True, True, False, False, False]

    def test_default_candidates(self, embedded, api_client):
        hits = api_client.get('/api/v1/shapes/hand_001/query', {'transform': 'S', 'metric': 'd3'}).json()['message']
        assert sum(hit['bottleneck_distance'] is not None for hit in hits) == 1

    def test_unknown_model(self, embedded, api_client):
        response = api_client.get('/api/v1/shapes/none/query', {'transform': 'S', 'metric': 'd1'})
        assert response.status_code == 404

    def test_missing_embedding(self, shapes, api_client):
        response = api_client.get('/api/v1/shapes/cup_001/query', {'transform': 'T', 'metric': 'd1'})
        assert response.status_code == 400

    def test_bottleneck_prefilter_rejected(self, embedded, api_client):
        response = api_client.get('/api/v1/shapes/cup_001/query', {'transform': 'S', 'metric': 'bottleneck'})
        assert response.status_code == 400


@pytest.mark.django_db
class TestDistance:
    def test_bottleneck(self, shapes, api_client):
        response = api_client.post('/api/v1/shapes/distance',
                                   {'first': 'cup_001', 'second': 'hand_002', 'metric': 'bottleneck'}, format='json')
        assert response.status_code == 200
        expected = bottleneck(parse_diagram(DIAGRAMS['cup_001'][1]), parse_diagram(DIAGRAMS['hand_002'][1]))
        assert response.json()['message']['distance'] == pytest.approx(expected)

    def test_bottleneck_ignores_transform_without_embeddings(self, shapes, api_client):
        response = api_client.post('/api/v1/shapes/distance',
                                   {'first': 'cup_001', 'second': 'hand_002', 'metric': 'bottleneck', 'transform': 'S'},
                                   format='json')
        assert response.status_code == 200
        expected = bottleneck(parse_diagram(DIAGRAMS['cup_001'][1]), parse_diagram(DIAGRAMS['hand_002'][1]))
        assert response.json()['message']['distance'] == pytest.approx(expected)

    def test_coefficient(self, embedded, api_client):
        response = api_client.post('/api/v1/shapes/distance',
                                   {'first': 'cup_001', 'second': 'cup_001', 'metric': 'd2', 'transform': 'S'},
                                   format='json')
        assert response.json()['message']['distance'] == 0.0

    def test_coefficient_needs_transform(self, embedded, api_client):
        response = api_client.post('/api/v1/shapes/distance',
                                   {'first': 'cup_001', 'second': 'cup_002', 'metric': 'd1'}, format='json')
        assert response.status_code == 400

    def test_unknown_model(self, shapes, api_client):
        response = api_client.post('/api/v1/shapes/distance',
                                   {'first': 'cup_001', 'second': 'mug', 'metric': 'bottleneck'}, format='json')
        assert response.status_code == 404
