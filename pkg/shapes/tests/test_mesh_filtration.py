import logging
import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from shapes.diagram import PersistenceDiagram
from shapes.exceptions import DegenerateFrameError, FilterError, MeshFormatError
from shapes.mesh_filtration import (
    MeshFrame, TriangleMesh, VertexFunction, axis_vector, beta0, center_of_mass, default_eps, filter_line,
    filter_plane, line_distances, mesh_diagram, mesh_frame, multiplicity0, normalize_mesh, parse_off,
    plane_distances, zero_persistence,
)
from shapes.tests.factories import random_mesh, strip_mesh

TETRA_OFF = """OFF
# a tetrahedron
4 4 6
0 0 0
1 0 0
0 2 0
0 0 3
3 0 1 2
3 0 1 3
3 0 2 3
3 1 2 3
"""


class TestParseOff:
    def test_single_triangle(self):
        mesh = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
        assert (mesh.vertex_count, len(mesh.triangles)) == (3, 1)

    def test_quad_face_rejected(self):
        with pytest.raises(MeshFormatError):
            parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")

    def test_vertices_only(self):
        mesh = parse_off("OFF\n2 0 0\n0 0 0\n1 1 1\n")
        assert (mesh.vertex_count, len(mesh.triangles)) == (2, 0)
        assert len(mesh.edges()) == 0

    def test_counts_on_header_line_and_comments(self):
        mesh = parse_off("OFF 3 1 0\n0 0 0 # origin\n1 0 0\n0 1 0\n3 0 1 2\n")
        assert mesh.vertex_count == 3

    def test_tetrahedron_edges(self):
        assert len(parse_off(TETRA_OFF).edges()) == 6

    @pytest.mark.parametrize('text', [
        "",
        "PLY\n3 1 0\n",
        "OFF\n3 1 0\n0 0 0\n1 0 0\n",
        "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n",
        "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n",
        "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n",
        "OFF\n0 0 0\n",
        "OFF\n1 0 0\n0 x 0\n",
    ])
    def test_invalid(self, text):
        with pytest.raises(MeshFormatError):
            parse_off(text)


class TestFrame:
    def test_center_is_midpoint(self):
        mesh = TriangleMesh(np.array([[0, 0, 0], [2, 0, 0]]), [])
        assert np.array_equal(center_of_mass(mesh), [1, 0, 0])

    def test_center_of_single_vertex(self):
        mesh = TriangleMesh(np.array([[0.3, -2.0, 7.5]]), [])
        assert np.array_equal(center_of_mass(mesh), [0.3, -2.0, 7.5])

    def test_center_matches_compensated_sum(self, rng):
        vertices = rng.normal(scale=100.0, size=(500, 3))
        expected = [math.fsum(vertices[:, axis]) / len(vertices) for axis in range(3)]
        assert np.allclose(center_of_mass(TriangleMesh(vertices, [])), expected, rtol=0, atol=1e-12)

    def test_symmetric_cloud_has_no_axis(self):
        vertices = np.vstack([np.eye(3), -np.eye(3)])
        with pytest.raises(DegenerateFrameError):
            axis_vector(TriangleMesh(vertices, []), np.zeros(3))

    def test_two_points_cancel(self):
        mesh = TriangleMesh(np.array([[0, 0, 0], [0, 0, 2]]), [])
        with pytest.raises(DegenerateFrameError):
            axis_vector(mesh, center_of_mass(mesh))

    def test_all_vertices_at_center(self):
        with pytest.raises(DegenerateFrameError):
            axis_vector(TriangleMesh(np.array([[1, 1, 1]]), []), np.array([1, 1, 1]))

    def test_hand_evaluated_axis(self):
        mesh = TriangleMesh(np.array([[0, 0, 0], [0, 0, 1], [0, 0, 3]]), [])
        center = center_of_mass(mesh)
        assert np.allclose(center, [0, 0, 4 / 3], atol=1e-15)
        # offsets -4/3, -1/3, 5/3: numerator (-16 - 1 + 25) / 9, denominator 42 / 9
        axis, w = axis_vector(mesh, center)
        assert np.allclose(w, [0, 0, 4 / 21], rtol=0, atol=1e-12)
        assert np.allclose(axis, [0, 0, 1], rtol=0, atol=1e-12)

    def test_frame_axis_must_be_unit(self):
        with pytest.raises(DegenerateFrameError):
            MeshFrame(np.zeros(3), np.array([0, 0, 2.0]))


class TestNormalize:
    def test_two_points(self):
        mesh = TriangleMesh(np.array([[0, 0, 0], [0, 0, 4]]), [])
        normalized = normalize_mesh(mesh, center_of_mass(mesh))
        assert np.array_equal(normalized.vertices, [[0, 0, -1], [0, 0, 1]])

    def test_idempotent_on_unit_mesh(self):
        vertices = np.array([[1.0, 0, 0], [-0.5, 0.5, 0], [-0.5, -0.5, 0]])
        mesh = TriangleMesh(vertices, [[0, 1, 2]])
        normalized = normalize_mesh(mesh, center_of_mass(mesh))
        assert np.allclose(normalized.vertices, vertices, rtol=0, atol=1e-15)

    def test_max_norm_is_one(self, rng):
        for _ in range(20):
            mesh = random_mesh(rng, 40, 20)
            normalized = normalize_mesh(mesh, center_of_mass(mesh))
            assert abs(np.linalg.norm(normalized.vertices, axis=1).max() - 1.0) <= 1e-12

    def test_degenerate(self):
        with pytest.raises(DegenerateFrameError):
            normalize_mesh(TriangleMesh(np.array([[2, 2, 2]]), []), np.array([2, 2, 2]))


class TestFilters:
    def test_line_distance(self):
        mesh = TriangleMesh(np.array([[0.6, 0.8, 0.0], [0, 0, 0.5]]), [])
        frame = MeshFrame(np.zeros(3), np.array([0, 0, 1.0]))
        assert np.allclose(line_distances(mesh, frame), [1.0, 0.0], rtol=0, atol=1e-15)
        assert np.array_equal(filter_line(mesh, frame).values, [1.0, 0.0])

    def test_plane_distance(self):
        mesh = TriangleMesh(np.array([[0.3, 0.4, 0.5], [1.0, 2.0, 0.0]]), [])
        frame = MeshFrame(np.zeros(3), np.array([0, 0, 1.0]))
        assert np.allclose(plane_distances(mesh, frame), [0.5, 0.0], rtol=0, atol=1e-15)
        assert np.array_equal(filter_plane(mesh, frame).values, [1.0, 0.0])

    def test_values_in_unit_interval(self, rng):
        mesh = random_mesh(rng, 30, 20)
        mesh = normalize_mesh(mesh, center_of_mass(mesh))
        frame = mesh_frame(mesh)
        for f in (filter_line(mesh, frame), filter_plane(mesh, frame)):
            assert f.values.min() == 0.0 and f.values.max() == 1.0

    def test_rigid_motion_invariance(self, rng):
        for _ in range(10):
            mesh = random_mesh(rng, 25, 10)
            frame = mesh_frame(mesh)
            rotation = Rotation.random(random_state=rng.integers(1 << 31))
            shift = rng.normal(size=3)
            moved = TriangleMesh(rotation.apply(mesh.vertices) + shift, mesh.triangles)
            moved_frame = MeshFrame(rotation.apply(frame.center) + shift, rotation.apply(frame.axis))
            assert np.allclose(filter_line(mesh, frame).values, filter_line(moved, moved_frame).values,
                               rtol=0, atol=1e-12)
            assert np.allclose(filter_plane(mesh, frame).values, filter_plane(moved, moved_frame).values,
                               rtol=0, atol=1e-12)

    def test_translation_invariance_of_plane(self, rng):
        mesh = random_mesh(rng, 25, 10)
        frame = mesh_frame(mesh)
        shift = np.array([5.0, -3.0, 2.0])
        moved = TriangleMesh(mesh.vertices + shift, mesh.triangles)
        moved_frame = MeshFrame(frame.center + shift, frame.axis)
        assert np.allclose(filter_plane(mesh, frame).values, filter_plane(moved, moved_frame).values,
                           rtol=0, atol=1e-12)

    def test_scale_invariance_after_normalization(self, rng):
        mesh = random_mesh(rng, 25, 10)
        scaled = TriangleMesh(mesh.vertices * 37.5, mesh.triangles)
        values = []
        for candidate in (mesh, scaled):
            normalized = normalize_mesh(candidate, center_of_mass(candidate))
            values.append(filter_line(normalized, mesh_frame(normalized)).values)
        assert np.allclose(values[0], values[1], rtol=0, atol=1e-12)

    def test_constant_function_warns(self, caplog, monkeypatch):
        monkeypatch.setattr(logging.getLogger('shapes'), 'propagate', True)
        mesh = TriangleMesh(np.array([[1.0, 0, 0], [0, 1.0, 0], [-1.0, 0, 0]]), [[0, 1, 2]])
        frame = MeshFrame(np.zeros(3), np.array([0, 0, 1.0]))
        with caplog.at_level(logging.WARNING, logger='shapes'):
            f = filter_line(mesh, frame)
        assert np.array_equal(f.values, [0, 0, 0])
        assert 'constant' in caplog.text
        assert zero_persistence(mesh, f) == PersistenceDiagram(essential_count=1)


class TestZeroPersistence:
    def test_path(self):
        mesh, f = strip_mesh([0, 2, 1])
        assert zero_persistence(mesh, f) == PersistenceDiagram.from_pairs([(1, 2)], essential_count=1)

    def test_constant_on_connected_mesh(self):
        mesh = parse_off(TETRA_OFF)
        assert zero_persistence(mesh, VertexFunction(np.full(4, 0.5))) == PersistenceDiagram(essential_count=1)

    def test_paired_minima(self, paired_minima):
        mesh, f = paired_minima
        expected = PersistenceDiagram.from_pairs([(0.2, 0.5, 2), (0.2, 0.8, 1)], essential_count=1)
        assert zero_persistence(mesh, f) == expected

    def test_one_essential_class_per_component(self):
        vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 5, 5], [6, 5, 5], [5, 6, 5], [9, 9, 9]])
        mesh = TriangleMesh(vertices, [[0, 1, 2], [3, 4, 5]])
        diagram = zero_persistence(mesh, VertexFunction(np.linspace(0, 1, 7)))
        assert diagram.essential_count == 3

    def test_function_length_checked(self):
        mesh, _ = strip_mesh([0, 1])
        with pytest.raises(FilterError):
            zero_persistence(mesh, VertexFunction(np.zeros(2)))

    def test_births_are_local_minima(self, rng):
        for _ in range(30):
            mesh = random_mesh(rng, int(rng.integers(3, 31)), int(rng.integers(1, 25)))
            f = VertexFunction(rng.random(mesh.vertex_count))
            neighbours = [set() for _ in range(mesh.vertex_count)]
            for a, b in mesh.edges():
                neighbours[a].add(b)
                neighbours[b].add(a)
            minima = sum(all(f.values[i] < f.values[j] for j in neighbours[i]) for i in range(mesh.vertex_count))
            diagram = zero_persistence(mesh, f)
            assert diagram.total_multiplicity + diagram.essential_count == minima

    def test_vertex_permutation_invariance(self, rng):
        for _ in range(20):
            mesh = random_mesh(rng, 20, 15)
            f = VertexFunction(rng.random(mesh.vertex_count))
            permutation = rng.permutation(mesh.vertex_count)
            inverse = np.argsort(permutation)
            permuted = TriangleMesh(mesh.vertices[permutation], inverse[mesh.triangles])
            assert zero_persistence(permuted, VertexFunction(f.values[permutation])) == zero_persistence(mesh, f)


class TestBettiOracle:
    def test_beta0_extremes(self):
        mesh, f = strip_mesh([0.1, 0.9, 0.3, 0.6])
        top = f.values.max()
        assert beta0(mesh, f, top, top) == 1
        assert beta0(mesh, f, -1.0, top) == 0

    def test_beta0_rejects_reversed_levels(self):
        mesh, f = strip_mesh([0, 1])
        with pytest.raises(FilterError):
            beta0(mesh, f, 0.8, 0.2)

    def test_paired_minima_betti_numbers(self, paired_minima):
        mesh, f = paired_minima
        a, b, eps = 0.2, 0.5, 0.05
        assert beta0(mesh, f, a + eps, b - eps) == 4
        assert beta0(mesh, f, a + eps, b + eps) == 2
        assert beta0(mesh, f, a - eps, b - eps) == 1
        assert beta0(mesh, f, a - eps, b + eps) == 1

    def test_paired_minima_multiplicity(self, paired_minima):
        mesh, f = paired_minima
        assert multiplicity0(mesh, f, 0.2, 0.5) == 2
        assert multiplicity0(mesh, f, 0.2, 0.8) == 1
        assert multiplicity0(mesh, f, 0.5, 0.8) == 0

    def test_default_eps(self, paired_minima):
        _, f = paired_minima
        assert default_eps(f) == pytest.approx(0.05)

    def test_eps_must_isolate(self, paired_minima):
        mesh, f = paired_minima
        with pytest.raises(FilterError):
            multiplicity0(mesh, f, 0.2, 0.5, eps=0.2)

    def test_oracle_equivalence(self, rng):
        for _ in range(50):
            n = int(rng.integers(4, 31))
            mesh = random_mesh(rng, n, int(rng.integers(1, 2 * n)))
            f = VertexFunction(rng.random(n))
            eps = default_eps(f)
            levels = np.unique(f.values)
            recovered = {}
            for i, u in enumerate(levels):
                for v in levels[i + 1:]:
                    multiplicity = multiplicity0(mesh, f, float(u), float(v), eps)
                    assert multiplicity >= 0
                    if multiplicity:
                        recovered[(float(u), float(v))] = multiplicity
            diagram = zero_persistence(mesh, f)
            assert {(p.birth, p.death): p.multiplicity for p in diagram.points} == recovered


class TestMeshPipeline:
    def test_tetrahedron_diagram(self):
        mesh = parse_off(TETRA_OFF)
        for kind in ('line', 'plane'):
            diagram = mesh_diagram(mesh, kind)
            assert diagram.essential_count == 1
            for point in diagram.points:
                assert 0.0 <= point.birth < point.death <= 1.0

    def test_scaled_mesh_gives_same_diagram(self):
        mesh = parse_off(TETRA_OFF)
        scaled = TriangleMesh(mesh.vertices * 4.0, mesh.triangles)
        first, second = mesh_diagram(mesh, 'plane'), mesh_diagram(scaled, 'plane')
        assert len(first) == len(second)
        for p, q in zip(first.points, second.points):
            assert p.birth == pytest.approx(q.birth, abs=1e-12) and p.death == pytest.approx(q.death, abs=1e-12)
