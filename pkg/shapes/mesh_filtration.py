"""Triangle meshes, the line/plane filtering functions and 0th persistence of their lower-star filtration."""
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from shapes.diagram import PersistenceDiagram, PersistencePoint
from shapes.exceptions import DegenerateFrameError, FilterError, MeshFormatError

logger = logging.getLogger(__name__)

AXIS_TOLERANCE = 1e-9


class FilterKind(str, Enum):
    LINE = 'line'
    PLANE = 'plane'


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        vertices = _frozen(self.vertices, float).reshape(-1, 3) if len(self.vertices) else np.empty((0, 3))
        triangles = _frozen(self.triangles, np.int64).reshape(-1, 3) if len(self.triangles) else np.empty((0, 3), np.int64)
        if len(vertices) < 1:
            raise MeshFormatError("A mesh needs at least one vertex")
        if not np.all(np.isfinite(vertices)):
            raise MeshFormatError("Vertex coordinates must be finite")
        if len(triangles):
            if triangles.min() < 0 or triangles.max() >= len(vertices):
                raise MeshFormatError(f"Triangle index out of range for {len(vertices)} vertices")
            if np.any((triangles[:, 0] == triangles[:, 1]) | (triangles[:, 1] == triangles[:, 2])
                      | (triangles[:, 0] == triangles[:, 2])):
                raise MeshFormatError("Degenerate triangle with a repeated vertex index")
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'triangles', triangles)

    @property
    def vertex_count(self):
        return len(self.vertices)

    def edges(self):
        """Unique undirected edges of the 1-skeleton as an (e, 2) array with ``edges[:, 0] < edges[:, 1]``."""
        if not len(self.triangles):
            return np.empty((0, 2), np.int64)
        t = self.triangles
        pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [0, 2]]])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)


@dataclass(frozen=True, eq=False)
class MeshFrame:
    center: np.ndarray
    axis: np.ndarray

    def __post_init__(self):
        center = _frozen(self.center, float)
        axis = _frozen(self.axis, float)
        if center.shape != (3,) or axis.shape != (3,):
            raise DegenerateFrameError("Frame center and axis must be 3D vectors")
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise DegenerateFrameError(f"Frame axis must have unit length, got norm {np.linalg.norm(axis)}")
        object.__setattr__(self, 'center', center)
        object.__setattr__(self, 'axis', axis)


@dataclass(frozen=True, eq=False)
class VertexFunction:
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise FilterError("Filtering values must be finite")
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.values)


def _meaningful_lines(text):
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if line:
            yield line


def parse_off(text):
    lines = _meaningful_lines(text)
    try:
        header = next(lines)
    except StopIteration:
        raise MeshFormatError("Empty OFF file") from None
    tokens = header.split()
    if tokens[0] != 'OFF':
        raise MeshFormatError(f"Not an OFF file, header is {header!r}")
    counts = tokens[1:]
    try:
        if not counts:
            counts = next(lines).split()
        vertex_count, face_count = int(counts[0]), int(counts[1])
    except (StopIteration, IndexError, ValueError):
        raise MeshFormatError("Missing or malformed OFF counts line") from None

    vertices = []
    triangles = []
    try:
        for index in range(vertex_count):
            cells = next(lines).split()
            if len(cells) < 3:
                raise MeshFormatError(f"Vertex {index} has fewer than 3 coordinates")
            vertices.append([float(cell) for cell in cells[:3]])
        for index in range(face_count):
            cells = [int(cell) for cell in next(lines).split()]
            if not cells or cells[0] != 3 or len(cells) < 4:
                raise MeshFormatError(f"Face {index} is not a triangle")
            triangles.append(cells[1:4])
    except StopIteration:
        raise MeshFormatError("Truncated OFF file") from None
    except ValueError as exc:
        raise MeshFormatError(f"Malformed OFF number: {exc}") from None
    return TriangleMesh(np.array(vertices), np.array(triangles, dtype=np.int64))


def center_of_mass(mesh):
    """Unweighted mean of the vertex positions."""
    return mesh.vertices.mean(axis=0)


def axis_vector(mesh, center, tolerance=AXIS_TOLERANCE):
    """Return ``(axis, w)``: the unit direction of ``w`` and ``w`` itself.

    ``w = sum (v_i - B) |v_i - B| / sum |v_i - B|^2``.
    """
    offsets = mesh.vertices - np.asarray(center, dtype=float)
    norms = np.linalg.norm(offsets, axis=1)
    denominator = np.sum(norms ** 2)
    if denominator <= 0.0:
        raise DegenerateFrameError("All vertices coincide with the center; the axis is undefined")
    w = (offsets * norms[:, None]).sum(axis=0) / denominator
    length = np.linalg.norm(w)
    if length < tolerance:
        raise DegenerateFrameError(f"|w| = {length:.3g} is below {tolerance:g}; the orientation is undefined")
    return w / length, w


def normalize_mesh(mesh, center):
    """Translate ``center`` to the origin and scale so the farthest vertex lies on the unit sphere."""
    offsets = mesh.vertices - np.asarray(center, dtype=float)
    radius = np.linalg.norm(offsets, axis=1).max()
    if radius <= 0.0:
        raise DegenerateFrameError("All vertices coincide with the center; cannot normalize")
    return TriangleMesh(offsets / radius, mesh.triangles)


def mesh_frame(mesh, tolerance=AXIS_TOLERANCE):
    center = center_of_mass(mesh)
    axis, _ = axis_vector(mesh, center, tolerance)
    return MeshFrame(center, axis)


def rescale_unit_interval(raw):
    raw = np.asarray(raw, dtype=float)
    low, high = raw.min(), raw.max()
    if high == low:
        logger.warning("Filtering function is constant (%g); emitting zeros", low)
        return VertexFunction(np.zeros_like(raw))
    return VertexFunction((raw - low) / (high - low))


def line_distances(mesh, frame):
    return np.linalg.norm(np.cross(mesh.vertices - frame.center, frame.axis), axis=1)


def plane_distances(mesh, frame):
    return np.abs((mesh.vertices - frame.center) @ frame.axis)


def filter_line(mesh, frame):
    """Distance of each vertex from the line through the center along the axis, rescaled to [0, 1]."""
    return rescale_unit_interval(line_distances(mesh, frame))


def filter_plane(mesh, frame):
    """Distance of each vertex from the plane through the center orthogonal to the axis, rescaled to [0, 1]."""
    return rescale_unit_interval(plane_distances(mesh, frame))


FILTERS = {
    FilterKind.LINE: filter_line,
    FilterKind.PLANE: filter_plane,
}


def _check_function(mesh, f):
    if len(f) != mesh.vertex_count:
        raise FilterError(f"Function has {len(f)} values for {mesh.vertex_count} vertices")


def zero_persistence(mesh, f):
    """0th ordinary persistence diagram of the lower-star filtration of the mesh 1-skeleton.

    Edges enter at the larger of their endpoint values and are processed in
    that order; at each merge the younger component dies (elder rule, equal
    births resolved toward the smaller vertex index). Pairs with
    birth == death are not proper and are dropped; components that never die
    are counted in ``essential_count``.
    """
    _check_function(mesh, f)
    values = f.values
    edges = mesh.edges()
    edge_values = np.maximum(values[edges[:, 0]], values[edges[:, 1]]) if len(edges) else np.empty(0)
    order = np.lexsort((edges[:, 1], edges[:, 0], edge_values)) if len(edges) else []

    components = DisjointSet(range(mesh.vertex_count))
    elder = list(range(mesh.vertex_count))
    pairs = Counter()
    for e in order:
        a, b = int(edges[e, 0]), int(edges[e, 1])
        root_a, root_b = components[a], components[b]
        if root_a == root_b:
            continue
        oldest_a, oldest_b = elder[root_a], elder[root_b]
        if (values[oldest_a], oldest_a) < (values[oldest_b], oldest_b):
            survivor, victim = oldest_a, oldest_b
        else:
            survivor, victim = oldest_b, oldest_a
        components.merge(a, b)
        elder[components[a]] = survivor
        birth, death = float(values[victim]), float(edge_values[e])
        if birth < death:
            pairs[(birth, death)] += 1
    points = tuple(PersistencePoint(birth, death, count) for (birth, death), count in pairs.items())
    return PersistenceDiagram(points, components.n_subsets)


def _sublevel_labels(mesh, values, edges, level):
    alive = values <= level
    if len(edges):
        keep = alive[edges[:, 0]] & alive[edges[:, 1]]
        kept = edges[keep]
    else:
        kept = edges
    n = mesh.vertex_count
    graph = coo_matrix((np.ones(len(kept)), (kept[:, 0], kept[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return alive, labels


def beta0(mesh, f, u, v):
    """Number of components of the sublevel graph at ``u`` still distinct at level ``v``."""
    if u > v:
        raise FilterError(f"beta0 needs u <= v, got u={u}, v={v}")
    _check_function(mesh, f)
    edges = mesh.edges()
    alive_u, _ = _sublevel_labels(mesh, f.values, edges, u)
    _, labels_v = _sublevel_labels(mesh, f.values, edges, v)
    return len(np.unique(labels_v[alive_u]))


def default_eps(f):
    """A quarter of the smallest positive gap between distinct function values."""
    distinct = np.unique(f.values)
    if len(distinct) < 2:
        return 0.25
    return float(np.diff(distinct).min()) / 4.0


def multiplicity0(mesh, f, u, v, eps=None):
    """Multiplicity of ``(u, v)`` from the four-term alternating sum of persistent Betti numbers."""
    if not u < v:
        raise FilterError(f"({u}, {v}) is not a proper point")
    if eps is None:
        eps = default_eps(f)
    distinct = np.unique(f.values)
    if eps <= 0 or (len(distinct) > 1 and eps >= np.diff(distinct).min() / 2.0):
        raise FilterError(f"eps={eps} does not isolate ({u}, {v}); use less than half the smallest value gap")
    return (beta0(mesh, f, u + eps, v - eps) - beta0(mesh, f, u - eps, v - eps)
            - beta0(mesh, f, u + eps, v + eps) + beta0(mesh, f, u - eps, v + eps))


def mesh_diagram(mesh, kind=FilterKind.LINE, tolerance=AXIS_TOLERANCE):
    """Full mesh pipeline: normalize, frame, filter and extract the 0th diagram."""
    kind = FilterKind(kind)
    normalized = normalize_mesh(mesh, center_of_mass(mesh))
    f = FILTERS[kind](normalized, mesh_frame(normalized, tolerance))
    return zero_persistence(normalized, f)
