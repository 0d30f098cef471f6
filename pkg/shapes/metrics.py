import itertools
import logging
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from shapes.exceptions import OracleLimitError, ShapeError

logger = logging.getLogger(__name__)

ORACLE_CAP = 8


class MetricKind(str, Enum):
    D1 = 'd1'
    D2 = 'd2'
    D3 = 'd3'
    BOTTLENECK = 'bottleneck'

    @property
    def is_coefficient(self):
        return self is not MetricKind.BOTTLENECK


COEFFICIENT_METRICS = (MetricKind.D1, MetricKind.D2, MetricKind.D3)


def _coefficients(vector):
    return np.asarray(getattr(vector, 'coefficients', vector), dtype=complex)


def coeff_distance(a, b, kind):
    """d1 = sum |a_j - b_j|, d2 = sum |a_j - b_j| / j, d3 = sum |a_j - b_j|^(1/j)."""
    kind = MetricKind(kind)
    if not kind.is_coefficient:
        raise ShapeError("coeff_distance only handles d1, d2 and d3")
    a, b = _coefficients(a), _coefficients(b)
    if a.shape != b.shape:
        raise ShapeError(f"Coefficient vectors differ in length: {len(a)} vs {len(b)}")
    terms = np.abs(a - b)
    j = np.arange(1, len(terms) + 1)
    if kind is MetricKind.D1:
        return float(terms.sum())
    if kind is MetricKind.D2:
        return float((terms / j).sum())
    return float((terms ** (1.0 / j)).sum())


def _coords(point):
    if hasattr(point, 'birth'):
        return point.birth, point.death
    u, v = point
    return float(u), float(v)


def point_distance(p, q):
    """Cost of pairing ``p`` with ``q``: either move one onto the other or send both to the diagonal."""
    (u, v), (u2, v2) = _coords(p), _coords(q)
    if u > v or u2 > v2:
        raise ShapeError(f"Points must satisfy birth <= death, got {(u, v)} and {(u2, v2)}")
    return min(max(abs(u - u2), abs(v - v2)), max((v - u) / 2.0, (v2 - u2) / 2.0))


def _augmented_costs(d, e):
    """Square cost matrix of the standard diagonal augmentation.

    Rows are the points of ``d`` followed by one diagonal partner per point of
    ``e``; columns are the points of ``e`` followed by one diagonal partner per
    point of ``d``. A point may only use its own diagonal partner.
    """
    du, dv = d.expanded()
    eu, ev = e.expanded()
    n, m = len(du), len(eu)
    half_d, half_e = (dv - du) / 2.0, (ev - eu) / 2.0
    costs = np.full((n + m, n + m), np.inf)
    costs[:n, :m] = np.minimum(
        np.maximum(np.abs(du[:, None] - eu[None, :]), np.abs(dv[:, None] - ev[None, :])),
        np.maximum(half_d[:, None], half_e[None, :]),
    )
    costs[np.arange(n), m + np.arange(n)] = half_d
    costs[n + np.arange(m), np.arange(m)] = half_e
    costs[n:, m:] = 0.0
    return costs


def _has_perfect_matching(costs, threshold):
    graph = csr_matrix((costs <= threshold).astype(np.int8))
    return bool(np.all(maximum_bipartite_matching(graph, perm_type='column') >= 0))


def bottleneck(d, e):
    """Exact bottleneck distance.

    The answer is one of the finite augmented pairing costs; binary search over
    them for the smallest threshold admitting a perfect matching.
    """
    costs = _augmented_costs(d, e)
    if not costs.size:
        return 0.0
    candidates = np.unique(costs[np.isfinite(costs)])
    low, high = 0, len(candidates) - 1
    while low < high:
        middle = (low + high) // 2
        if _has_perfect_matching(costs, candidates[middle]):
            high = middle
        else:
            low = middle + 1
    return float(candidates[low])


def _diagonal_projection(u, v):
    middle = (u + v) / 2.0
    return middle, middle


def bottleneck_bruteforce(d, e, cap=ORACLE_CAP):
    """Minimum over every bijection of the augmented point sets of the largest pairing cost."""
    r, r2 = d.total_multiplicity, e.total_multiplicity
    if r + r2 > cap:
        raise OracleLimitError(f"Brute force is limited to r + r' <= {cap}, got {r + r2}")
    d_points = list(zip(*d.expanded()))
    e_points = list(zip(*e.expanded()))
    left = d_points + [_diagonal_projection(u, v) for u, v in e_points]
    right = e_points + [_diagonal_projection(u, v) for u, v in d_points]
    size = len(left)
    if not size:
        return 0.0
    costs = np.array([[point_distance(p, q) for q in right] for p in left])
    permutations = np.array(list(itertools.permutations(range(size))))
    return float(costs[np.arange(size), permutations].max(axis=1).min())
