"""Maps from diagram points to complex numbers.

R keeps the point as ``u + iv``. S and T both scale by the distance from the
diagonal, so points near the diagonal (typically noise) land near zero:
``|S(u, v)| = |T(u, v)| = (v - u) / sqrt(2)``.
"""
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from shapes.exceptions import ShapeError

SQRT2 = math.sqrt(2.0)


class TransformKind(str, Enum):
    R = 'R'
    S = 'S'
    T = 'T'


@dataclass(frozen=True)
class ComplexRoot:
    value: complex
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ShapeError(f"Root multiplicity must be positive, got {self.multiplicity}")


@dataclass(frozen=True)
class ComplexRootList:
    roots: tuple = ()
    width: int = 0

    def __post_init__(self):
        if self.width < sum(root.multiplicity for root in self.roots if root.value != 0):
            raise ShapeError("Root list width is smaller than its nonzero multiplicity")

    @property
    def multiplicity(self):
        return sum(root.multiplicity for root in self.roots)


def _check_finite(u, v):
    if not (math.isfinite(u) and math.isfinite(v)):
        raise ShapeError(f"Transform input ({u}, {v}) is not finite")


def transform_R(u, v):
    _check_finite(u, v)
    return complex(u, v)


def transform_S(u, v):
    _check_finite(u, v)
    if u == 0 and v == 0:
        return 0j
    alpha = math.hypot(u, v)
    return (v - u) / (alpha * SQRT2) * complex(u, v)


def transform_T(u, v):
    _check_finite(u, v)
    alpha = math.hypot(u, v)
    return (v - u) / 2.0 * complex(math.cos(alpha) - math.sin(alpha), math.cos(alpha) + math.sin(alpha))


TRANSFORMS = {
    TransformKind.R: transform_R,
    TransformKind.S: transform_S,
    TransformKind.T: transform_T,
}


def transform_points(births, deaths, kind):
    """Vectorized R/S/T over arrays of births and deaths."""
    u = np.asarray(births, dtype=float)
    v = np.asarray(deaths, dtype=float)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ShapeError("Transform input is not finite")
    kind = TransformKind(kind)
    if kind is TransformKind.R:
        return u + 1j * v
    alpha = np.hypot(u, v)
    if kind is TransformKind.S:
        scale = np.divide(v - u, alpha * SQRT2, out=np.zeros_like(alpha), where=alpha > 0)
        return scale * (u + 1j * v)
    return (v - u) / 2.0 * ((np.cos(alpha) - np.sin(alpha)) + 1j * (np.cos(alpha) + np.sin(alpha)))


def transform_diagram(diagram, kind):
    """Image of the diagram's proper points, coincident images merged by summed multiplicity."""
    kind = TransformKind(kind)
    births = [point.birth for point in diagram.points]
    images = transform_points(births, [point.death for point in diagram.points], kind)
    merged = Counter()
    for value, point in zip(images.tolist(), diagram.points):
        merged[value] += point.multiplicity
    roots = tuple(ComplexRoot(value, count) for value, count in merged.items())
    return ComplexRootList(roots, diagram.total_multiplicity)
