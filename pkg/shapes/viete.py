"""Zero padding of root lists and their elementary symmetric values.

For a root list ``z_1..z_M`` the vector stored per diagram is ``c_1..c_k``
with ``c_j`` the sum of all products of ``j`` distinct roots, i.e. the
coefficients of ``prod (t - z_i) = t^M - c_1 t^(M-1) + c_2 t^(M-2) - ...``
without their signs.
"""
import math
from dataclasses import dataclass

import numpy as np

from shapes.exceptions import CoefficientOverflowError, PaddingError, ShapeError
from shapes.transforms import ComplexRoot, ComplexRootList, transform_diagram


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    coefficients: np.ndarray
    width: int

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=complex).reshape(-1)
        coefficients.setflags(write=False)
        if len(coefficients) < 1:
            raise ShapeError("A coefficient vector needs k >= 1")
        if len(coefficients) > self.width:
            raise ShapeError(f"k={len(coefficients)} exceeds the padding width M={self.width}")
        object.__setattr__(self, 'coefficients', coefficients)

    @property
    def k(self):
        return len(self.coefficients)


def default_k(width):
    """floor(sqrt(M)), and at least 1."""
    return max(1, math.isqrt(width))


def pad_roots(roots, width):
    """Append the zero root with multiplicity ``width - roots.width``."""
    if width < roots.width:
        raise PaddingError(f"Cannot pad a root list of width {roots.width} down to {width}")
    extra = width - roots.width
    if extra == 0:
        return roots
    zeros = extra + sum(root.multiplicity for root in roots.roots if root.value == 0)
    kept = tuple(root for root in roots.roots if root.value != 0)
    return ComplexRootList(kept + (ComplexRoot(0j, zeros),), width)


def elementary_symmetric(roots, k):
    """First ``k`` elementary symmetric values by the incremental recurrence.

    Each unit of multiplicity of a root ``z`` updates ``c_j <- c_j + z c_(j-1)``
    for all ``j`` at once, so a root list of width ``M`` costs ``O(k M)``.
    Zero roots leave every ``c_j`` unchanged and are skipped.
    """
    if not 1 <= k <= roots.width:
        raise ShapeError(f"k must lie in [1, {roots.width}], got {k}")
    c = np.zeros(k + 1, dtype=complex)
    c[0] = 1.0
    with np.errstate(over='ignore', invalid='ignore'):
        for root in roots.roots:
            if root.value == 0:
                continue
            for _ in range(root.multiplicity):
                c[1:] = c[1:] + root.value * c[:-1]
    bad = np.flatnonzero(~np.isfinite(c[1:]))
    if len(bad):
        raise CoefficientOverflowError(int(bad[0]) + 1)
    return CoefficientVector(c[1:], roots.width)


def embed(diagram, kind, width, k=None):
    """Coefficient vector of a diagram: transform, pad to ``width`` and take the first ``k`` values."""
    if k is None:
        k = default_k(width)
    if not 1 <= k <= width:
        raise ShapeError(f"k must lie in [1, {width}], got {k}")
    return elementary_symmetric(pad_roots(transform_diagram(diagram, kind), width), k)


def database_width(diagrams):
    """M: the largest total multiplicity over a collection of diagrams."""
    return max((diagram.total_multiplicity for diagram in diagrams), default=0)
