import numpy as np
import pytest

from shapes.tests.factories import strip_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def paired_minima():
    """Four components born before b, of which two (born at a) die together at b."""
    return strip_mesh([0.0, 0.8, 0.2, 0.5, 0.2, 0.5, 0.2])
