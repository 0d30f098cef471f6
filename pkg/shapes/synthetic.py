"""Synthetic labeled databases: per-class base diagrams, jittered copies and near-diagonal noise."""
from dataclasses import dataclass

import numpy as np

from shapes.diagram import PersistenceDiagram
from shapes.exceptions import ShapeError
from shapes.retrieval import DatabaseEntry, LabeledDatabase


@dataclass(frozen=True)
class SynthesisParameters:
    classes: int = 3
    per_class: int = 5
    base_points: int = 6
    jitter: float = 0.02
    noise_points: int = 4
    noise_band: float = 0.05
    seed: int = 0

    def __post_init__(self):
        for name in ('classes', 'per_class', 'base_points', 'noise_points'):
            if getattr(self, name) < 0:
                raise ShapeError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.jitter < 0:
            raise ShapeError(f"jitter must be non-negative, got {self.jitter}")
        if not 0 < self.noise_band <= 1:
            raise ShapeError(f"noise_band must lie in (0, 1], got {self.noise_band}")


def _proper(births, deaths):
    births = np.clip(births, 0.0, 1.0)
    deaths = np.maximum(np.clip(deaths, 0.0, 1.0), np.nextafter(births, np.inf))
    return births, deaths


def base_diagram(rng, size):
    births = rng.uniform(0.0, 0.7, size)
    deaths = births + rng.uniform(0.1, 1.0 - births)
    return _proper(births, deaths)


def perturb(rng, births, deaths, jitter, noise_points, noise_band):
    """Jitter every point within ``[-jitter, jitter]^2`` and add noise points within ``noise_band`` of the diagonal."""
    births, deaths = _proper(
        births + rng.uniform(-jitter, jitter, len(births)),
        deaths + rng.uniform(-jitter, jitter, len(deaths)),
    )
    noise_births = rng.uniform(0.0, 1.0 - noise_band, noise_points)
    noise_deaths = noise_births + noise_band * (1.0 - rng.random(noise_points))
    return np.concatenate([births, noise_births]), np.concatenate([deaths, noise_deaths])


def synthesize_database(parameters=SynthesisParameters()):
    rng = np.random.default_rng(parameters.seed)
    entries = []
    for class_index in range(parameters.classes):
        label = f"class{class_index:02d}"
        births, deaths = base_diagram(rng, parameters.base_points)
        for member in range(parameters.per_class):
            u, v = perturb(rng, births, deaths, parameters.jitter, parameters.noise_points, parameters.noise_band)
            diagram = PersistenceDiagram.from_pairs(zip(u.tolist(), v.tolist()))
            entries.append(DatabaseEntry(f"{label}_{member:03d}", label, diagram))
    return LabeledDatabase(tuple(entries))
