"""Ordinary persistence diagrams: validated multisets of proper points and their CSV form.

A diagram file holds one ``birth,death,multiplicity`` row per point (the
multiplicity column is optional). Rows whose death is ``inf`` are points at
infinity; they are not stored, only counted in ``essential_count``.
"""
import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from shapes.exceptions import DiagramFormatError
from shapes.files import atomic_write, read_text

logger = logging.getLogger(__name__)

HEADER = '# birth,death,multiplicity'
ESSENTIAL_DIRECTIVE = '# essential_count='


@dataclass(frozen=True, order=True)
class PersistencePoint:
    birth: float
    death: float
    multiplicity: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.birth) and math.isfinite(self.death)):
            raise DiagramFormatError(f"Point ({self.birth}, {self.death}) is not finite")
        if not self.birth < self.death:
            raise DiagramFormatError(f"Point ({self.birth}, {self.death}) is not above the diagonal")
        if isinstance(self.multiplicity, bool) or int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise DiagramFormatError(f"Multiplicity must be a positive integer, got {self.multiplicity!r}")
        object.__setattr__(self, 'birth', float(self.birth))
        object.__setattr__(self, 'death', float(self.death))
        object.__setattr__(self, 'multiplicity', int(self.multiplicity))


@dataclass(frozen=True)
class PersistenceDiagram:
    """Immutable multiset of proper points.

    Coincident points are merged on construction (exact float equality), and
    points are kept sorted by (birth, death), so two diagrams holding the same
    multiset compare equal whatever order they were built in.
    """
    points: tuple = ()
    essential_count: int = field(default=0)

    def __post_init__(self):
        if self.essential_count < 0:
            raise DiagramFormatError("essential_count must be non-negative")
        merged = Counter()
        for point in self.points:
            merged[(point.birth, point.death)] += point.multiplicity
        object.__setattr__(self, 'points', tuple(
            PersistencePoint(birth, death, multiplicity) for (birth, death), multiplicity in sorted(merged.items())
        ))

    @classmethod
    def from_pairs(cls, pairs, essential_count=0):
        """Build a diagram from ``(birth, death)`` or ``(birth, death, multiplicity)`` tuples."""
        return cls(tuple(PersistencePoint(*pair) for pair in pairs), essential_count)

    @property
    def total_multiplicity(self):
        return sum(point.multiplicity for point in self.points)

    def __len__(self):
        return len(self.points)

    def union(self, other):
        return PersistenceDiagram(self.points + other.points, self.essential_count + other.essential_count)

    def expanded(self):
        """Births and deaths as float arrays with every point repeated by its multiplicity."""
        if not self.points:
            return np.empty(0), np.empty(0)
        counts = np.array([point.multiplicity for point in self.points])
        births = np.repeat([point.birth for point in self.points], counts)
        deaths = np.repeat([point.death for point in self.points], counts)
        return births, deaths


def total_multiplicity(diagram):
    return diagram.total_multiplicity


def _parse_number(text, line_number):
    try:
        return float(text)
    except ValueError:
        raise DiagramFormatError(f"Line {line_number}: {text!r} is not a number") from None


def _parse_multiplicity(text, line_number):
    try:
        value = int(text)
    except ValueError:
        raise DiagramFormatError(f"Line {line_number}: multiplicity {text!r} is not an integer") from None
    if value < 1:
        raise DiagramFormatError(f"Line {line_number}: multiplicity must be at least 1, got {value}")
    return value


def parse_diagram(text):
    points = []
    essential = 0
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(ESSENTIAL_DIRECTIVE):
            essential += _parse_multiplicity(line[len(ESSENTIAL_DIRECTIVE):].strip(), line_number)
            continue
        if line.startswith('#'):
            continue
        row = [cell.strip() for cell in next(csv.reader([line]))]
        if len(row) not in (2, 3):
            raise DiagramFormatError(f"Line {line_number}: expected 'birth,death[,multiplicity]', got {line!r}")
        birth = _parse_number(row[0], line_number)
        death = _parse_number(row[1], line_number)
        multiplicity = _parse_multiplicity(row[2], line_number) if len(row) == 3 else 1
        if not math.isfinite(birth):
            raise DiagramFormatError(f"Line {line_number}: birth must be finite, got {row[0]!r}")
        if death == math.inf:
            essential += multiplicity
            continue
        if not math.isfinite(death):
            raise DiagramFormatError(f"Line {line_number}: death must be finite or 'inf', got {row[1]!r}")
        if not birth < death:
            raise DiagramFormatError(f"Line {line_number}: birth {birth} must be smaller than death {death}")
        points.append(PersistencePoint(birth, death, multiplicity))
    diagram = PersistenceDiagram(tuple(points), essential)
    logger.debug("Parsed diagram: %d rows, %d points, %d essential", len(points), len(diagram), essential)
    return diagram


def _format_number(value):
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def serialize_diagram(diagram):
    lines = [HEADER]
    if diagram.essential_count:
        lines.append(f"{ESSENTIAL_DIRECTIVE}{diagram.essential_count}")
    for point in diagram.points:
        lines.append(f"{_format_number(point.birth)},{_format_number(point.death)},{point.multiplicity}")
    return '\n'.join(lines) + '\n'


def load_diagram(path):
    try:
        return parse_diagram(read_text(path))
    except DiagramFormatError as exc:
        raise DiagramFormatError(f"{path}: {exc}") from None


def save_diagram(path, diagram):
    with atomic_write(path) as handle:
        handle.write(serialize_diagram(diagram))


def load_diagram_directory(directory):
    """Load every ``*.csv`` diagram of a directory, keyed by file stem, in id order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DiagramFormatError(f"{directory} is not a directory")
    return {path.stem: load_diagram(path) for path in sorted(directory.glob('*.csv'))}
