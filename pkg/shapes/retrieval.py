"""Database-level retrieval: distance matrices, precision/recall and the two-stage query.

Every ranking in this module orders by ascending distance and breaks ties
by ascending model id, so results do not depend on database order or on how
the matrix fill was scheduled.
"""
import csv
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from shapes.exceptions import (
    IndexFormatError, LabelError, MissingEmbeddingError, PaddingError, ShapeError, UnknownModelError,
)
from shapes.files import atomic_write, read_text
from shapes.metrics import COEFFICIENT_METRICS, MetricKind, bottleneck, coeff_distance
from shapes.transforms import TransformKind
from shapes.viete import CoefficientVector, database_width, default_k, embed

logger = logging.getLogger(__name__)

INDEX_VERSION = 1
INDEX_MAGIC = '# shapes-index'
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DatabaseEntry:
    model_id: str
    label: str
    diagram: object = None
    embeddings: dict = field(default_factory=dict, compare=False)

    def vector(self, kind, k):
        try:
            return self.embeddings[(TransformKind(kind), k)]
        except KeyError:
            raise MissingEmbeddingError(f"{self.model_id}: no {TransformKind(kind).value} embedding with k={k}") from None

    def require_diagram(self):
        if self.diagram is None:
            raise MissingEmbeddingError(f"{self.model_id}: no persistence diagram loaded")
        return self.diagram


@dataclass(frozen=True)
class LabeledDatabase:
    entries: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'entries', tuple(self.entries))
        ids = [entry.model_id for entry in self.entries]
        duplicates = [model_id for model_id, count in Counter(ids).items() if count > 1]
        if duplicates:
            raise LabelError(f"Duplicate model ids: {', '.join(sorted(duplicates))}")
        for entry in self.entries:
            if not entry.label:
                raise LabelError(f"{entry.model_id}: missing class label")
        widths = {}
        for entry in self.entries:
            for key, vector in entry.embeddings.items():
                if widths.setdefault(key, vector.width) != vector.width or vector.k != key[1]:
                    raise IndexFormatError(f"Embeddings {key[0].value}/k={key[1]} do not share one width and k")

    def __len__(self):
        return len(self.entries)

    @property
    def ids(self):
        return [entry.model_id for entry in self.entries]

    @property
    def labels(self):
        return [entry.label for entry in self.entries]

    def entry(self, model_id):
        for entry in self.entries:
            if entry.model_id == model_id:
                return entry
        raise UnknownModelError(f"Unknown model id {model_id!r}")

    def embedding_keys(self):
        return sorted({key for entry in self.entries for key in entry.embeddings}, key=lambda key: (key[0].value, key[1]))

    def resolve_k(self, kind, k=None):
        """The requested k, or the only k embedded for this transform."""
        kind = TransformKind(kind)
        available = sorted({key[1] for key in self.embedding_keys() if key[0] is kind})
        if k is not None:
            if k not in available:
                raise MissingEmbeddingError(f"No {kind.value} embeddings with k={k} (available: {available})")
            return k
        if len(available) != 1:
            raise MissingEmbeddingError(f"Ambiguous or missing {kind.value} embeddings (available k: {available})")
        return available[0]

    def width(self, kind, k):
        vectors = self.vectors(kind, k)
        return vectors[0].width if vectors else 0

    def vectors(self, kind, k):
        return [entry.vector(kind, k) for entry in self.entries]

    def diagrams(self):
        return [entry.require_diagram() for entry in self.entries]

    def with_embeddings(self, kind, vectors):
        """Attach one coefficient vector per entry, in entry order."""
        kind = TransformKind(kind)
        entries = []
        for entry, vector in zip(self.entries, vectors, strict=True):
            embeddings = dict(entry.embeddings)
            embeddings[(kind, vector.k)] = vector
            entries.append(replace(entry, embeddings=embeddings))
        return LabeledDatabase(tuple(entries))

    def with_diagrams(self, diagrams):
        """Attach diagrams from an id -> diagram mapping; every entry must be covered."""
        missing = [entry.model_id for entry in self.entries if entry.model_id not in diagrams]
        if missing:
            raise MissingEmbeddingError(f"No diagram for: {', '.join(missing)}")
        return LabeledDatabase(tuple(replace(entry, diagram=diagrams[entry.model_id]) for entry in self.entries))


def build_database(diagrams, labels):
    """Database from an id -> diagram mapping and an id -> label mapping, ordered by id."""
    unlabeled = sorted(set(diagrams) - set(labels))
    if unlabeled:
        raise LabelError(f"No class label for: {', '.join(unlabeled)}")
    return LabeledDatabase(tuple(
        DatabaseEntry(model_id, labels[model_id], diagrams[model_id]) for model_id in sorted(diagrams)
    ))


def embed_database(db, kind, k=None, width=None):
    """Embed every diagram at the common width M (the database maximum unless given)."""
    diagrams = db.diagrams()
    largest = database_width(diagrams)
    if width is None:
        width = max(largest, 1)
    elif width < largest:
        raise PaddingError(f"A diagram has {largest} points, more than the requested width {width}; re-embed the database")
    if k is None:
        k = default_k(width)
    vectors = [embed(diagram, kind, width, k) for diagram in diagrams]
    logger.info("Embedded %d diagrams with transform %s (M=%d, k=%d)", len(vectors), TransformKind(kind).value, width, k)
    return db.with_embeddings(kind, vectors)


def storage_cost(db, kind, k):
    """Reals stored per model: mean over raw point lists (2 r) against one coefficient vector (2 k)."""
    diagram_reals = [2 * len(entry.require_diagram()) for entry in db.entries]
    return {
        'diagram_reals': float(np.mean(diagram_reals)) if diagram_reals else 0.0,
        'vector_reals': 2 * db.resolve_k(kind, k),
    }


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    ids: tuple
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        n = len(self.ids)
        if values.shape != (n, n):
            raise ShapeError(f"Distance matrix shape {values.shape} does not match {n} ids")
        if not np.array_equal(values, values.T) or np.any(np.diag(values) != 0) or np.any(values < 0):
            raise ShapeError("Distance matrix must be symmetric, non-negative and zero on the diagonal")
        values.setflags(write=False)
        object.__setattr__(self, 'ids', tuple(self.ids))
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.ids)

    def to_rows(self):
        yield list(self.ids)
        for row in self.values:
            yield [format(value, '.17g') for value in row]


def pair_distance(first, second, metric, transform=None, k=None):
    metric = MetricKind(metric)
    if metric is MetricKind.BOTTLENECK:
        return bottleneck(first.require_diagram(), second.require_diagram())
    return coeff_distance(first.vector(transform, k), second.vector(transform, k), metric)


def distance_matrix(db, metric, transform=None, k=None, threads=1):
    """Fill the symmetric distance matrix, computing every unordered pair once."""
    metric = MetricKind(metric)
    if metric.is_coefficient and len(db):
        if transform is None:
            raise MissingEmbeddingError(f"Metric {metric.value} needs a transform")
        k = db.resolve_k(transform, k)
        db.vectors(transform, k)
    elif not metric.is_coefficient:
        db.diagrams()
    n = len(db)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    entries = db.entries

    def cell(pair):
        i, j = pair
        return pair_distance(entries[i], entries[j], metric, transform, k)

    logger.info("Filling %dx%d %s distance matrix with %d thread(s)", n, n, metric.value, threads)
    if threads > 1 and pairs:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            distances = list(pool.map(cell, pairs))
    else:
        distances = [cell(pair) for pair in pairs]
    values = np.zeros((n, n))
    for (i, j), distance in zip(pairs, distances):
        values[i, j] = values[j, i] = distance
    return DistanceMatrix(tuple(db.ids), values)


def parse_distance_matrix(text):
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise ShapeError("Empty distance matrix file")
    ids = [cell.strip() for cell in rows[0]]
    if len(rows) - 1 != len(ids) or any(len(row) != len(ids) for row in rows[1:]):
        raise ShapeError(f"Distance matrix must have {len(ids)} rows of {len(ids)} values")
    try:
        values = np.array([[float(cell) for cell in row] for row in rows[1:]]).reshape(len(ids), len(ids))
    except ValueError as exc:
        raise ShapeError(f"Malformed distance value: {exc}") from None
    return DistanceMatrix(tuple(ids), values)


def ranking(matrix, query):
    """Indices of every other item ordered by (distance, id)."""
    row = matrix.values[query]
    others = [j for j in range(len(matrix)) if j != query]
    return sorted(others, key=lambda j: (row[j], matrix.ids[j]))


@dataclass(frozen=True, eq=False)
class PRTable:
    recall: np.ndarray
    precision: np.ndarray

    def __post_init__(self):
        recall = np.asarray(self.recall, dtype=float)
        precision = np.asarray(self.precision, dtype=float)
        if recall.shape != precision.shape:
            raise ShapeError("Recall and precision columns differ in length")
        if len(recall) and (np.any(np.diff(recall) <= 0) or recall[0] <= 0 or recall[-1] > 1):
            raise ShapeError("Recall levels must increase strictly within (0, 1]")
        if np.any((precision < 0) | (precision > 1)):
            raise ShapeError("Precision values must lie in [0, 1]")
        object.__setattr__(self, 'recall', recall)
        object.__setattr__(self, 'precision', precision)

    def to_rows(self):
        return [(format(r, '.17g'), format(p, '.17g')) for r, p in zip(self.recall, self.precision)]


def _aligned_labels(matrix, labels):
    if isinstance(labels, dict):
        missing = [model_id for model_id in matrix.ids if model_id not in labels]
        if missing:
            raise LabelError(f"No class label for: {', '.join(missing)}")
        labels = [labels[model_id] for model_id in matrix.ids]
    labels = list(labels)
    if len(labels) != len(matrix):
        raise LabelError(f"{len(labels)} labels for {len(matrix)} matrix rows")
    counts = Counter(labels)
    if len(counts) < 2:
        raise LabelError("Precision/recall needs at least two classes")
    singletons = sorted(label for label, count in counts.items() if count < 2)
    if singletons:
        raise LabelError(f"Classes with a single member: {', '.join(map(str, singletons))}")
    return labels, counts


def pr_curve(matrix, labels):
    """Interpolated precision at recall levels 1/R .. 1, macro-averaged over queries.

    Each query ranks all other items; its relevant items are the other members
    of its class (``R_q`` of them). Precision is measured at every relevant
    retrieval and interpolated as the maximum precision at recall >= level.
    The grid uses ``R = max R_q``.
    """
    labels, counts = _aligned_labels(matrix, labels)
    grid_size = max(counts.values()) - 1
    levels = np.arange(1, grid_size + 1) / grid_size
    total = np.zeros(grid_size)
    for query in range(len(matrix)):
        relevant = np.array([labels[j] == labels[query] for j in ranking(matrix, query)])
        ranks = np.flatnonzero(relevant) + 1
        hits = np.arange(1, len(ranks) + 1)
        precisions = hits / ranks
        recalls = hits / len(ranks)
        interpolated = np.maximum.accumulate(precisions[::-1])[::-1]
        total += interpolated[np.searchsorted(recalls, levels - TIE_TOLERANCE, side='left')]
    return PRTable(levels, total / len(matrix))


def precision_at_cutoffs(matrix, labels):
    """Mean precision of the first ``n`` retrieved items for ``n = 1 .. N - 1``.

    Under a uniformly random ranking every entry has expectation
    ``(class size - 1) / (N - 1)`` averaged over queries.
    """
    labels, _ = _aligned_labels(matrix, labels)
    n = len(matrix)
    cutoffs = np.arange(1, n)
    total = np.zeros(n - 1)
    for query in range(n):
        relevant = np.array([labels[j] == labels[query] for j in ranking(matrix, query)])
        total += np.cumsum(relevant) / cutoffs
    return total / n


@dataclass(frozen=True)
class RankedHit:
    model_id: str
    prefilter_distance: float
    bottleneck_distance: float = None


def two_stage_hits(query_id, db, transform, kind, k, candidates):
    """Rank by coefficient distance, then re-rank the best ``candidates`` by bottleneck distance."""
    kind = MetricKind(kind)
    if kind not in COEFFICIENT_METRICS:
        raise ShapeError(f"The prefilter metric must be one of d1, d2, d3, got {kind.value}")
    query = db.entry(query_id)
    others = [entry for entry in db.entries if entry.model_id != query_id]
    if not 1 <= candidates <= len(others):
        raise ShapeError(f"candidates must lie in [1, {len(others)}], got {candidates}")
    k = db.resolve_k(transform, k)
    query_vector = query.vector(transform, k)
    prefiltered = sorted(
        (RankedHit(entry.model_id, coeff_distance(query_vector, entry.vector(transform, k), kind)) for entry in others),
        key=lambda hit: (hit.prefilter_distance, hit.model_id),
    )
    query_diagram = query.require_diagram()
    head = sorted(
        (replace(hit, bottleneck_distance=bottleneck(query_diagram, db.entry(hit.model_id).require_diagram()))
         for hit in prefiltered[:candidates]),
        key=lambda hit: (hit.bottleneck_distance, hit.model_id),
    )
    logger.debug("Two-stage query %s: %d of %d items re-ranked", query_id, candidates, len(others))
    return head + prefiltered[candidates:]


def two_stage_query(query_id, db, transform, kind, k, candidates):
    return [hit.model_id for hit in two_stage_hits(query_id, db, transform, kind, k, candidates)]


def bottleneck_ranking(query_id, db):
    query = db.entry(query_id).require_diagram()
    others = [entry for entry in db.entries if entry.model_id != query_id]
    return [entry.model_id for entry in sorted(
        others, key=lambda entry: (bottleneck(query, entry.require_diagram()), entry.model_id),
    )]


def _coefficient_matrices(db, k, threads):
    width = max(database_width(db.diagrams()), 1)
    k = default_k(width) if k is None else k
    for transform in TransformKind:
        embedded = embed_database(db, transform, k, width)
        for metric in COEFFICIENT_METRICS:
            yield f"{transform.value}-{metric.value}", distance_matrix(embedded, metric, transform, k, threads=threads)


def evaluation_grid(db, k=None, threads=1, exact=None):
    """PR tables for direct bottleneck comparison and every transform/metric pair at one k.

    ``exact`` is a precomputed bottleneck matrix of ``db``; it is filled here when omitted.
    """
    if exact is None:
        exact = distance_matrix(db, MetricKind.BOTTLENECK, threads=threads)
    tables = {'bottleneck': pr_curve(exact, db.labels)}
    for method, matrix in _coefficient_matrices(db, k, threads):
        tables[method] = pr_curve(matrix, db.labels)
    return tables


def survival_fraction(exact, coarse, candidates):
    """Share of queries whose bottleneck-nearest item is among the first ``candidates`` of the coarse ranking."""
    if exact.ids != coarse.ids:
        raise ShapeError("Bottleneck and coefficient matrices cover different models")
    n = len(exact)
    if not 1 <= candidates <= n - 1:
        raise ShapeError(f"candidates must lie in [1, {n - 1}], got {candidates}")
    survived = sum(ranking(exact, query)[0] in ranking(coarse, query)[:candidates] for query in range(n))
    return survived / n


def prefilter_survival(db, transform, kind, k, candidates, threads=1, exact=None):
    """How often the two-stage query keeps the true bottleneck-nearest neighbor in its re-ranked head."""
    kind = MetricKind(kind)
    if kind not in COEFFICIENT_METRICS:
        raise ShapeError(f"The prefilter metric must be one of d1, d2, d3, got {kind.value}")
    k = db.resolve_k(transform, k)
    if exact is None:
        exact = distance_matrix(db, MetricKind.BOTTLENECK, threads=threads)
    return survival_fraction(exact, distance_matrix(db, kind, transform, k, threads=threads), candidates)


def survival_grid(db, candidates, k=None, threads=1, exact=None):
    """Prefilter survival for every transform/metric pair at one k."""
    if exact is None:
        exact = distance_matrix(db, MetricKind.BOTTLENECK, threads=threads)
    return {
        method: survival_fraction(exact, matrix, candidates) for method, matrix in _coefficient_matrices(db, k, threads)
    }


def _index_header(width):
    return f"{INDEX_MAGIC} version={INDEX_VERSION} M={width}"


def save_index(db, path, transform=None, k=None, width=0):
    """Write the coefficient vectors of one (transform, k) embedding, one row per model.

    ``width`` only sets the header of an empty database; otherwise the vectors carry it.
    """
    if transform is None and k is None and len(db):
        keys = db.embedding_keys()
        if len(keys) != 1:
            raise MissingEmbeddingError("Pass transform and k: the database holds several embeddings")
        transform, k = keys[0]
    rows = []
    if len(db):
        transform = TransformKind(transform)
        k = db.resolve_k(transform, k)
        width = db.width(transform, k)
        for entry in db.entries:
            vector = entry.vector(transform, k)
            row = [entry.model_id, entry.label, transform.value, str(vector.width), str(vector.k)]
            for value in vector.coefficients:
                row += [format(value.real, '.17g'), format(value.imag, '.17g')]
            rows.append(row)
    with atomic_write(path) as handle:
        handle.write(_index_header(width) + '\n')
        csv.writer(handle, lineterminator='\n').writerows(rows)


def _parse_header(line):
    if not line.startswith(INDEX_MAGIC):
        raise IndexFormatError("Missing index header")
    fields = dict(item.split('=', 1) for item in line[len(INDEX_MAGIC):].split() if '=' in item)
    try:
        version, width = int(fields['version']), int(fields['M'])
    except (KeyError, ValueError):
        raise IndexFormatError(f"Malformed index header {line!r}") from None
    if version != INDEX_VERSION:
        raise IndexFormatError(f"Index version {version} is not supported (expected {INDEX_VERSION})")
    return width


def parse_index(text):
    lines = text.splitlines()
    if not lines:
        raise IndexFormatError("Empty index file")
    width = _parse_header(lines[0].strip())
    entries = []
    shape = None
    for line_number, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row:
            continue
        try:
            model_id, label, transform, row_width, k = row[0], row[1], TransformKind(row[2]), int(row[3]), int(row[4])
            numbers = [float(cell) for cell in row[5:]]
        except (IndexError, ValueError):
            raise IndexFormatError(f"Line {line_number}: corrupt index row") from None
        if len(numbers) != 2 * k:
            raise IndexFormatError(f"Line {line_number}: expected {k} coefficient pairs, got {len(numbers) / 2:g}")
        if shape is None:
            shape = (transform, row_width, k)
        if (transform, row_width, k) != shape or row_width != width:
            raise IndexFormatError(f"Line {line_number}: mixed transform, M or k values in one index")
        try:
            vector = CoefficientVector(np.array(numbers[0::2]) + 1j * np.array(numbers[1::2]), row_width)
        except ShapeError as exc:
            raise IndexFormatError(f"Line {line_number}: {exc}") from None
        entries.append(DatabaseEntry(model_id, label, None, {(transform, k): vector}))
    try:
        return LabeledDatabase(tuple(entries))
    except IndexFormatError:
        raise
    except ShapeError as exc:
        raise IndexFormatError(str(exc)) from None


def load_index(path):
    try:
        return parse_index(read_text(path))
    except IndexFormatError as exc:
        raise IndexFormatError(f"{path}: {exc}") from None
