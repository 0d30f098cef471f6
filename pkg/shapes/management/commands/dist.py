from django.conf import settings

from shapes.exceptions import ShapeError
from shapes.files import write_rows
from shapes.management.base import PipelineCommand, load_database
from shapes.metrics import MetricKind
from shapes.retrieval import distance_matrix, load_index


class Command(PipelineCommand):
    help = "Pairwise distance matrix from an index (d1/d2/d3) or from diagrams (bottleneck)"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--index', help='Coefficient index CSV (for d1, d2, d3)')
        source.add_argument('--diagrams', help='Directory of diagram CSV files (for bottleneck)')
        parser.add_argument('--metric', choices=[kind.value for kind in MetricKind],
                            default=settings.SHAPES['DEFAULT_METRIC'])
        parser.add_argument('--out', required=True, help='Output matrix CSV')
        self.add_threads_argument(parser)

    def run(self, **options):
        metric = MetricKind(options['metric'])
        if metric.is_coefficient:
            if not options['index']:
                raise ShapeError(f"--metric {metric.value} needs --index")
            db = load_index(options['index'])
            transform, k = db.embedding_keys()[0] if len(db) else (None, None)
            matrix = distance_matrix(db, metric, transform, k, threads=options['threads'])
        else:
            if not options['diagrams']:
                raise ShapeError("--metric bottleneck needs --diagrams")
            db = load_database(options['diagrams'])
            matrix = distance_matrix(db, metric, threads=options['threads'])
        rows = list(matrix.to_rows())
        write_rows(options['out'], rows[0], rows[1:])
        self.success(f"{options['out']}: {len(matrix)}x{len(matrix)} {metric.value} distances")
