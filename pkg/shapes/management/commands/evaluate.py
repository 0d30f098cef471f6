from django.conf import settings

from shapes.files import write_rows
from shapes.management.base import PipelineCommand, load_database
from shapes.metrics import MetricKind
from shapes.retrieval import distance_matrix, evaluation_grid, survival_grid


class Command(PipelineCommand):
    help = "PR tables for bottleneck and every transform/metric combination on one database"

    def add_arguments(self, parser):
        parser.add_argument('--diagrams', required=True, help='Directory of diagram CSV files')
        parser.add_argument('--labels', required=True, help='id,class CSV')
        parser.add_argument('-k', '--k', type=int, default=None, help='Number of coefficients (default floor(sqrt(M)))')
        parser.add_argument('--candidates', type=int, default=None,
                            help='Prefilter size for the survival report (default a quarter of N - 1)')
        parser.add_argument('--out', required=True, help='Output method,recall,precision CSV')
        self.add_threads_argument(parser)

    def run(self, **options):
        db = load_database(options['diagrams'], options['labels'])
        exact = distance_matrix(db, MetricKind.BOTTLENECK, threads=options['threads'])
        tables = evaluation_grid(db, options['k'], threads=options['threads'], exact=exact)
        candidates = options['candidates'] or max(
            1, round(settings.SHAPES['DEFAULT_CANDIDATE_FRACTION'] * (len(db) - 1)),
        )
        survival = survival_grid(db, candidates, options['k'], threads=options['threads'], exact=exact)
        rows = [(method, recall, precision) for method, table in tables.items() for recall, precision in table.to_rows()]
        write_rows(options['out'], ('method', 'recall', 'precision'), rows)
        self.success(f"{options['out']}: {len(tables)} methods")
        for method, fraction in survival.items():
            self.stdout.write(f"{method}: nearest neighbor in top {candidates} for {fraction:.3f} of queries")
