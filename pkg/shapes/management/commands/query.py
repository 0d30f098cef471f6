from django.conf import settings

from shapes.diagram import load_diagram_directory
from shapes.exceptions import PaddingError
from shapes.files import write_rows
from shapes.management.base import PipelineCommand
from shapes.metrics import COEFFICIENT_METRICS
from shapes.retrieval import load_index, two_stage_hits


class Command(PipelineCommand):
    help = "Two-stage retrieval: coefficient prefilter, then bottleneck re-ranking of the best candidates"

    def add_arguments(self, parser):
        parser.add_argument('--index', required=True, help='Coefficient index CSV')
        parser.add_argument('--diagrams', required=True, help='Directory of diagram CSV files')
        parser.add_argument('--id', required=True, dest='model_id', help='Query model id')
        parser.add_argument('--metric', choices=[kind.value for kind in COEFFICIENT_METRICS],
                            default=settings.SHAPES['DEFAULT_METRIC'])
        parser.add_argument('--candidates', type=int, required=True, help='Items re-ranked by bottleneck distance')
        parser.add_argument('--out', default=None, help='Optional output CSV of the ranking')

    def run(self, **options):
        db = load_index(options['index'])
        transform, k = db.embedding_keys()[0] if len(db) else (None, None)
        width = db.width(transform, k) if len(db) else 0
        diagrams = load_diagram_directory(options['diagrams'])
        oversized = sorted(model_id for model_id, diagram in diagrams.items() if diagram.total_multiplicity > width)
        if oversized:
            raise PaddingError(f"Diagrams larger than the index width M={width}: {', '.join(oversized)}; "
                               f"re-run embed on the current diagrams")
        db = db.with_diagrams(diagrams)
        db.entry(options['model_id'])
        hits = two_stage_hits(options['model_id'], db, transform, options['metric'], k, options['candidates'])
        rows = [
            (rank, hit.model_id, format(hit.prefilter_distance, '.17g'),
             '' if hit.bottleneck_distance is None else format(hit.bottleneck_distance, '.17g'))
            for rank, hit in enumerate(hits, start=1)
        ]
        if options['out']:
            write_rows(options['out'], ('rank', 'id', 'prefilter', 'bottleneck'), rows)
        for row in rows:
            self.stdout.write(','.join(map(str, row)))
