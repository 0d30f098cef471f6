from django.conf import settings

from shapes.management.base import PipelineCommand, load_database
from shapes.retrieval import embed_database, save_index, storage_cost
from shapes.transforms import TransformKind
from shapes.viete import database_width, default_k


class Command(PipelineCommand):
    help = "Embed a directory of diagrams as complex coefficient vectors and write the index"

    def add_arguments(self, parser):
        parser.add_argument('--diagrams', required=True, help='Directory of diagram CSV files (id = file stem)')
        parser.add_argument('--transform', choices=[kind.value for kind in TransformKind],
                            default=settings.SHAPES['DEFAULT_TRANSFORM'])
        parser.add_argument('-k', '--k', type=int, default=None, help='Number of coefficients (default floor(sqrt(M)))')
        parser.add_argument('--labels', default=None, help='Optional id,class CSV')
        parser.add_argument('--out', required=True, help='Output index CSV')

    def run(self, **options):
        db = load_database(options['diagrams'], options['labels'])
        width = max(database_width(db.diagrams()), 1)
        k = options['k'] if options['k'] is not None else default_k(width)
        embedded = embed_database(db, options['transform'], k, width)
        save_index(embedded, options['out'], options['transform'], k, width)
        cost = storage_cost(embedded, options['transform'], k) if len(embedded) else None
        self.success(f"{options['out']}: {len(embedded)} models, M={width}, k={k}")
        if cost:
            self.stdout.write(f"reals per model: diagram {cost['diagram_reals']:g}, vector {cost['vector_reals']}")
