from shapes.files import read_labels, read_text, write_rows
from shapes.management.base import PipelineCommand
from shapes.retrieval import parse_distance_matrix, pr_curve


class Command(PipelineCommand):
    help = "Interpolated, macro-averaged precision/recall table of a distance matrix"

    def add_arguments(self, parser):
        parser.add_argument('--matrix', required=True, help='Distance matrix CSV')
        parser.add_argument('--labels', required=True, help='id,class CSV')
        parser.add_argument('--out', required=True, help='Output recall,precision CSV')

    def run(self, **options):
        matrix = parse_distance_matrix(read_text(options['matrix']))
        table = pr_curve(matrix, read_labels(read_text(options['labels'])))
        write_rows(options['out'], ('recall', 'precision'), table.to_rows())
        self.success(f"{options['out']}: {len(table.recall)} recall levels")
