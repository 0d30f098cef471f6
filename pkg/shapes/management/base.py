from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from shapes.diagram import load_diagram_directory
from shapes.exceptions import ShapeError
from shapes.files import read_labels, read_text
from shapes.retrieval import build_database

UNLABELED = 'unlabeled'


class PipelineCommand(BaseCommand):
    """Base for the batch subcommands: domain and I/O failures become one-line ``CommandError``s."""

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except (ShapeError, OSError) as exc:
            raise CommandError(str(exc).splitlines()[0] if str(exc) else exc.__class__.__name__) from exc

    def run(self, **options):
        raise NotImplementedError

    def add_threads_argument(self, parser):
        parser.add_argument('--threads', type=int, default=settings.SHAPES['THREADS'],
                            help='Worker threads for the distance matrix fill')

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))


def load_database(diagrams_dir, labels_path=None):
    diagrams = load_diagram_directory(diagrams_dir)
    if labels_path:
        labels = read_labels(read_text(labels_path))
    else:
        labels = {model_id: UNLABELED for model_id in diagrams}
    return build_database(diagrams, labels)
