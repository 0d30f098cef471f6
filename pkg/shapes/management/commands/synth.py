from pathlib import Path

from shapes.diagram import serialize_diagram
from shapes.files import atomic_write, write_rows
from shapes.management.base import PipelineCommand
from shapes.synthetic import SynthesisParameters, synthesize_database


class Command(PipelineCommand):
    help = "Generate a seeded synthetic labeled database of persistence diagrams"

    def add_arguments(self, parser):
        defaults = SynthesisParameters()
        parser.add_argument('--classes', type=int, default=defaults.classes)
        parser.add_argument('--per-class', type=int, default=defaults.per_class)
        parser.add_argument('--base-points', type=int, default=defaults.base_points)
        parser.add_argument('--jitter', type=float, default=defaults.jitter, help='Uniform jitter half-width')
        parser.add_argument('--noise', type=int, default=defaults.noise_points, help='Noise points per diagram')
        parser.add_argument('--band', type=float, default=defaults.noise_band, help='Noise band width above the diagonal')
        parser.add_argument('--seed', type=int, default=defaults.seed)
        parser.add_argument('--out', required=True, help='Output directory for diagram CSV files')
        parser.add_argument('--labels', required=True, help='Output id,class CSV')

    def run(self, **options):
        db = synthesize_database(SynthesisParameters(
            classes=options['classes'], per_class=options['per_class'], base_points=options['base_points'],
            jitter=options['jitter'], noise_points=options['noise'], noise_band=options['band'],
            seed=options['seed'],
        ))
        out = Path(options['out'])
        out.mkdir(parents=True, exist_ok=True)
        for entry in db.entries:
            with atomic_write(out / f"{entry.model_id}.csv") as handle:
                handle.write(serialize_diagram(entry.diagram))
        write_rows(options['labels'], ('id', 'class'), zip(db.ids, db.labels))
        self.success(f"{out}: {len(db)} diagrams in {options['classes']} classes")
