from django.conf import settings

from shapes.diagram import save_diagram
from shapes.files import read_text
from shapes.management.base import PipelineCommand
from shapes.mesh_filtration import FilterKind, mesh_diagram, parse_off


class Command(PipelineCommand):
    help = "Compute the 0th persistence diagram of an OFF mesh under the line or plane filtering function"

    def add_arguments(self, parser):
        parser.add_argument('--mesh', required=True, help='Input OFF triangle mesh')
        parser.add_argument('--filter', required=True, choices=[kind.value for kind in FilterKind])
        parser.add_argument('--out', required=True, help='Output diagram CSV')
        parser.add_argument('--tolerance', type=float, default=settings.SHAPES['AXIS_TOLERANCE'],
                            help='Smallest admissible |w| before the axis counts as undefined')

    def run(self, **options):
        mesh = parse_off(read_text(options['mesh']))
        diagram = mesh_diagram(mesh, options['filter'], options['tolerance'])
        save_diagram(options['out'], diagram)
        self.success(f"{options['out']}: {diagram.total_multiplicity} points, {diagram.essential_count} essential")
