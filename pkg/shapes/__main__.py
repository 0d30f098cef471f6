import sys

from shapes.cli import run

sys.exit(run())
