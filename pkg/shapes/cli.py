"""Batch command-line entry point: ``python -m shapes <subcommand> ...``."""
import os
import sys

SUBCOMMANDS = ('diagram', 'embed', 'dist', 'pr', 'query', 'synth', 'evaluate')


def run(argv=None):
    """Run one subcommand and return its exit status (0 on success, 1 on any failure)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(f"usage: shapes {{{','.join(SUBCOMMANDS)}}} [options]\n")
        return 1
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'root.settings')
    from django.core.management import execute_from_command_line
    try:
        execute_from_command_line(['shapes', *argv])
    except SystemExit as exc:
        return 0 if exc.code in (None, 0) else 1
    return 0
