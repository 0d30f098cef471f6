#!/usr/bin/env python
"""Administrative entry point; also runs the batch subcommands, e.g. ``./manage.py embed --diagrams d --out i.csv``."""
import os
import sys

from django.core.management import execute_from_command_line


if __name__ == '__main__':
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'root.settings')
    execute_from_command_line(sys.argv)
