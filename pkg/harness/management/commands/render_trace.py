"""
Django Management Command: Render Trace

Draws a trace file as a static SVG field plot.

Usage:
    python manage.py render_trace --trace runs/Match_seed000001.csv --out match.svg
"""

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import TraceParseError
from harness.svg import render_svg


class Command(BaseCommand):
    help = 'Render a simulation trace to SVG'

    def add_arguments(self, parser):
        parser.add_argument('--trace', required=True, help='Trace CSV file')
        parser.add_argument('--out', help='SVG file (default: trace path with .svg)')

    def handle(self, *args, **options):
        try:
            path = render_svg(options['trace'], options['out'])
        except TraceParseError as exc:
            raise CommandError(str(exc))
        self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
