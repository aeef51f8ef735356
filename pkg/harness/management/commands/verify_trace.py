"""
Django Management Command: Verify Trace

Re-checks the loggable invariants of a trace offline and lists every
violation with its line number. Violations are report content; the
command exits non-zero only when the trace cannot be parsed, or with
--strict when violations were found.

Usage:
    python manage.py verify_trace --trace runs/AvoidanceDrill_seed000003.csv
    python manage.py verify_trace --trace runs/Match_seed000001.csv --strict
"""

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import TraceParseError
from harness.verify import verify_trace


class Command(BaseCommand):
    help = 'Verify the invariants recorded in a simulation trace'

    def add_arguments(self, parser):
        parser.add_argument('--trace', required=True, help='Trace CSV file')
        parser.add_argument(
            '--strict',
            action='store_true',
            help='Exit non-zero when any violation is found',
        )

    def handle(self, *args, **options):
        try:
            report = verify_trace(options['trace'])
        except TraceParseError as exc:
            raise CommandError(str(exc))

        for violation in report.violations:
            self.stdout.write(self.style.WARNING(
                f"line {violation.line_no}: [{violation.check}] {violation.message}"
            ))
        summary = f"{report.rows_checked} rows checked, {len(report.violations)} violation(s)"
        if report.ok:
            self.stdout.write(self.style.SUCCESS(summary))
            return
        counts = ', '.join(f"{check}={count}" for check, count in sorted(report.counts().items()))
        self.stdout.write(self.style.ERROR(f"{summary} ({counts})"))
        if options['strict']:
            raise CommandError('trace failed verification')
