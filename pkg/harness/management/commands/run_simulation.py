"""
Django Management Command: Run Simulation

Runs a scenario for every seed of a run config, writes one trace per seed
and prints a per-seed summary. Exits non-zero when any trace fails
verification.

Usage:
    python manage.py run_simulation --config config/match.json --seeds 1..10 --out runs/
    python manage.py run_simulation --config config/match.json --set scenario.duration=60
    python manage.py run_simulation --config config/avoidance.json --seeds 1..200 --save
"""

from django.core.management.base import BaseCommand, CommandError
from django.db import transaction
from django.utils import timezone

from core.exceptions import RobosoccerError
from harness.config import load_run_config
from harness.models import MatchReportRecord, SimulationRun
from harness.tasks import run_batch


def report_line(report):
    lock = f"{report.lock_time:.2f}s" if report.lock_time is not None else 'none'
    line = (f"seed {report.seed}: score {report.score[0]}:{report.score[1]}, lock {lock}, "
            f"collisions {report.collisions}, violations {report.violations}")
    if report.challenge is not None and report.challenge.trigger_error is not None:
        line += f", trigger error {report.challenge.trigger_error:+.4f}s"
    return line


def save_reports(config, seeds_text, reports, started_at):
    """Persist one SimulationRun with a record per report."""
    with transaction.atomic():
        run = SimulationRun.objects.create(
            scenario=config.scenario.name,
            seeds=seeds_text,
            config=config.to_dict(),
            output_dir=str(config.output_path),
            status='failed' if any(r.violations for r in reports) else 'complete',
            started_at=started_at,
            finished_at=timezone.now(),
        )
        MatchReportRecord.objects.bulk_create([MatchReportRecord.from_report(run, r) for r in reports])
    return run


class Command(BaseCommand):
    help = 'Run a simulation scenario for a batch of seeds and write trace files'

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            help='Run config file (JSON or key=value); defaults apply when omitted',
        )
        parser.add_argument(
            '--seeds',
            help='Seeds as a..b (inclusive), a comma list or a single integer',
        )
        parser.add_argument(
            '--out',
            help='Output directory for traces (default: SIMULATION_OUTPUT_DIR)',
        )
        parser.add_argument(
            '--set',
            action='append',
            default=[],
            dest='overrides',
            metavar='SECTION.KEY=VALUE',
            help='Override one config value; may be repeated',
        )
        parser.add_argument(
            '--save',
            action='store_true',
            help='Persist the run and its reports to the database',
        )

    def handle(self, *args, **options):
        started_at = timezone.now()
        try:
            config = load_run_config(
                options['config'], options['overrides'], seeds=options['seeds'], output_dir=options['out'],
            )
            reports = run_batch(config)
        except RobosoccerError as exc:
            raise CommandError(str(exc))

        for report in reports:
            style = self.style.ERROR if report.violations else self.style.SUCCESS
            self.stdout.write(style(report_line(report)))

        if options['save']:
            run = save_reports(config, options['seeds'] or ','.join(map(str, config.seeds)), reports, started_at)
            self.stdout.write(self.style.HTTP_INFO(f"Saved run {run.id}"))

        failing = [r.seed for r in reports if r.violations]
        if failing:
            raise CommandError(f"{len(failing)} run(s) violated invariants: seeds {failing}")
        self.stdout.write(self.style.SUCCESS(f"{len(reports)} run(s) written to {config.output_path}"))
