"""
Django Management Command: Run Challenge

Runs a batch of technical-challenge trials and prints per-trial trigger
errors plus the batch summary.

Usage:
    python manage.py run_challenge moving-ball --d-ramp 1.0 --speed 0.6 --seeds 1..100
    python manage.py run_challenge moving-ball --d-ramp 1.5 --speed 0.4 --seeds 1..20 --foot Left
"""

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import RobosoccerError
from harness.challenge import CHALLENGE_CHOICES
from harness.config import load_run_config
from harness.tasks import run_challenge

DEFAULT_CONFIG = 'config/challenge.json'


class Command(BaseCommand):
    help = 'Run a technical challenge for a batch of seeds'

    def add_arguments(self, parser):
        parser.add_argument('challenge', choices=[name for name, _ in CHALLENGE_CHOICES])
        parser.add_argument('--d-ramp', type=float, required=True, help='Ramp distance to the kick point (m)')
        parser.add_argument('--speed', type=float, required=True, help='Ball release speed (m/s)')
        parser.add_argument('--seeds', default='0', help='Seeds as a..b, a comma list or an integer')
        parser.add_argument('--foot', choices=['Left', 'Right'], help='Kicking foot')
        parser.add_argument('--out', help='Output directory for traces')
        parser.add_argument('--config', default=DEFAULT_CONFIG, help='Base run config')
        parser.add_argument(
            '--set',
            action='append',
            default=[],
            dest='overrides',
            metavar='SECTION.KEY=VALUE',
            help='Override one config value; may be repeated',
        )

    def handle(self, *args, **options):
        try:
            config = load_run_config(
                options['config'], options['overrides'], seeds=options['seeds'], output_dir=options['out'],
            )
            reports, summary = run_challenge(config, options['d_ramp'], options['speed'], options['foot'])
        except RobosoccerError as exc:
            raise CommandError(str(exc))

        self.stdout.write(self.style.HTTP_INFO(
            f"=== {options['challenge']}: d_ramp {options['d_ramp']} m, speed {options['speed']} m/s ==="
        ))
        for report in reports:
            outcome = report.challenge
            if outcome is None or outcome.trigger_time is None:
                self.stdout.write(self.style.WARNING(f"seed {report.seed}: no trigger"))
                continue
            error = f"{outcome.trigger_error:+.4f}s" if outcome.trigger_error is not None else 'n/a'
            status = 'goal' if outcome.goal else ('kick' if outcome.kicked else 'miss')
            self.stdout.write(f"seed {report.seed}: trigger {outcome.trigger_time:.3f}s, error {error}, {status}")

        self.stdout.write(self.style.SUCCESS(
            f"{summary.goals}/{summary.trials} goals, {summary.kicked} kicks in region, "
            f"mean |error| {summary.mean_abs_error if summary.mean_abs_error is not None else 'n/a'}"
        ))
        failing = [r.seed for r in reports if r.violations]
        if failing:
            raise CommandError(f"{len(failing)} trial(s) violated invariants: seeds {failing}")
