"""
Persisted batch runs and their per-seed reports.
Traces stay on disk; rows here point at them.
"""

from django.db import models
from core.models import BaseModel


class SimulationRun(BaseModel):
    """
    One run_simulation or run_challenge invocation.
    """
    STATUS_CHOICES = [
        ('running', 'Running'),
        ('complete', 'Complete'),
        ('failed', 'Failed'),
    ]

    scenario = models.CharField(max_length=40)
    seeds = models.CharField(max_length=200, help_text="Seed list as given on the command line")
    config = models.JSONField(default=dict)
    output_dir = models.CharField(max_length=500)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='running')
    started_at = models.DateTimeField(null=True, blank=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created']

    def __str__(self):
        return f"{self.scenario} [{self.seeds}] {self.status}"

    @property
    def goals_for(self):
        return sum(r.goals_for for r in self.reports.all())

    @property
    def violation_total(self):
        return sum(r.violations for r in self.reports.all())


class MatchReportRecord(BaseModel):
    """
    Summary of one seed, recomputed from its trace.
    """
    run = models.ForeignKey(SimulationRun, on_delete=models.CASCADE, related_name='reports')
    seed = models.BigIntegerField()
    trace_path = models.CharField(max_length=500)
    goals_for = models.PositiveIntegerField(default=0)
    goals_against = models.PositiveIntegerField(default=0)
    goal_times = models.JSONField(default=list, blank=True)
    transitions = models.JSONField(default=dict, blank=True)
    lock_time = models.FloatField(null=True, blank=True, help_text="First localization lock of the home robot (s)")
    lock_label = models.CharField(max_length=40, blank=True)
    lock_correct = models.BooleanField(null=True, blank=True)
    collisions = models.PositiveIntegerField(default=0)
    violations = models.PositiveIntegerField(default=0)
    trigger_error = models.FloatField(null=True, blank=True, help_text="Moving-ball trigger error (s)")

    class Meta:
        ordering = ['run', 'seed']
        unique_together = [['run', 'seed']]

    def __str__(self):
        return f"seed {self.seed}: {self.goals_for}:{self.goals_against}"

    @classmethod
    def from_report(cls, run, report):
        """Unsaved record mirroring a MatchReport."""
        home_lock = next((lock for lock in report.locks if lock.robot_id == 0), None)
        return cls(
            run=run,
            seed=report.seed,
            trace_path=report.trace_path,
            goals_for=report.score[0],
            goals_against=report.score[1],
            goal_times=[[g.time, g.team] for g in report.goals],
            transitions=dict(report.transitions),
            lock_time=home_lock.time if home_lock else None,
            lock_label=home_lock.label if home_lock else '',
            lock_correct=home_lock.correct if home_lock else None,
            collisions=report.collisions,
            violations=report.violations,
            trigger_error=report.challenge.trigger_error if report.challenge is not None else None,
        )
