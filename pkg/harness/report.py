"""
MatchReport, always recomputed from a trace so report and trace agree.
"""

from collections import Counter
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from simulation.scenarios import MOVING_BALL_CHALLENGE
from simulation.trace import read_trace

from .challenge import challenge_outcome
from .verify import verify_rows


@dataclass(frozen=True)
class GoalRecord:
    time: float
    team: str


@dataclass(frozen=True)
class LockRecord:
    robot_id: int
    time: float
    label: str
    confirmed: bool
    correct: bool


@dataclass(frozen=True)
class MatchReport:
    seed: int
    scenario: str
    trace_path: str
    score: tuple = (0, 0)
    goals: tuple = ()
    transitions: dict = dc_field(default_factory=dict)
    locks: tuple = ()
    collisions: int = 0
    violations: int = 0
    violation_counts: dict = dc_field(default_factory=dict)
    challenge: object = None

    @property
    def lock_time(self):
        """First lock time of the home robot (id 0), None if it never locked."""
        return next((lock.time for lock in self.locks if lock.robot_id == 0), None)

    @property
    def lock_correct(self):
        return next((lock.correct for lock in self.locks if lock.robot_id == 0), None)

    def to_dict(self):
        return {
            'seed': self.seed,
            'scenario': self.scenario,
            'trace_path': self.trace_path,
            'score': list(self.score),
            'goals': [[g.time, g.team] for g in self.goals],
            'transitions': dict(self.transitions),
            'locks': [
                {'robot_id': k.robot_id, 'time': k.time, 'label': k.label,
                 'confirmed': k.confirmed, 'correct': k.correct}
                for k in self.locks
            ],
            'collisions': self.collisions,
            'violations': self.violations,
            'violation_counts': dict(self.violation_counts),
            'challenge': self.challenge.to_dict() if self.challenge is not None else None,
        }


def report_from_rows(rows, trace_path=''):
    params = next((r for r in rows if r.kind == 'params'), None)
    seed = int(params.number('seed', 0)) if params is not None else 0
    scenario = params.extra.get('scenario', '') if params is not None else ''

    goals = tuple(GoalRecord(r.time, r.extra.get('team')) for r in rows if r.kind == 'goal')
    finish = next((r for r in reversed(rows) if r.kind == 'finish'), None)
    if finish is not None:
        score = (int(finish.number('own', 0)), int(finish.number('opponent', 0)))
    else:
        score = (sum(1 for g in goals if g.team == 'home'), sum(1 for g in goals if g.team == 'away'))

    transitions = Counter(
        f"{r.extra.get('fsm')}:{r.extra.get('from')}->{r.extra.get('to')}" for r in rows if r.kind == 'fsm'
    )
    start_labels = {r.actor_id: r.extra.get('label') for r in rows if r.kind == 'start'}
    locks = tuple(
        LockRecord(r.actor_id, r.time, r.extra.get('label'), r.flag('confirmed'),
                   r.extra.get('label') == start_labels.get(r.actor_id))
        for r in rows if r.kind == 'lock'
    )
    verification = verify_rows(rows)
    challenge = None
    if scenario == MOVING_BALL_CHALLENGE and params is not None:
        challenge = challenge_outcome(rows, params)

    return MatchReport(
        seed=seed,
        scenario=scenario,
        trace_path=str(trace_path),
        score=score,
        goals=goals,
        transitions=dict(sorted(transitions.items())),
        locks=locks,
        collisions=sum(1 for r in rows if r.kind == 'collision'),
        violations=len(verification.violations),
        violation_counts=verification.counts(),
        challenge=challenge,
    )


def report_from_trace(trace_path):
    """Recompute the MatchReport of a trace file."""
    return report_from_rows(read_trace(trace_path), Path(trace_path))
