"""
Moving-ball challenge: configuration of a trial batch and the per-trial
outcome recomputed from the trace.
"""

from dataclasses import dataclass, replace
import logging
import math

import numpy as np

from simulation.scenarios import MOVING_BALL_CHALLENGE

logger = logging.getLogger(__name__)

CHALLENGE_MOVING_BALL = 'moving-ball'
CHALLENGE_CHOICES = [
    (CHALLENGE_MOVING_BALL, 'Kick a ball rolled off a ramp along the goal-area line'),
]


@dataclass(frozen=True)
class ChallengeOutcome:
    """
    ``intercept_time`` is the closed-form time at which the ball center
    reaches the kick point; ``ideal_trigger`` subtracts the true kick
    latency from it. ``contact_distance`` is the ball to foot-point
    distance when the kick fired (None when no kick came due).
    """
    d_ramp: float
    release_speed: float
    trigger_time: float = None
    intercept_time: float = None
    ideal_trigger: float = None
    trigger_error: float = None
    contact_distance: float = None
    kicked: bool = False
    goal: bool = False
    estimates: tuple = ()

    def to_dict(self):
        return {
            'd_ramp': self.d_ramp,
            'release_speed': self.release_speed,
            'trigger_time': self.trigger_time,
            'intercept_time': self.intercept_time,
            'ideal_trigger': self.ideal_trigger,
            'trigger_error': self.trigger_error,
            'contact_distance': self.contact_distance,
            'kicked': self.kicked,
            'goal': self.goal,
            'estimates': [list(e) for e in self.estimates],
        }


def arrival_time(distance, speed, decel=0.0):
    """
    Time for a ball released at ``speed`` and slowing by ``decel`` to cover
    ``distance``; None when it stops short.
    """
    if speed <= 0:
        return None
    if decel <= 0:
        return distance / speed
    disc = speed * speed - 2.0 * decel * distance
    if disc < 0:
        return None
    return (speed - math.sqrt(disc)) / decel


def challenge_outcome(rows, params_row):
    d_ramp = params_row.number('d_ramp', 0.0)
    speed = params_row.number('release_speed', 0.0)
    intercept = arrival_time(d_ramp, speed, params_row.number('ball_friction_decel', 0.0))
    ideal = None if intercept is None else intercept - params_row.number('kick_latency', 0.0)

    trigger = next((r for r in rows if r.kind == 'trigger'), None)
    kick = next((r for r in rows if r.kind in ('kick', 'kick_rejected')), None)
    trigger_time = trigger.time if trigger is not None else None
    error = None
    if trigger_time is not None and ideal is not None:
        error = trigger_time - ideal
    return ChallengeOutcome(
        d_ramp=d_ramp,
        release_speed=speed,
        trigger_time=trigger_time,
        intercept_time=intercept,
        ideal_trigger=ideal,
        trigger_error=error,
        contact_distance=kick.number('distance') if kick is not None else None,
        kicked=kick is not None and kick.kind == 'kick',
        goal=any(r.kind == 'goal' and r.extra.get('team') == 'home' for r in rows),
        estimates=tuple((r.time, r.number('t_arrive')) for r in rows if r.kind == 'estimate'),
    )


def challenge_config(config, d_ramp, speed, foot=None):
    """RunConfig for a moving-ball batch at ramp distance ``d_ramp`` and release ``speed``."""
    scenario = replace(config.scenario, name=MOVING_BALL_CHALLENGE, d_ramp=d_ramp, release_speed=speed)
    if foot is not None:
        scenario = replace(scenario, challenge_foot=foot)
    scenario.clean()
    return replace(config, scenario=scenario)


@dataclass(frozen=True)
class ChallengeSummary:
    trials: int
    triggered: int
    kicked: int
    goals: int
    success_rate: float
    kick_region_rate: float
    mean_abs_error: float = None
    max_abs_error: float = None


def summarize(outcomes):
    """Batch statistics over ChallengeOutcome objects."""
    outcomes = list(outcomes)
    trials = len(outcomes)
    errors = np.array([abs(o.trigger_error) for o in outcomes if o.trigger_error is not None])
    summary = ChallengeSummary(
        trials=trials,
        triggered=sum(1 for o in outcomes if o.trigger_time is not None),
        kicked=sum(1 for o in outcomes if o.kicked),
        goals=sum(1 for o in outcomes if o.goal),
        success_rate=sum(1 for o in outcomes if o.goal) / trials if trials else 0.0,
        kick_region_rate=sum(1 for o in outcomes if o.kicked) / trials if trials else 0.0,
        mean_abs_error=float(errors.mean()) if errors.size else None,
        max_abs_error=float(errors.max()) if errors.size else None,
    )
    logger.info(f"Challenge: {summary.goals}/{trials} goals, {summary.kicked} kicks in region")
    return summary
