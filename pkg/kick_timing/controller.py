"""
Three-phase kick procedure for a moving ball: take the pre-kick posture
before release, wait while estimating the arrival time, trigger the kick
once the ball will reach the kick point within the kick latency.
"""

from dataclasses import dataclass
from enum import Enum
import logging

from core.exceptions import StalledBallError
from simulation.state import TriggerKind

from .estimator import BallTrack

logger = logging.getLogger(__name__)


class KickPhase(str, Enum):
    STANDING = 'Standing'
    PRE_KICK = 'PreKick'
    WAITING = 'Waiting'
    KICKING = 'Kicking'
    DONE = 'Done'

    @property
    def rank(self):
        return list(KickPhase).index(self)


KICK_TRIGGERS = {'Left': TriggerKind.KICK_LEFT, 'Right': TriggerKind.KICK_RIGHT}


@dataclass(frozen=True)
class ArrivalEstimate:
    time: float
    t_arrive: float
    v_smooth: float
    approaching: bool


def kick_controller_step(track, phase, obs, now, kick_latency=None):
    """
    Advance the kick procedure by one control step.

    Args:
        track: BallTrack, updated in place with the observation's ball
        phase: current KickPhase
        obs: perception Observation or None
        now: seconds
        kick_latency: trigger-to-contact time; defaults to the track params

    Returns:
        (KickPhase, trigger or None, ArrivalEstimate or None)
    """
    latency = track.params.kick_latency if kick_latency is None else kick_latency

    if phase == KickPhase.STANDING:
        logger.info(f"Pre-kick posture at t={now:.2f}")
        return KickPhase.PRE_KICK, TriggerKind.PRE_KICK, None
    if phase == KickPhase.PRE_KICK:
        return KickPhase.WAITING, None, None
    if phase == KickPhase.KICKING:
        return KickPhase.DONE, None, None
    if phase == KickPhase.DONE:
        return phase, None, None

    if obs is None or obs.ball is None or (track.S and obs.ball.t <= track.S[-1].t):
        return phase, None, None
    track.push(obs.ball)
    track.update()
    if track.pair is None or not track.V:
        return phase, None, None

    approaching = track.approaching()
    try:
        t_arrive = track.time_of_arrival()
    except StalledBallError:
        return phase, None, None
    estimate = ArrivalEstimate(now, t_arrive, track.v_smooth, approaching)
    if approaching and t_arrive <= latency:
        logger.info(f"Kick triggered at t={now:.2f}: t_arrive={t_arrive:.3f} s, v={estimate.v_smooth:.3f} m/s")
        return KickPhase.KICKING, KICK_TRIGGERS[track.params.foot], estimate
    return phase, None, estimate


class KickTimingController:
    """Owns the ball track and phase of one moving-ball attempt."""

    def __init__(self, params=None):
        self.track = BallTrack(params)
        self.phase = KickPhase.STANDING
        self.estimates = []
        self.trigger_time = None

    @property
    def params(self):
        return self.track.params

    def step(self, obs, now):
        phase, trigger, estimate = kick_controller_step(self.track, self.phase, obs, now)
        if estimate is not None:
            self.estimates.append(estimate)
        if trigger in (TriggerKind.KICK_LEFT, TriggerKind.KICK_RIGHT):
            self.trigger_time = now
        self.phase = phase
        return trigger
