"""
Moving-ball arrival estimation.

Ball measurements are stacked as they arrive. The two latest measurements
passing the admission rule give a speed estimate (distance over time);
the last ``window`` estimates are averaged, and the time of arrival at the
kick point is the remaining distance over that average.
"""

from collections import deque
from dataclasses import dataclass
import logging
import math

import numpy as np

from core.config import build_section
from core.exceptions import ConfigurationError, DomainError, SimulationStateError, StalledBallError

logger = logging.getLogger(__name__)

ADMISSION_AND = 'and'
ADMISSION_OR = 'or'
ADMISSION_RULE_CHOICES = [
    (ADMISSION_AND, 'Both confidences above p_min and time gap above delta_t'),
    (ADMISSION_OR, 'Both confidences above p_min, or time gap above delta_t'),
]


@dataclass(frozen=True)
class KickTimingParams:
    """
    ``r_kick`` is egocentric: the ball position at which the designated
    foot meets it. ``kick_latency`` is the controller's belief of the time
    from trigger to foot contact.
    """
    p_min: float = 0.5
    delta_t: float = 0.1
    window: int = 3
    r_kick: tuple = (0.25, -0.1)
    v_eps: float = 0.02
    admission_rule: str = ADMISSION_AND
    kick_latency: float = 0.3
    foot: str = 'Right'
    stack_limit: int = 64

    def clean(self):
        if not 0.0 <= self.p_min <= 1.0:
            raise ConfigurationError('p_min', 'must be within [0, 1]')
        if not self.delta_t > 0:
            raise ConfigurationError('delta_t', 'must be > 0')
        if self.window < 1:
            raise ConfigurationError('window', 'must be >= 1')
        if len(self.r_kick) != 2 or not all(math.isfinite(v) for v in self.r_kick):
            raise ConfigurationError('r_kick', 'must be a finite 2D point')
        if not self.v_eps > 0:
            raise ConfigurationError('v_eps', 'must be > 0')
        if self.admission_rule not in dict(ADMISSION_RULE_CHOICES):
            raise ConfigurationError('admission_rule', 'must be "and" or "or"')
        if self.kick_latency < 0:
            raise ConfigurationError('kick_latency', 'must be >= 0')
        if self.foot not in ('Left', 'Right'):
            raise ConfigurationError('foot', 'must be Left or Right')
        if self.stack_limit < 2:
            raise ConfigurationError('stack_limit', 'must be >= 2')

    @classmethod
    def from_dict(cls, data, prefix='kick_timing'):
        return build_section(cls, data, prefix=prefix)


def _confident(s, p_min):
    return s.p > p_min


def admit_pair(S, params=None):
    """
    The two latest measurements satisfying the admission rule.

    ``s2`` is the newest eligible measurement and ``s1`` the newest older
    one that forms an admissible pair with it. Under the "and" rule both
    must be confident and more than ``delta_t`` apart; under "or" either
    both are confident or they are more than ``delta_t`` apart.

    Returns:
        (s1, s2) or None
    """
    params = params or KickTimingParams()
    S = list(S)
    if len(S) < 2:
        return None

    if params.admission_rule == ADMISSION_AND:
        newest = [i for i in range(len(S) - 1, -1, -1) if _confident(S[i], params.p_min)]
        if not newest:
            return None
        s2 = S[newest[0]]
        for i in newest[1:]:
            if s2.t - S[i].t > params.delta_t:
                return S[i], s2
        return None

    s2 = S[-1]
    for s1 in reversed(S[:-1]):
        both = _confident(s1, params.p_min) and _confident(s2, params.p_min)
        if both or s2.t - s1.t > params.delta_t:
            return s1, s2
    return None


def estimate_velocity(s1, s2):
    """Ball speed from two measurements: d(r2, r1) / (t2 - t1)."""
    if not s2.t > s1.t:
        raise DomainError(f"measurements out of order: t1={s1.t}, t2={s2.t}")
    return math.hypot(s2.r[0] - s1.r[0], s2.r[1] - s1.r[1]) / (s2.t - s1.t)


def smooth_velocity(V):
    """Mean of the speed estimates currently held (at most the window size)."""
    if not len(V):
        raise SimulationStateError('no velocity estimates to smooth')
    return float(np.mean(V))


def time_of_arrival(r_kick, r2, v_smooth, v_eps=0.02):
    """Seconds until a ball at ``r2`` moving at ``v_smooth`` reaches ``r_kick``."""
    if not v_smooth > v_eps:
        raise StalledBallError(f"smoothed speed {v_smooth:.4f} m/s at or below {v_eps} m/s")
    return math.hypot(r_kick[0] - r2[0], r_kick[1] - r2[1]) / v_smooth


class BallTrack:
    """
    Measurement stack S and velocity deque V of one kick attempt.

    Measurements must arrive with strictly increasing stamps. ``update``
    pushes one speed estimate per newly admitted pair.
    """

    def __init__(self, params=None):
        self.params = params or KickTimingParams()
        self.params.clean()
        self.S = deque(maxlen=self.params.stack_limit)
        self.V = deque(maxlen=self.params.window)
        self.pair = None

    def push(self, measurement):
        if self.S and not measurement.t > self.S[-1].t:
            raise DomainError(f"measurement at t={measurement.t} is not newer than t={self.S[-1].t}")
        self.S.append(measurement)

    def update(self):
        """Admit the newest pair and push its speed; returns the pair or None."""
        pair = admit_pair(self.S, self.params)
        if pair is None or pair == self.pair:
            return None
        v = estimate_velocity(*pair)
        self.V.append(v)
        self.pair = pair
        logger.debug(f"Ball speed estimate {v:.3f} m/s from t={pair[0].t:.2f}..{pair[1].t:.2f}")
        return pair

    @property
    def v_smooth(self):
        return smooth_velocity(self.V)

    def approaching(self):
        """True while the admitted pair shows the ball closing in on r_kick."""
        if self.pair is None:
            return False
        s1, s2 = self.pair
        r_kick = self.params.r_kick
        d1 = math.hypot(r_kick[0] - s1.r[0], r_kick[1] - s1.r[1])
        d2 = math.hypot(r_kick[0] - s2.r[0], r_kick[1] - s2.r[1])
        return d2 < d1

    def time_of_arrival(self):
        return time_of_arrival(self.params.r_kick, self.pair[1].r, self.v_smooth, self.params.v_eps)
