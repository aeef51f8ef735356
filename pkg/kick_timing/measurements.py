"""
Ball measurements shared by perception (producer) and kick timing (consumer).
"""

from dataclasses import dataclass

from core.exceptions import DomainError


@dataclass(frozen=True)
class BallMeasurement:
    """
    One ball detection <p, r, t>.

    ``r`` is the ball position on the field surface relative to the robot,
    meters; ``p`` the detection confidence; ``t`` the stamp in seconds.
    """
    p: float
    r: tuple
    t: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"confidence {self.p} outside [0, 1]")
        object.__setattr__(self, 'r', (float(self.r[0]), float(self.r[1])))
