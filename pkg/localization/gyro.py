"""
Integrated gyro yaw, the only heading reference of the robot.
"""

from dataclasses import dataclass, replace
import math

from core.exceptions import DomainError


@dataclass(frozen=True)
class GyroState:
    """
    yaw_integrated is never wrapped; hypotheses wrap their own headings.
    bias records the simulated drift the sensor was configured with.
    The per-start reference offset lives on each localization.bank.Hypothesis
    (``reference_offset``): one gyro feeds every hypothesis, each with its
    own offset.
    """
    yaw_integrated: float = 0.0
    bias: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.yaw_integrated):
            raise DomainError('yaw_integrated must be finite')


def integrate_gyro(g, omega_measured, dt):
    """
    Advance the integrated yaw by one rate sample.

    ``omega_measured`` already contains the sensor bias and noise.
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    return replace(g, yaw_integrated=g.yaw_integrated + omega_measured * dt)
