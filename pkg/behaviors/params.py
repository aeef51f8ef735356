"""
Behavior parameters, read from the ``behavior.`` section of a run config.
"""

from dataclasses import dataclass
import math

from core.config import build_section
from core.exceptions import ConfigurationError


@dataclass(frozen=True)
class BehaviorParams:
    # ball approach
    halo_radius: float = 0.65
    near_enter: float = 1.0
    near_exit: float = 1.3
    near_speed_factor: float = 0.5
    turn_gain: float = 1.5
    position_gain: float = 1.2
    # obstacle avoidance
    influence_radius: float = 1.5
    d_repel: float = 0.35
    v_cap: float = 0.3
    min_slowdown: float = 0.5
    avoid_turn_gain: float = 0.4
    detour_clearance: float = 0.6
    # obstacle ball handling
    corridor_half_width: float = 0.45
    close_threshold: float = 0.5
    goal_margin: float = 0.2
    sweep_step_deg: float = 0.25
    max_rotation_deg: float = 90.0
    # kicking and dribbling
    kick_lateral_tol: float = 0.05
    kick_angle_tol: float = 0.1
    kick_reach: float = 0.08
    dribble_lock_factor: float = 2.5
    dribble_speed: float = 0.3
    dribble_lock_distance: float = 0.9
    lateral_gain: float = 2.0
    heading_gain: float = 1.5
    # game level
    ball_lost_timeout: float = 5.0
    defend_radius: float = 1.0
    last_defender: bool = False
    search_omega: float = 0.6
    pose_tolerance: float = 0.1
    pose_angle_tolerance: float = 0.15
    # body model, kept equal to the simulator's
    v_max: float = 0.5
    omega_max: float = 1.0
    foot_forward: float = 0.25
    foot_lateral: float = 0.1

    def clean(self):
        positive = (
            'halo_radius', 'near_enter', 'near_exit', 'turn_gain', 'position_gain', 'influence_radius',
            'v_cap', 'corridor_half_width', 'close_threshold', 'sweep_step_deg', 'max_rotation_deg',
            'kick_lateral_tol', 'kick_angle_tol', 'kick_reach', 'dribble_speed', 'dribble_lock_distance',
            'lateral_gain', 'heading_gain', 'ball_lost_timeout', 'defend_radius', 'search_omega',
            'pose_tolerance', 'pose_angle_tolerance', 'v_max', 'omega_max', 'foot_forward', 'foot_lateral',
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')
        if not self.near_enter < self.near_exit:
            raise ConfigurationError('near_enter', 'must be < near_exit')
        if not 0.0 < self.near_speed_factor <= 1.0:
            raise ConfigurationError('near_speed_factor', 'must be within (0, 1]')
        if not 0.0 <= self.d_repel < self.influence_radius:
            raise ConfigurationError('d_repel', 'must be >= 0 and < influence_radius')
        if not 0.0 < self.min_slowdown <= 1.0:
            raise ConfigurationError('min_slowdown', 'must be within (0, 1]')
        if not self.d_repel < self.detour_clearance < self.influence_radius:
            raise ConfigurationError('detour_clearance', 'must be > d_repel and < influence_radius')
        if self.avoid_turn_gain < 0 or self.goal_margin < 0:
            raise ConfigurationError('avoid_turn_gain', 'gains and margins must be >= 0')
        if self.dribble_lock_factor < 1.0:
            raise ConfigurationError('dribble_lock_factor', 'must be >= 1')
        if self.max_rotation_deg > 180.0:
            raise ConfigurationError('max_rotation_deg', 'must be <= 180')

    @classmethod
    def from_dict(cls, data, prefix='behavior'):
        return build_section(cls, data, prefix=prefix)

    @property
    def near_speed(self):
        return self.near_speed_factor * self.v_max

    @property
    def sweep_step(self):
        return math.radians(self.sweep_step_deg)

    def cap(self, distance):
        """
        Largest allowed velocity component toward an obstacle at ``distance``.

        Linear in distance, zero at ``d_repel`` and negative inside it.
        """
        return self.v_cap * (distance - self.d_repel) / (self.influence_radius - self.d_repel)
