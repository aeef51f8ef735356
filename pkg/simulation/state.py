"""
World state and simulation parameters.

All records are frozen; ``step`` and the kick operations return new
WorldState instances.
"""

from dataclasses import dataclass, field as dc_field, replace
from enum import Enum
import math

from core.config import build_section
from core.exceptions import ConfigurationError, LookupFailure
from field.geometry import Pose2D, ego_to_field
from field.spec import FieldSpec
from perception.signatures import ColorSignature, TEAM_SIGNATURES


class TriggerKind(str, Enum):
    NONE = 'None'
    KICK_LEFT = 'KickLeft'
    KICK_RIGHT = 'KickRight'
    PRE_KICK = 'PreKick'


class Foot(str, Enum):
    LEFT = 'Left'
    RIGHT = 'Right'
    EITHER = 'Either'

    @classmethod
    def for_trigger(cls, trigger):
        return {TriggerKind.KICK_LEFT: cls.LEFT, TriggerKind.KICK_RIGHT: cls.RIGHT}.get(trigger)

    @property
    def lateral_sign(self):
        return 1.0 if self == Foot.LEFT else -1.0


class WorldStatus(str, Enum):
    RUNNING = 'Running'
    GOAL_SCORED = 'GoalScored'
    BALL_OUT = 'BallOut'
    FINISHED = 'Finished'


@dataclass(frozen=True)
class VelocityCommand:
    """Walking velocities in the robot frame plus an optional motion trigger."""
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0
    trigger: TriggerKind = TriggerKind.NONE

    @property
    def speed(self):
        return math.hypot(self.vx, self.vy)

    def clamped(self, v_max, omega_max):
        """Scale the linear part onto the v_max disc and clip omega."""
        vx, vy = self.vx, self.vy
        speed = math.hypot(vx, vy)
        if speed > v_max:
            scale = v_max / speed
            vx, vy = vx * scale, vy * scale
        omega = min(omega_max, max(-omega_max, self.omega))
        return VelocityCommand(vx, vy, omega, self.trigger)

    def with_trigger(self, trigger):
        return replace(self, trigger=trigger)


STOP = VelocityCommand()


@dataclass(frozen=True)
class SimParams:
    """
    Simulator parameters.

    ``ball_friction_decel`` may be zero for uniform-velocity experiments;
    every other magnitude must be positive.
    """
    dt: float = 0.02
    ball_friction_decel: float = 0.4
    v_max: float = 0.5
    omega_max: float = 1.0
    kick_speed: float = 2.5
    kick_region_radius: float = 0.2
    kick_angle_noise: float = 0.0
    kick_latency: float = 0.3
    rng_seed: int = 0
    restitution: float = 0.3
    robot_radius: float = 0.15
    ball_radius: float = 0.07
    foot_forward: float = 0.25
    foot_lateral: float = 0.1
    gyro_bias: float = 0.0
    gyro_noise_std: float = 0.0
    odometry_noise: float = 0.0

    def clean(self):
        for name in ('dt', 'v_max', 'omega_max', 'kick_speed', 'kick_region_radius',
                     'robot_radius', 'ball_radius', 'foot_forward', 'foot_lateral'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')
        for name in ('ball_friction_decel', 'kick_angle_noise', 'kick_latency',
                     'gyro_noise_std', 'odometry_noise'):
            if getattr(self, name) < 0:
                raise ConfigurationError(name, 'must be >= 0')
        if not 0.0 <= self.restitution <= 1.0:
            raise ConfigurationError('restitution', 'must be within [0, 1]')
        if self.rng_seed < 0 or self.rng_seed >= 2 ** 64:
            raise ConfigurationError('rng_seed', 'must be a 64-bit unsigned integer')

    @classmethod
    def from_dict(cls, data, prefix='sim'):
        return build_section(cls, data, prefix=prefix)


@dataclass(frozen=True)
class RobotState:
    id: int
    team: str
    pose: Pose2D
    command: VelocityCommand = STOP
    radius: float = 0.15
    height: float = 1.3
    signature: ColorSignature = None
    # sensor readings of the last step: egocentric displacement and yaw rate
    odometry: tuple = (0.0, 0.0, 0.0)
    gyro_rate: float = 0.0

    def __post_init__(self):
        if self.signature is None:
            object.__setattr__(self, 'signature', TEAM_SIGNATURES[self.team])


@dataclass(frozen=True)
class BallState:
    position: tuple = (0.0, 0.0)
    velocity: tuple = (0.0, 0.0)

    @property
    def speed(self):
        return math.hypot(*self.velocity)


@dataclass(frozen=True)
class ObstacleState:
    id: int
    position: tuple
    radius: float = 0.2
    height: float = 1.5
    signature: ColorSignature = TEAM_SIGNATURES['referee']


@dataclass(frozen=True)
class PendingKick:
    robot_id: int
    foot: Foot
    due_time: float


@dataclass(frozen=True)
class Event:
    """One trace event. ``extra`` is an ordered tuple of (key, value) pairs."""
    time: float
    kind: str
    actor_id: int = None
    x: float = None
    y: float = None
    theta: float = None
    extra: tuple = ()


@dataclass(frozen=True)
class WorldState:
    field: FieldSpec
    time: float = 0.0
    step_index: int = 0
    seed: int = 0
    robots: tuple = ()
    ball: BallState = BallState()
    obstacles: tuple = ()
    score: tuple = (0, 0)
    status: WorldStatus = WorldStatus.RUNNING
    pending_kicks: tuple = ()
    events: tuple = dc_field(default=(), compare=False)

    def robot(self, robot_id):
        for robot in self.robots:
            if robot.id == robot_id:
                return robot
        raise LookupFailure(f"unknown robot id {robot_id!r}")

    def with_robot(self, updated):
        robots = tuple(updated if r.id == updated.id else r for r in self.robots)
        return replace(self, robots=robots)

    def with_events(self, *events):
        return replace(self, events=self.events + tuple(events))


def set_command(world, robot_id, command):
    """Return a world in which robot ``robot_id`` carries ``command``."""
    robot = world.robot(robot_id)
    return world.with_robot(replace(robot, command=command))


def foot_point(pose, foot, params):
    """Field-frame designated kick point of ``foot`` for a robot at ``pose``."""
    return ego_to_field(pose, (params.foot_forward, foot.lateral_sign * params.foot_lateral))
