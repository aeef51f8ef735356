"""
Seeded scenario construction.
"""

from dataclasses import dataclass
import logging

from core.config import build_section
from core.exceptions import ConfigurationError
from core.rng import substream
from field.geometry import Pose2D, mirror_pose
from field.spec import FieldSpec, StartLabel, start_pose_for

from .state import BallState, Foot, ObstacleState, RobotState, SimParams, WorldState

logger = logging.getLogger(__name__)

MATCH = 'Match'
MOVING_BALL_CHALLENGE = 'MovingBallChallenge'
APPROACH_DRILL = 'ApproachDrill'
AVOIDANCE_DRILL = 'AvoidanceDrill'

SCENARIO_CHOICES = [
    (MATCH, 'One-vs-one match'),
    (MOVING_BALL_CHALLENGE, 'Goal kick from a ball rolled off a ramp'),
    (APPROACH_DRILL, 'Ball approach from a start pose'),
    (AVOIDANCE_DRILL, 'Ball approach past a static obstacle'),
]

DEFAULT_DURATIONS = {
    MATCH: 1200.0,
    MOVING_BALL_CHALLENGE: 8.0,
    APPROACH_DRILL: 60.0,
    AVOIDANCE_DRILL: 60.0,
}

HOME_ROBOT_ID = 0
AWAY_ROBOT_ID = 1
OBSTACLE_BASE_ID = 100


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario selection plus the arguments of every scenario."""
    name: str = MATCH
    duration: float = 0.0
    start_label: str = StartLabel.CENTER_FACING_OPPONENT.value
    opponent: bool = True
    opponent_start_label: str = StartLabel.CENTER_FACING_OPPONENT.value
    referee: bool = False
    d_ramp: float = 1.0
    release_speed: float = 0.6
    challenge_foot: str = Foot.RIGHT.value
    obstacle_radius: float = 0.2
    placement_jitter: float = 0.2
    positioning_time: float = 8.0

    @property
    def run_duration(self):
        return self.duration if self.duration > 0 else DEFAULT_DURATIONS[self.name]

    def clean(self):
        if self.name not in DEFAULT_DURATIONS:
            choices = ', '.join(name for name, _ in SCENARIO_CHOICES)
            raise ConfigurationError('name', f"unknown scenario {self.name!r} (expected one of {choices})")
        for key in ('start_label', 'opponent_start_label'):
            if getattr(self, key) not in {label.value for label in StartLabel}:
                raise ConfigurationError(key, f"unknown start pose {getattr(self, key)!r}")
        if self.challenge_foot not in (Foot.LEFT.value, Foot.RIGHT.value):
            raise ConfigurationError('challenge_foot', 'must be Left or Right')
        if self.duration < 0:
            raise ConfigurationError('duration', 'must be >= 0')
        if self.d_ramp < 0:
            raise ConfigurationError('d_ramp', 'must be >= 0')
        if self.release_speed < 0:
            raise ConfigurationError('release_speed', 'must be >= 0')
        if not self.obstacle_radius > 0:
            raise ConfigurationError('obstacle_radius', 'must be > 0')
        for key in ('placement_jitter', 'positioning_time'):
            if getattr(self, key) < 0:
                raise ConfigurationError(key, 'must be >= 0')

    @classmethod
    def from_dict(cls, data, prefix='scenario'):
        return build_section(cls, data, prefix=prefix)


def challenge_kick_point(field, config):
    """Field point where the challenge robot's kicking foot meets the ball."""
    return (field.half_length - field.goal_area_length, 0.0)


def challenge_pose(field, config, params):
    """Robot pose that puts the configured foot's kick point on the ramp line."""
    kx, ky = challenge_kick_point(field, config)
    sign = Foot(config.challenge_foot).lateral_sign
    return Pose2D(kx - params.foot_forward, ky - sign * params.foot_lateral, 0.0)


def _robot(robot_id, team, pose, params):
    return RobotState(id=robot_id, team=team, pose=pose, radius=params.robot_radius)


def _match(field, config, params, seed):
    home = start_pose_for(field, config.start_label).pose
    robots = [_robot(HOME_ROBOT_ID, 'home', home, params)]
    if config.opponent:
        away = mirror_pose(start_pose_for(field, config.opponent_start_label).pose)
        robots.append(_robot(AWAY_ROBOT_ID, 'away', away, params))
    obstacles = ()
    if config.referee:
        # referee walks the sideline; modeled standing just inside it
        obstacles = (ObstacleState(OBSTACLE_BASE_ID, (0.0, -field.half_width + 0.4), config.obstacle_radius),)
    return robots, BallState((0.0, 0.0), (0.0, 0.0)), obstacles


def _moving_ball(field, config, params, seed):
    kx, ky = challenge_kick_point(field, config)
    # the ball rolls toward the kick point from the side of the kicking foot
    sign = Foot(config.challenge_foot).lateral_sign
    ball = BallState((kx, ky + sign * config.d_ramp), (0.0, -sign * config.release_speed))
    robots = [_robot(HOME_ROBOT_ID, 'home', challenge_pose(field, config, params), params)]
    return robots, ball, ()


def _approach(field, config, params, seed):
    rng = substream(seed, 'simulation', 0, 1)
    home = start_pose_for(field, config.start_label).pose
    x = float(rng.uniform(-1.5, field.half_length - field.penalty_mark_distance))
    y = float(rng.uniform(-field.half_width + 0.5, field.half_width - 0.5))
    return [_robot(HOME_ROBOT_ID, 'home', home, params)], BallState((x, y), (0.0, 0.0)), ()


def _avoidance(field, config, params, seed):
    rng = substream(seed, 'simulation', 0, 2)
    home = start_pose_for(field, config.start_label).pose
    jitter = rng.uniform(-config.placement_jitter, config.placement_jitter, 3)
    ball = (home.x + 3.0 + float(jitter[0]), home.y + float(jitter[1]))
    obstacle = (
        (home.x + ball[0]) / 2.0,
        (home.y + ball[1]) / 2.0 + 0.75 * float(jitter[2]),
    )
    obstacles = (ObstacleState(OBSTACLE_BASE_ID, obstacle, config.obstacle_radius),)
    return [_robot(HOME_ROBOT_ID, 'home', home, params)], BallState(ball, (0.0, 0.0)), obstacles


_BUILDERS = {
    MATCH: _match,
    MOVING_BALL_CHALLENGE: _moving_ball,
    APPROACH_DRILL: _approach,
    AVOIDANCE_DRILL: _avoidance,
}


def spawn_scenario(name, config=None, seed=0, field=None, params=None):
    """
    Build the initial world of a scenario.

    Args:
        name: one of SCENARIO_CHOICES
        config: ScenarioConfig (defaults apply when None)
        seed: run seed; every random placement draws from its substream
        field: FieldSpec
        params: SimParams

    Returns:
        WorldState with status Running at time 0
    """
    if name not in _BUILDERS:
        raise ConfigurationError('scenario.name', f"unknown scenario {name!r}")
    config = config or ScenarioConfig(name=name)
    field = field or FieldSpec()
    params = params or SimParams()
    field.clean()
    robots, ball, obstacles = _BUILDERS[name](field, config, params, seed)
    logger.debug(f"Spawned {name} with seed {seed}: {len(robots)} robots, {len(obstacles)} obstacles")
    return WorldState(
        field=field,
        seed=seed,
        robots=tuple(robots),
        ball=ball,
        obstacles=tuple(obstacles),
    )
