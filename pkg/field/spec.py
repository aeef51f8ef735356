"""
Field specification and the four legal start poses.
"""

from dataclasses import dataclass
from enum import Enum
import math

from core.config import build_section, read_config_file
from core.exceptions import ConfigurationError

from .geometry import Pose2D


@dataclass(frozen=True)
class FieldSpec:
    """
    Field dimensions in meters.

    The shipped defaults are AdultSize-scale values; every test parametrizes
    over FieldSpec instead of relying on them.
    """
    length: float = 9.0
    width: float = 6.0
    goal_width: float = 2.6
    goal_area_length: float = 1.0
    goal_area_width: float = 3.0
    center_circle_radius: float = 0.75
    penalty_mark_distance: float = 2.1
    line_width: float = 0.05

    @property
    def half_length(self):
        return self.length / 2.0

    @property
    def half_width(self):
        return self.width / 2.0

    @property
    def opponent_goal_center(self):
        return (self.half_length, 0.0)

    @property
    def own_goal_center(self):
        return (-self.half_length, 0.0)

    def clean(self):
        """Validate the geometry, naming the first violated constraint."""
        if not self.width > 0:
            raise ConfigurationError('width', 'must be > 0')
        if not self.length > self.width:
            raise ConfigurationError('length', 'must be > width')
        for name in ('goal_width', 'goal_area_length', 'goal_area_width',
                     'center_circle_radius', 'penalty_mark_distance', 'line_width'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')
        if not self.goal_width < self.width:
            raise ConfigurationError('goal_width', 'must be < width')
        if not self.goal_area_width < self.width:
            raise ConfigurationError('goal_area_width', 'must be < width')
        if not self.goal_area_length < self.half_length:
            raise ConfigurationError('goal_area_length', 'must be < length / 2')
        if not self.penalty_mark_distance < self.half_length:
            raise ConfigurationError('penalty_mark_distance', 'must be < length / 2')
        if not self.center_circle_radius < self.half_width:
            raise ConfigurationError('center_circle_radius', 'must be < width / 2')
        if not self.line_width < self.goal_area_length:
            raise ConfigurationError('line_width', 'must be < goal_area_length')

    @classmethod
    def from_dict(cls, data, prefix='field', required=()):
        return build_section(cls, data, prefix=prefix, required=required)


def load_field_spec(path):
    """Load a FieldSpec from a JSON or key=value file (keys = field names, SI units)."""
    data = read_config_file(path)
    if 'field' in data and isinstance(data['field'], dict):
        data = data['field']
    return FieldSpec.from_dict(data, prefix='field')


class StartLabel(str, Enum):
    CENTER_FACING_OPPONENT = 'CenterFacingOpponent'
    GOAL_AREA_FACING_OPPONENT = 'GoalAreaFacingOpponent'
    SIDELINE_LEFT = 'SidelineLeft'
    SIDELINE_RIGHT = 'SidelineRight'


@dataclass(frozen=True)
class StartPose:
    pose: Pose2D
    label: StartLabel


def start_poses(spec, overrides=None):
    """
    The four predefined poses a robot may start in or enter the game from.

    Two face the opponent goal (near the center circle and at the goal area);
    two stand on the own-half sidelines facing the field.

    Args:
        spec: FieldSpec
        overrides: optional mapping StartLabel -> Pose2D

    Returns:
        tuple of four StartPose in StartLabel order
    """
    defaults = {
        StartLabel.CENTER_FACING_OPPONENT: Pose2D(-spec.center_circle_radius - 0.1, 0.0, 0.0),
        StartLabel.GOAL_AREA_FACING_OPPONENT: Pose2D(-spec.half_length + spec.goal_area_length, 0.0, 0.0),
        StartLabel.SIDELINE_LEFT: Pose2D(-spec.length / 4.0, spec.half_width, -math.pi / 2.0),
        StartLabel.SIDELINE_RIGHT: Pose2D(-spec.length / 4.0, -spec.half_width, math.pi / 2.0),
    }
    for label, pose in (overrides or {}).items():
        defaults[StartLabel(label)] = pose

    poses = tuple(StartPose(pose=defaults[label], label=label) for label in StartLabel)
    positions = {(sp.pose.x, sp.pose.y) for sp in poses}
    if len(positions) != 4:
        raise ConfigurationError('start_poses', 'the four start poses must be pairwise distinct')
    return poses


def start_pose_for(spec, label):
    label = StartLabel(label)
    for candidate in start_poses(spec):
        if candidate.label == label:
            return candidate
    raise ConfigurationError('start_label', f"unknown start pose {label!r}")
