"""
Planar poses and frame transforms.

Field frame: origin at the field center, +x toward the opponent goal,
angles counterclockwise. Egocentric frame: origin at the robot, +x forward.
"""

from dataclasses import dataclass
import math

TWO_PI = 2.0 * math.pi


def normalize_angle(angle):
    """Map an angle in radians to (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


@dataclass(frozen=True)
class Pose2D:
    """Robot pose; theta is normalized on construction."""
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'x', float(self.x))
        object.__setattr__(self, 'y', float(self.y))
        object.__setattr__(self, 'theta', normalize_angle(float(self.theta)))

    @property
    def position(self):
        return (self.x, self.y)

    def moved(self, dx, dy, dtheta=0.0):
        """Pose after an egocentric displacement (dx, dy) and a turn dtheta."""
        x, y = ego_to_field(self, (dx, dy))
        return Pose2D(x, y, self.theta + dtheta)


def ego_to_field(pose, p_ego):
    """Rigid transform of an egocentric point into the field frame."""
    c = math.cos(pose.theta)
    s = math.sin(pose.theta)
    px, py = p_ego
    return (pose.x + c * px - s * py, pose.y + s * px + c * py)


def field_to_ego(pose, p_field):
    """Inverse of ego_to_field."""
    c = math.cos(pose.theta)
    s = math.sin(pose.theta)
    dx = p_field[0] - pose.x
    dy = p_field[1] - pose.y
    return (c * dx + s * dy, -s * dx + c * dy)


def mirror_point(p):
    """Image of a point under the 180 degree rotation about the origin."""
    return (-p[0], -p[1])


def mirror_pose(pose):
    """Image of a pose under the 180 degree rotation about the origin."""
    return Pose2D(-pose.x, -pose.y, pose.theta + math.pi)


def distance(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def bearing(p_ego):
    """Bearing of an egocentric point, radians, 0 straight ahead."""
    return math.atan2(p_ego[1], p_ego[0])


def point_segment_distance(p, a, b):
    """Euclidean distance from point p to the segment a-b."""
    ax, ay = a
    bx, by = b
    dx = bx - ax
    dy = by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / length_sq
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))
