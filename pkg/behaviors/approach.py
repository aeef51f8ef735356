"""
Ball approach around a circular halo.

All geometry is egocentric: the robot sits at the origin facing +x. The
approach aims at the point behind the ball, at the halo radius on the
ball-to-target line, shifted sideways so the chosen foot lines up with the
ball. When that point is hidden behind the halo the robot heads for the
tangent point of the halo on the side of the behind-ball point.
"""

from dataclasses import dataclass
import math

from field.geometry import field_to_ego, normalize_angle
from simulation.state import Foot, VelocityCommand

from .params import BehaviorParams


@dataclass(frozen=True)
class KickLine:
    """
    Egocentric ball, unit direction to the ball target and the chosen
    foot's offsets from the ball line: ``lateral`` is the ball's offset
    from the foot along the left normal, ``along`` its distance ahead of the
    foot along the direction, ``heading`` the direction's bearing.
    """
    ball: tuple
    direction: tuple
    foot: Foot
    lateral: float
    along: float
    heading: float

    @property
    def normal(self):
        return (-self.direction[1], self.direction[0])


def _unit(v, fallback=(1.0, 0.0)):
    norm = math.hypot(v[0], v[1])
    if norm < 1e-12:
        return fallback
    return (v[0] / norm, v[1] / norm)


def _offsets(ball, direction, foot, params):
    fx, fy = params.foot_forward, foot.lateral_sign * params.foot_lateral
    dx, dy = ball[0] - fx, ball[1] - fy
    along = dx * direction[0] + dy * direction[1]
    lateral = -dx * direction[1] + dy * direction[0]
    return lateral, along


def kick_line(pose, ball, ball_target, foot=Foot.EITHER, params=None):
    """
    Kick geometry for a field-frame ball and ball target seen from ``pose``.

    ``Foot.EITHER`` resolves to the foot closer to the ball line; ties go
    to the right foot.
    """
    params = params or BehaviorParams()
    c = field_to_ego(pose, ball)
    t = field_to_ego(pose, ball_target)
    u = _unit((t[0] - c[0], t[1] - c[1]))
    if foot == Foot.EITHER:
        left = abs(_offsets(c, u, Foot.LEFT, params)[0])
        right = abs(_offsets(c, u, Foot.RIGHT, params)[0])
        foot = Foot.LEFT if left < right else Foot.RIGHT
    lateral, along = _offsets(c, u, foot, params)
    return KickLine(c, u, foot, lateral, along, math.atan2(u[1], u[0]))


def behind_point(line, halo_radius, params):
    """Robot position, egocentric, from which the foot meets the ball line."""
    c, u, n = line.ball, line.direction, line.normal
    s = line.foot.lateral_sign * params.foot_lateral
    return (c[0] - halo_radius * u[0] - s * n[0], c[1] - halo_radius * u[1] - s * n[1])


def approach_waypoint(line, halo_radius, params=None):
    """
    Instantaneous egocentric target of the approach; never strictly inside
    the halo around the ball.
    """
    params = params or BehaviorParams()
    c = line.ball
    b = behind_point(line, halo_radius, params)
    d = math.hypot(c[0], c[1])
    phi_b = math.atan2(b[1] - c[1], b[0] - c[0])
    phi_r = math.atan2(-c[1], -c[0]) if d > 1e-12 else phi_b
    delta = normalize_angle(phi_b - phi_r)

    if d <= halo_radius:
        if abs(delta) <= math.pi / 4:
            return b
        phi = phi_r + math.copysign(math.pi / 4, delta)
    else:
        alpha = math.acos(halo_radius / d)
        if abs(delta) <= alpha:
            return b
        phi = phi_r + math.copysign(alpha, delta)
    return (c[0] + halo_radius * math.cos(phi), c[1] + halo_radius * math.sin(phi))


def _clip(value, limit):
    return min(limit, max(-limit, value))


def far_command(waypoint, params):
    """Turn toward the waypoint and walk forward; never side-step."""
    error = math.atan2(waypoint[1], waypoint[0])
    omega = _clip(params.turn_gain * error, params.omega_max)
    vx = params.v_max * max(0.0, math.cos(error))
    return VelocityCommand(vx, 0.0, omega)


def near_command(waypoint, heading, params):
    """Omnidirectional walk to the waypoint at reduced speed, turning toward ``heading``."""
    distance = math.hypot(waypoint[0], waypoint[1])
    speed = min(params.near_speed, params.position_gain * distance)
    vx, vy = 0.0, 0.0
    if distance > 1e-9:
        vx, vy = speed * waypoint[0] / distance, speed * waypoint[1] / distance
    omega = _clip(params.turn_gain * heading, params.omega_max)
    return VelocityCommand(vx, vy, omega)


def ball_approach(pose, ball, ball_target, halo_radius, thresholds=None, near=None, foot=Foot.EITHER):
    """
    Walking command that brings the robot behind the ball.

    Args:
        pose: Pose2D estimate of the robot
        ball: field-frame ball estimate, or None when unknown
        ball_target: field point the ball should go to
        halo_radius: keep-out radius around the ball
        thresholds: BehaviorParams
        near: force the near (True) or far (False) case; by default the
            case follows ``near_enter``
        foot: foot to line up with the ball

    Returns:
        VelocityCommand, or None when the ball is unknown and the caller
        should search for it
    """
    params = thresholds or BehaviorParams()
    if ball is None:
        return None
    line = kick_line(pose, ball, ball_target, foot, params)
    waypoint = approach_waypoint(line, halo_radius, params)
    if near is None:
        near = math.hypot(*line.ball) < params.near_enter
    if near:
        return near_command(waypoint, line.heading, params)
    return far_command(waypoint, params)


def approach_complete(line, halo_radius, params=None, factor=1.0):
    """
    True when the robot stands behind the ball, aligned with the target,
    the chosen foot on the ball line. ``factor`` widens the tolerances.
    """
    params = params or BehaviorParams()
    reach = halo_radius - params.foot_forward + params.pose_tolerance * factor
    return (
        abs(line.lateral) <= params.kick_lateral_tol * factor
        and abs(line.heading) <= params.kick_angle_tol * factor
        and 0.0 < line.along <= reach
    )
