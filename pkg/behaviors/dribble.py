"""
Kicking and dribbling once the robot stands behind the ball.
"""

import math

from simulation.state import Foot, TriggerKind, VelocityCommand

from .params import BehaviorParams

KICK_TRIGGER_BY_FOOT = {
    Foot.LEFT: TriggerKind.KICK_LEFT,
    Foot.RIGHT: TriggerKind.KICK_RIGHT,
}


def _clip(value, limit):
    return min(limit, max(-limit, value))


def _correction(line, params):
    vy = _clip(params.lateral_gain * line.lateral, params.dribble_speed)
    omega = _clip(params.heading_gain * line.heading, params.omega_max)
    return vy, omega


def dribble_command(line, params=None):
    """
    Walk through the ball toward the ball target, correcting the lateral
    offset of the designated foot and the heading error proportionally.

    Args:
        line: KickLine of the ball, ball target and dribbling foot
        params: BehaviorParams
    """
    params = params or BehaviorParams()
    vy, omega = _correction(line, params)
    vx = params.dribble_speed * max(0.0, math.cos(line.heading))
    return VelocityCommand(vx, vy, omega)


def kick_command(line, params=None):
    """
    Step up to the ball and fire the kick once it is within reach of the foot.

    Returns:
        (VelocityCommand, fired) where a fired command carries the
        KickLeft/KickRight trigger of the kicking foot
    """
    params = params or BehaviorParams()
    if line.along <= params.kick_reach:
        return VelocityCommand().with_trigger(KICK_TRIGGER_BY_FOOT[line.foot]), True
    vy, omega = _correction(line, params)
    vx = min(params.dribble_speed, params.position_gain * (line.along - params.kick_reach))
    return VelocityCommand(vx, vy, omega), False


def lock_held(line, params=None):
    """
    Dribble lock: the ball stays within the widened alignment tolerances,
    in front of the robot and no farther than ``dribble_lock_distance``.
    """
    params = params or BehaviorParams()
    factor = params.dribble_lock_factor
    return (
        abs(line.lateral) <= params.kick_lateral_tol * factor
        and abs(line.heading) <= params.kick_angle_tol * factor
        and -params.foot_forward < line.along <= params.dribble_lock_distance
    )
