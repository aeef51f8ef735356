"""
Obstacle ball handling: rotate the ball target away from obstacles that
block the ball's path and force dribbling when the rotated target misses
the goal mouth or an obstacle is too close to the ball.
"""

from dataclasses import dataclass
import math

import numpy as np

from simulation.state import Foot

from .params import BehaviorParams


@dataclass(frozen=True)
class BallTargetDecision:
    ball_target: tuple
    forced_dribble: bool
    dribble_foot: Foot
    rotation: float = 0.0
    blocked: bool = False
    close: bool = False

    def __iter__(self):
        return iter((self.ball_target, self.forced_dribble, self.dribble_foot))


def _rotate_about(center, point, angle):
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = point[0] - center[0], point[1] - center[1]
    return (center[0] + c * dx - s * dy, center[1] + s * dx + c * dy)


def corridor_blocked(ball, target, obstacles, half_width):
    """True when an obstacle lies within ``half_width`` of the ball->target segment, ahead of the ball."""
    dx, dy = target[0] - ball[0], target[1] - ball[1]
    length = math.hypot(dx, dy)
    if length < 1e-12:
        return False
    ux, uy = dx / length, dy / length
    for ox, oy in obstacles:
        px, py = ox - ball[0], oy - ball[1]
        t = px * ux + py * uy
        if t <= 0.0 or t > length:
            continue
        if abs(-px * uy + py * ux) <= half_width:
            return True
    return False


def ray_hits_goal(ball, target, field, margin):
    """True when the ray ball->target crosses the opponent goal line inside the mouth, ``margin`` from the posts."""
    dx, dy = target[0] - ball[0], target[1] - ball[1]
    if dx <= 1e-12:
        return False
    t = (field.half_length - ball[0]) / dx
    if t < 0:
        return False
    y = ball[1] + t * dy
    return abs(y) <= field.goal_width / 2.0 - margin


def _corridor_blocked_many(ball, targets, obstacles, half_width):
    """corridor_blocked for every row of an (M, 2) array of targets."""
    d = targets - np.asarray(ball, dtype=float)
    length = np.hypot(d[:, 0], d[:, 1])
    u = d / np.where(length < 1e-12, 1.0, length)[:, None]
    p = np.asarray(obstacles, dtype=float).reshape(-1, 2) - np.asarray(ball, dtype=float)
    along = u @ p.T
    across = np.abs(u[:, :1] * p[:, 1] - u[:, 1:] * p[:, 0])
    hit = (along > 0.0) & (along <= length[:, None]) & (across <= half_width)
    return hit.any(axis=1) & (length >= 1e-12)


def _rotated_targets(ball, target, angles):
    c, s = np.cos(angles), np.sin(angles)
    dx, dy = target[0] - ball[0], target[1] - ball[1]
    return np.column_stack([ball[0] + c * dx - s * dy, ball[1] + s * dx + c * dy])


def clearing_rotation(ball, target, obstacles, params, field=None):
    """
    Smallest rotation of the ball target about the ball that clears the
    corridor, found by a sweep refined with bisection.

    Ties between the two directions go to the one that still hits the goal
    mouth, then to the counterclockwise one.

    Returns:
        angle in radians, or None when no rotation up to the limit clears
    """
    half = params.corridor_half_width
    if not corridor_blocked(ball, target, obstacles, half):
        return 0.0

    def clear(angle):
        return not corridor_blocked(ball, _rotate_about(ball, target, angle), obstacles, half)

    limit = math.radians(params.max_rotation_deg)
    step = params.sweep_step
    sweep = step * np.arange(1, int(math.floor(limit / step + 1e-9)) + 1)
    candidates = []
    for sign in (1.0, -1.0):
        free = ~_corridor_blocked_many(ball, _rotated_targets(ball, target, sign * sweep), obstacles, half)
        if not free.any():
            continue
        first = int(np.argmax(free))
        lo, hi = (float(sweep[first - 1]) if first else 0.0), float(sweep[first])
        for _ in range(30):
            mid = (lo + hi) / 2.0
            if clear(sign * mid):
                hi = mid
            else:
                lo = mid
        candidates.append(sign * hi)
    if not candidates:
        return None

    def preference(angle):
        in_goal = field is not None and ray_hits_goal(
            ball, _rotate_about(ball, target, angle), field, params.goal_margin)
        return (round(abs(angle), 9), not in_goal, angle < 0)

    return min(candidates, key=preference)


def adjust_ball_target(ball, goal_target, obstacles, params=None, field=None):
    """
    Ball target after obstacle ball handling.

    Args:
        ball: field-frame ball estimate
        goal_target: desired target (normally the opponent goal center)
        obstacles: field-frame obstacle positions
        params: BehaviorParams
        field: FieldSpec for the goal-mouth test

    Returns:
        BallTargetDecision, which also unpacks as
        (ball_target, forced_dribble, dribble_foot)
    """
    params = params or BehaviorParams()
    obstacles = [tuple(o) for o in obstacles]
    if not obstacles:
        return BallTargetDecision(tuple(goal_target), False, Foot.EITHER)

    rotation = clearing_rotation(ball, goal_target, obstacles, params, field)
    blocked = rotation is None or rotation != 0.0
    target = tuple(goal_target) if rotation is None else _rotate_about(ball, goal_target, rotation)

    nearest = min(obstacles, key=lambda o: math.hypot(o[0] - ball[0], o[1] - ball[1]))
    close = math.hypot(nearest[0] - ball[0], nearest[1] - ball[1]) < params.close_threshold
    misses_goal = field is not None and not ray_hits_goal(ball, target, field, params.goal_margin)
    forced = close or rotation is None or (blocked and misses_goal)

    foot = Foot.EITHER
    if forced:
        dx, dy = target[0] - ball[0], target[1] - ball[1]
        side = dx * (nearest[1] - ball[1]) - dy * (nearest[0] - ball[0])
        foot = Foot.RIGHT if side > 0 else Foot.LEFT
    return BallTargetDecision(target, forced, foot, rotation or 0.0, blocked, close)
