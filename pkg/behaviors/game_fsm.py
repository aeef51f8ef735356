"""
Game FSM: picks the game-level action and the ball target handed to the
Behaviour FSM.
"""

from dataclasses import dataclass, replace
import logging
import math

from field.geometry import Pose2D
from simulation.state import Foot

from .ball_handling import adjust_ball_target
from .params import BehaviorParams
from .transitions import FSM_GAME, GameStateKind, check_transition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GameState:
    """
    ``ball_target`` is a field point; ``defend_pose`` is only set in
    DefendGoal. ``reason`` explains the last transition.
    """
    state: GameStateKind = GameStateKind.SCORE_GOAL
    ball_target: tuple = None
    forced_dribble: bool = False
    dribble_foot: Foot = Foot.EITHER
    ball_lost: bool = False
    rotation: float = 0.0
    blocked: bool = False
    close: bool = False
    defend_pose: Pose2D = None
    reason: str = ''


def initial_game_state(field):
    return GameState(ball_target=field.opponent_goal_center)


def defend_pose(field, ball, params):
    """Point on the ball to own-goal line, ``defend_radius`` out from the goal center, facing the ball."""
    gx, gy = field.own_goal_center
    dx, dy = ball[0] - gx, ball[1] - gy
    norm = math.hypot(dx, dy)
    if norm < 1e-9:
        dx, dy, norm = 1.0, 0.0, 1.0
    x = gx + params.defend_radius * dx / norm
    y = gy + params.defend_radius * dy / norm
    return Pose2D(x, y, math.atan2(ball[1] - y, ball[0] - x))


def _select(ctx, params):
    field = ctx.field
    if ctx.positioning:
        return GameStateKind.AUTO_POSITION, 'positioning phase'
    ball = ctx.ball_field
    if params.last_defender and ball is not None and ball[0] < -field.length / 6.0:
        return GameStateKind.DEFEND_GOAL, 'ball in own third'
    return GameStateKind.SCORE_GOAL, 'ball in play'


def game_fsm_step(gs, ctx, params=None):
    """
    One Game FSM step.

    Args:
        gs: previous GameState
        ctx: BehaviorContext
        params: BehaviorParams

    Returns:
        new GameState
    """
    params = params or BehaviorParams()
    field = ctx.field
    kind, reason = _select(ctx, params)
    if kind != gs.state:
        check_transition(FSM_GAME, gs.state, kind)
        logger.debug(f"Game FSM {gs.state.value} -> {kind.value} at t={ctx.now:.2f} ({reason})")
    else:
        reason = gs.reason

    ball = ctx.ball_field
    goal = field.opponent_goal_center
    new = GameState(
        state=kind,
        ball_target=goal,
        ball_lost=ctx.ball_age > params.ball_lost_timeout,
        reason=reason,
    )
    if kind == GameStateKind.SCORE_GOAL and ball is not None:
        decision = adjust_ball_target(ball, goal, ctx.obstacles_field(), params, field)
        new = replace(
            new,
            ball_target=decision.ball_target,
            forced_dribble=decision.forced_dribble,
            dribble_foot=decision.dribble_foot,
            rotation=decision.rotation,
            blocked=decision.blocked,
            close=decision.close,
        )
    elif kind == GameStateKind.DEFEND_GOAL:
        new = replace(new, defend_pose=defend_pose(field, ball, params))
    return new
