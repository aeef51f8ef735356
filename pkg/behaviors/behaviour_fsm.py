"""
Behaviour FSM: turns the Game FSM's decision into walking velocities and
motion triggers.

Every emitted command goes through obstacle avoidance. The far approach
uses the axis-only mode so it never side-steps; it walks around a blocking
obstacle by heading for a detour point instead.
"""

from dataclasses import dataclass, replace
import logging
import math

from field.geometry import field_to_ego, normalize_angle
from simulation.state import Foot, VelocityCommand

from .approach import approach_complete, approach_waypoint, far_command, kick_line, near_command
from .avoidance import avoid_obstacle, detour_waypoint
from .dribble import dribble_command, kick_command, lock_held
from .params import BehaviorParams
from .transitions import (
    APPROACH_STATES, DRIBBLE, FAR, FSM_BEHAVIOUR, KICK, NEAR, SEARCH, WALK,
    GameStateKind, check_transition,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BehaviourState:
    """
    ``foot`` is fixed when Kick or Dribble is entered; ``kicked`` is set on
    the step that emitted the kick trigger.
    """
    state: object = FAR
    dribble_lock: bool = False
    halo_radius: float = 0.65
    since: float = 0.0
    foot: Foot = Foot.EITHER
    kicked: bool = False


def initial_behaviour_state(params=None, now=0.0):
    params = params or BehaviorParams()
    return BehaviourState(halo_radius=params.halo_radius, since=now)


@dataclass(frozen=True)
class Transition:
    fsm: str
    source: str
    target: str
    reason: str


@dataclass(frozen=True)
class BehaviourDiagnostics:
    """
    Per-step record for the trace: the approach waypoint (egocentric, only
    in approach states), the detour point steering the far approach around
    an obstacle, the halo radius, the egocentric ball, the command
    before avoidance, the avoidance report and the transition taken.
    """
    state: object
    waypoint: tuple = None
    detour: tuple = None
    halo_radius: float = None
    ball_ego: tuple = None
    command_in: VelocityCommand = None
    avoidance: object = None
    transition: Transition = None


def walk_to_pose_command(pose, target, params):
    """
    Walk to a field pose: face the direction of travel while far, then
    side-step into place and turn to the target heading. STOP once within
    the pose tolerances.
    """
    ego = field_to_ego(pose, target.position)
    distance = math.hypot(ego[0], ego[1])
    heading_error = normalize_angle(target.theta - pose.theta)
    if distance <= params.pose_tolerance and abs(heading_error) <= params.pose_angle_tolerance:
        return VelocityCommand()
    speed = min(params.v_max, params.position_gain * distance)
    vx, vy = 0.0, 0.0
    if distance > 1e-9:
        vx, vy = speed * ego[0] / distance, speed * ego[1] / distance
    if distance > params.near_exit:
        omega = params.turn_gain * math.atan2(ego[1], ego[0])
    else:
        omega = params.turn_gain * heading_error
    return VelocityCommand(vx, vy, min(params.omega_max, max(-params.omega_max, omega)))


def search_command(ctx, params):
    """Turn in place, toward the side the ball was last seen on."""
    sign = 1.0
    if ctx.ball_ego is not None and ctx.ball_ego[1] < 0:
        sign = -1.0
    return VelocityCommand(0.0, 0.0, sign * params.search_omega)


def _next_state(bs, gs, ctx, line, params):
    """Target state and reason; the current state when nothing fires."""
    if gs.state == GameStateKind.AUTO_POSITION:
        return WALK, 'auto positioning'
    if gs.state == GameStateKind.DEFEND_GOAL:
        return WALK, 'defend goal'
    if line is None or gs.ball_lost:
        return SEARCH, 'ball lost'

    distance = math.hypot(*line.ball)
    current = bs.state
    if current in (WALK, SEARCH):
        return FAR, 'ball known'
    if current == FAR and distance < params.near_enter:
        return NEAR, f"ball within {params.near_enter} m"
    if current == NEAR:
        if distance > params.near_exit:
            return FAR, f"ball beyond {params.near_exit} m"
        if approach_complete(line, bs.halo_radius, params):
            if gs.forced_dribble:
                return DRIBBLE, 'aligned, dribble forced'
            return KICK, 'aligned'
    if current == KICK:
        if bs.kicked:
            return FAR, 'kick triggered'
        if not lock_held(line, params):
            return FAR, 'kick alignment lost'
    if current == DRIBBLE and not lock_held(line, params):
        return FAR, 'dribble lock lost'
    return current, None


def behaviour_fsm_step(bs, gs, ctx, params=None):
    """
    One Behaviour FSM step.

    Args:
        bs: previous BehaviourState
        gs: GameState of this step
        ctx: BehaviorContext
        params: BehaviorParams

    Returns:
        (BehaviourState, VelocityCommand, BehaviourDiagnostics)
    """
    params = params or BehaviorParams()
    ball = ctx.ball_field
    line = None
    if ball is not None and gs.ball_target is not None:
        foot = bs.foot if bs.state in (KICK, DRIBBLE) else gs.dribble_foot
        line = kick_line(ctx.pose, ball, gs.ball_target, foot, params)

    target, reason = _next_state(bs, gs, ctx, line, params)
    transition = None
    if target != bs.state:
        check_transition(FSM_BEHAVIOUR, bs.state, target)
        transition = Transition(FSM_BEHAVIOUR, bs.state.value, target.value, reason)
        logger.debug(f"Behaviour FSM {bs.state.value} -> {target.value} at t={ctx.now:.2f} ({reason})")
        foot = line.foot if line is not None and target in (KICK, DRIBBLE) else Foot.EITHER
        bs = replace(bs, state=target, since=ctx.now, foot=foot, kicked=False,
                     dribble_lock=target == DRIBBLE)

    waypoint = detour = pass_side = None
    if bs.state in APPROACH_STATES:
        waypoint = approach_waypoint(line, bs.halo_radius, params)
        if bs.state == FAR:
            target_point, pass_side = detour_waypoint(waypoint, ctx.obstacles, params)
            if pass_side is not None:
                detour = target_point
            command = far_command(target_point, params)
        else:
            command = near_command(waypoint, line.heading, params)
    elif bs.state == KICK:
        command, fired = kick_command(line, params)
        bs = replace(bs, kicked=fired)
        if fired:
            logger.info(f"Kick triggered with the {bs.foot.value} foot at t={ctx.now:.2f}")
    elif bs.state == DRIBBLE:
        command = dribble_command(line, params)
        bs = replace(bs, dribble_lock=True)
    elif bs.state == WALK:
        goal_pose = gs.defend_pose if gs.state == GameStateKind.DEFEND_GOAL else ctx.assigned_pose
        command = walk_to_pose_command(ctx.pose, goal_pose, params) if goal_pose else VelocityCommand()
    else:
        command = search_command(ctx, params)

    shaped, report = avoid_obstacle(command, ctx.obstacles, params, axis_only=bs.state == FAR,
                                     pass_side=pass_side)
    diagnostics = BehaviourDiagnostics(
        state=bs.state,
        waypoint=waypoint,
        detour=detour,
        halo_radius=bs.halo_radius,
        ball_ego=line.ball if line is not None else None,
        command_in=command,
        avoidance=report,
        transition=transition,
    )
    return bs, shaped, diagnostics
