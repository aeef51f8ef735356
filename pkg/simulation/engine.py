"""
Discrete-time world simulation.

One ``step`` advances the world by ``params.dt``:

1. robot kinematics under clamped commands (own frame, explicit Euler),
   kick and pre-kick triggers consumed into scheduled kicks
2. disc contacts between robots and obstacles
3. scheduled kicks that have come due
4. rolling ball with friction, clamped at zero speed
5. ball against robot discs (reflection with restitution)
6. goal / ball-out detection on the ball's swept segment
"""

from dataclasses import replace
import logging
import math

from core.exceptions import SimulationStateError
from core.rng import normal_draws, substream
from field.geometry import Pose2D

from .state import (
    Event, Foot, PendingKick, TriggerKind, WorldStatus, foot_point,
)

logger = logging.getLogger(__name__)

_KICK_STREAM = 1000
_ODOMETRY_STREAM = 2000
_GYRO_STREAM = 3000


# =============================================================================
# KICKS
# =============================================================================

def _kick_foot(pose, ball, foot, params):
    """Resolve Either to the foot whose kick point is nearest the ball."""
    if foot != Foot.EITHER:
        return foot
    left = foot_point(pose, Foot.LEFT, params)
    right = foot_point(pose, Foot.RIGHT, params)
    d_left = math.hypot(ball[0] - left[0], ball[1] - left[1])
    d_right = math.hypot(ball[0] - right[0], ball[1] - right[1])
    return Foot.LEFT if d_left <= d_right else Foot.RIGHT


def apply_kick(world, robot_id, foot, params):
    """
    Kick the ball along the robot heading if it lies in the kick region.

    A ball farther than ``kick_region_radius`` from the designated foot point
    leaves the world unchanged apart from a ``kick_rejected`` event.

    Returns:
        WorldState with the kick event appended
    """
    robot = world.robot(robot_id)
    foot = _kick_foot(robot.pose, world.ball.position, Foot(foot), params)
    point = foot_point(robot.pose, foot, params)
    bx, by = world.ball.position
    distance = math.hypot(bx - point[0], by - point[1])

    if distance > params.kick_region_radius:
        logger.warning(
            f"Kick rejected for robot {robot_id} at t={world.time:.2f}: "
            f"ball {distance:.3f} m from the {foot.value} foot point"
        )
        return world.with_events(Event(
            world.time, 'kick_rejected', robot_id, bx, by, robot.pose.theta,
            (('foot', foot.value), ('distance', distance)),
        ))

    heading = robot.pose.theta
    if params.kick_angle_noise > 0:
        rng = substream(world.seed, 'simulation', world.step_index, _KICK_STREAM + robot_id)
        heading += float(rng.normal(0.0, params.kick_angle_noise))
    velocity = (params.kick_speed * math.cos(heading), params.kick_speed * math.sin(heading))
    logger.debug(f"Robot {robot_id} kicked with {foot.value} foot at t={world.time:.2f}")
    world = replace(world, ball=replace(world.ball, velocity=velocity))
    return world.with_events(Event(
        world.time, 'kick', robot_id, bx, by, heading,
        (('foot', foot.value), ('distance', distance), ('speed', params.kick_speed)),
    ))


def schedule_kick(world, robot_id, foot, delay):
    """Queue a kick impulse ``delay`` seconds from now (abstracted kick motion)."""
    robot = world.robot(robot_id)
    kick = PendingKick(robot_id=robot_id, foot=Foot(foot), due_time=world.time + delay)
    return replace(world, pending_kicks=world.pending_kicks + (kick,)).with_events(Event(
        world.time, 'kick_scheduled', robot_id, robot.pose.x, robot.pose.y, robot.pose.theta,
        (('foot', kick.foot.value), ('due', kick.due_time)),
    ))


# =============================================================================
# ROBOTS
# =============================================================================

def _consume_triggers(world, params):
    events = []
    pending = list(world.pending_kicks)
    kicking = {k.robot_id for k in pending}
    robots = []
    for robot in world.robots:
        trigger = robot.command.trigger
        if trigger == TriggerKind.NONE:
            robots.append(robot)
            continue
        pose = robot.pose
        if trigger == TriggerKind.PRE_KICK:
            events.append(Event(world.time, 'pre_kick', robot.id, pose.x, pose.y, pose.theta))
        elif robot.id not in kicking:
            foot = Foot.for_trigger(trigger)
            kick = PendingKick(robot.id, foot, world.time + params.kick_latency)
            pending.append(kick)
            kicking.add(robot.id)
            events.append(Event(
                world.time, 'kick_scheduled', robot.id, pose.x, pose.y, pose.theta,
                (('foot', foot.value), ('due', kick.due_time)),
            ))
        robots.append(replace(robot, command=robot.command.with_trigger(TriggerKind.NONE)))
    return replace(world, robots=tuple(robots), pending_kicks=tuple(pending)), events


def _integrate_robots(world, params):
    kicking = {k.robot_id for k in world.pending_kicks}
    robots = []
    for robot in world.robots:
        cmd = robot.command.clamped(params.v_max, params.omega_max)
        if robot.id in kicking:
            # standing on one leg while the kick motion plays
            cmd = replace(cmd, vx=0.0, vy=0.0, omega=0.0)
        dx = cmd.vx * params.dt
        dy = cmd.vy * params.dt
        dtheta = cmd.omega * params.dt
        pose = robot.pose.moved(dx, dy, dtheta)

        odometry = (dx, dy, dtheta)
        if params.odometry_noise > 0:
            scale = params.odometry_noise * math.hypot(dx, dy)
            noise = scale * normal_draws(world.seed, 'simulation', world.step_index,
                                         _ODOMETRY_STREAM + robot.id, width=2)
            odometry = (dx + float(noise[0]), dy + float(noise[1]), dtheta)
        gyro_rate = cmd.omega + params.gyro_bias
        if params.gyro_noise_std > 0:
            draw = normal_draws(world.seed, 'simulation', world.step_index, _GYRO_STREAM + robot.id)
            gyro_rate += float(draw[0]) * params.gyro_noise_std
        robots.append(replace(robot, pose=pose, odometry=odometry, gyro_rate=gyro_rate))
    return replace(world, robots=tuple(robots))


def _separate(pose, other, min_distance, share):
    dx = pose.x - other[0]
    dy = pose.y - other[1]
    distance = math.hypot(dx, dy)
    if distance >= min_distance:
        return pose, 0.0
    if distance == 0.0:
        dx, dy, distance = 1.0, 0.0, 1.0
    push = (min_distance - distance) * share
    return Pose2D(pose.x + dx / distance * push, pose.y + dy / distance * push, pose.theta), min_distance - distance


def _resolve_contacts(world, time):
    events = []
    robots = list(world.robots)
    for i in range(len(robots)):
        for j in range(i + 1, len(robots)):
            a, b = robots[i], robots[j]
            reach = a.radius + b.radius
            pose_a, depth = _separate(a.pose, b.pose.position, reach, 0.5)
            if depth > 0:
                pose_b, _ = _separate(b.pose, a.pose.position, reach, 0.5)
                robots[i] = replace(a, pose=pose_a)
                robots[j] = replace(b, pose=pose_b)
                events.append(Event(time, 'collision', a.id, a.pose.x, a.pose.y, a.pose.theta,
                                    (('other', f"robot:{b.id}"), ('depth', depth))))
    for i, robot in enumerate(robots):
        for obstacle in world.obstacles:
            pose, depth = _separate(robot.pose, obstacle.position, robot.radius + obstacle.radius, 1.0)
            if depth > 0:
                events.append(Event(time, 'collision', robot.id, robot.pose.x, robot.pose.y,
                                    robot.pose.theta,
                                    (('other', f"obstacle:{obstacle.id}"), ('depth', depth))))
                robot = replace(robot, pose=pose)
                robots[i] = robot
    return replace(world, robots=tuple(robots)), events


def _apply_due_kicks(world, params):
    due = [k for k in world.pending_kicks if k.due_time <= world.time + 1e-9]
    if not due:
        return world
    world = replace(world, pending_kicks=tuple(k for k in world.pending_kicks if k not in due))
    for kick in due:
        world = apply_kick(world, kick.robot_id, kick.foot, params)
    return world


# =============================================================================
# BALL
# =============================================================================

def _roll_ball(ball, params):
    vx, vy = ball.velocity
    speed = math.hypot(vx, vy)
    if speed > 0:
        new_speed = max(0.0, speed - params.ball_friction_decel * params.dt)
        vx, vy = vx * new_speed / speed, vy * new_speed / speed
    x, y = ball.position
    return replace(ball, position=(x + vx * params.dt, y + vy * params.dt), velocity=(vx, vy))


def _ball_contacts(world, previous_poses, params, time):
    events = []
    ball = world.ball
    for robot in world.robots:
        reach = robot.radius + params.ball_radius
        bx, by = ball.position
        dx, dy = bx - robot.pose.x, by - robot.pose.y
        distance = math.hypot(dx, dy)
        if distance >= reach:
            continue
        if distance == 0.0:
            dx, dy, distance = math.cos(robot.pose.theta), math.sin(robot.pose.theta), 1.0
        nx, ny = dx / distance, dy / distance
        before = previous_poses[robot.id]
        rvx = (robot.pose.x - before.x) / params.dt
        rvy = (robot.pose.y - before.y) / params.dt
        vx, vy = ball.velocity
        approach = (vx - rvx) * nx + (vy - rvy) * ny
        if approach < 0:
            impulse = (1.0 + params.restitution) * approach
            vx, vy = vx - impulse * nx, vy - impulse * ny
        position = (robot.pose.x + nx * reach, robot.pose.y + ny * reach)
        ball = replace(ball, position=position, velocity=(vx, vy))
        events.append(Event(time, 'contact', robot.id, position[0], position[1], None,
                            (('vx', vx), ('vy', vy))))
    return replace(world, ball=ball), events


def _crossing(p0, p1, x_line):
    """y where the segment p0-p1 crosses x = x_line, or None."""
    (x0, y0), (x1, y1) = p0, p1
    if x0 == x1 or (x0 - x_line) * (x1 - x_line) > 0:
        return None
    t = (x_line - x0) / (x1 - x0)
    return y0 + t * (y1 - y0)


def detect_goal(field, p0, p1):
    """
    Goal test on the swept ball segment.

    Returns:
        'home' if the ball entered the +x goal, 'away' for the -x goal, else None
    """
    half_goal = field.goal_width / 2.0
    for x_line, team in ((field.half_length, 'home'), (-field.half_length, 'away')):
        inside_before = p0[0] < x_line if team == 'home' else p0[0] > x_line
        if not inside_before:
            continue
        y = _crossing(p0, p1, x_line)
        if y is not None and abs(y) <= half_goal:
            return team
    return None


def _judge_ball(world, p0):
    field = world.field
    p1 = world.ball.position
    scorer = detect_goal(field, p0, p1)
    if scorer is not None:
        own, opponent = world.score
        score = (own + 1, opponent) if scorer == 'home' else (own, opponent + 1)
        logger.info(f"Goal for {scorer} at t={world.time:.2f}, score {score[0]}:{score[1]}")
        return replace(world, score=score, status=WorldStatus.GOAL_SCORED), [Event(
            world.time, 'goal', None, p1[0], p1[1], None,
            (('team', scorer), ('own', score[0]), ('opponent', score[1])),
        )]
    if abs(p1[0]) > field.half_length or abs(p1[1]) > field.half_width:
        logger.debug(f"Ball out at ({p1[0]:.2f}, {p1[1]:.2f}) t={world.time:.2f}")
        return replace(world, status=WorldStatus.BALL_OUT), [Event(
            world.time, 'ball_out', None, p1[0], p1[1], None,
        )]
    return world, []


# =============================================================================
# STEP
# =============================================================================

def step(world, params):
    """
    Advance a running world by one period.

    Args:
        world: WorldState with status Running
        params: SimParams

    Returns:
        New WorldState; ``events`` holds only this step's events
    """
    if world.status != WorldStatus.RUNNING:
        raise SimulationStateError(f"cannot step a world in status {world.status.value}")

    time = world.time + params.dt
    world = replace(world, events=())
    world, events = _consume_triggers(world, params)
    previous_poses = {r.id: r.pose for r in world.robots}
    world = _integrate_robots(world, params)
    world = replace(world, time=time, step_index=world.step_index + 1)

    world, contact_events = _resolve_contacts(world, time)
    events += contact_events

    world = replace(world, events=tuple(events))
    world = _apply_due_kicks(world, params)
    events = list(world.events)

    p0 = world.ball.position
    world = replace(world, ball=_roll_ball(world.ball, params))
    world, contact_events = _ball_contacts(world, previous_poses, params, time)
    events += contact_events

    world, judge_events = _judge_ball(world, p0)
    events += judge_events
    return replace(world, events=tuple(events))


def resume_play(world, params, margin=0.3):
    """
    Put the ball back into play after a goal or ball-out.

    After a goal the ball returns to the center spot; after ball-out it is
    placed ``margin`` meters inside the field at the exit point.
    """
    field = world.field
    if world.status == WorldStatus.GOAL_SCORED:
        position = (0.0, 0.0)
        kind = 'kickoff'
    elif world.status == WorldStatus.BALL_OUT:
        x, y = world.ball.position
        position = (
            max(-field.half_length + margin, min(field.half_length - margin, x)),
            max(-field.half_width + margin, min(field.half_width - margin, y)),
        )
        kind = 'throw_in'
    else:
        raise SimulationStateError(f"nothing to resume in status {world.status.value}")
    ball = replace(world.ball, position=position, velocity=(0.0, 0.0))
    world = replace(world, ball=ball, status=WorldStatus.RUNNING, pending_kicks=())
    return world.with_events(Event(world.time, kind, None, position[0], position[1], None))


def finish(world):
    """Stop the world; further steps raise SimulationStateError."""
    return replace(world, status=WorldStatus.FINISHED).with_events(Event(
        world.time, 'finish', None, None, None, None,
        (('own', world.score[0]), ('opponent', world.score[1])),
    ))

