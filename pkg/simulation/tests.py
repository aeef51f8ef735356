"""
Tests for the world simulation, scenarios and the event trace.
"""

import io
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError, LookupFailure, SimulationStateError, TraceParseError
from core.factories import FieldSpecFactory, SimParamsFactory
from field.geometry import Pose2D
from field.spec import StartLabel, start_pose_for

from .engine import apply_kick, detect_goal, finish, resume_play, schedule_kick, step
from .scenarios import (
    AVOIDANCE_DRILL, MATCH, MOVING_BALL_CHALLENGE, ScenarioConfig, spawn_scenario,
)
from .state import (
    BallState, Foot, ObstacleState, RobotState, TriggerKind, VelocityCommand, WorldState,
    WorldStatus, foot_point, set_command,
)
from .trace import TraceWriter, parse_trace


def make_world(pose=Pose2D(), ball=(2.0, 2.0), velocity=(0.0, 0.0), obstacles=(), robots=None):
    robots = robots or (RobotState(id=0, team='home', pose=pose),)
    return WorldState(
        field=FieldSpecFactory(),
        robots=tuple(robots),
        ball=BallState(ball, velocity),
        obstacles=tuple(obstacles),
        seed=11,
    )


class VelocityCommandTests(SimpleTestCase):

    def test_clamp_linear_and_yaw(self):
        cmd = VelocityCommand(3.0, 4.0, -2.0).clamped(0.5, 1.0)
        self.assertAlmostEqual(cmd.speed, 0.5)
        self.assertAlmostEqual(cmd.vx / cmd.vy, 0.75)
        self.assertEqual(cmd.omega, -1.0)

    def test_within_limits_unchanged(self):
        cmd = VelocityCommand(0.1, 0.1, 0.2, TriggerKind.PRE_KICK)
        self.assertEqual(cmd.clamped(0.5, 1.0), cmd)


class StepTests(SimpleTestCase):

    def test_euler_step(self):
        params = SimParamsFactory(dt=0.1, v_max=2.0)
        world = set_command(make_world(), 0, VelocityCommand(vx=1.0))
        world = step(world, params)
        pose = world.robot(0).pose
        self.assertAlmostEqual(pose.x, 0.1)
        self.assertAlmostEqual(pose.y, 0.0)
        self.assertEqual(pose.theta, 0.0)
        self.assertAlmostEqual(world.time, 0.1)
        self.assertEqual(world.step_index, 1)

    def test_own_frame_integration(self):
        params = SimParamsFactory(dt=0.1, v_max=2.0)
        world = set_command(make_world(pose=Pose2D(0, 0, math.pi / 2)), 0, VelocityCommand(vx=1.0))
        pose = step(world, params).robot(0).pose
        self.assertAlmostEqual(pose.x, 0.0)
        self.assertAlmostEqual(pose.y, 0.1)

    def test_ball_friction(self):
        params = SimParamsFactory(dt=0.1, ball_friction_decel=0.5)
        world = step(make_world(velocity=(1.0, 0.0)), params)
        self.assertAlmostEqual(world.ball.speed, 0.95)

    def test_ball_friction_clamps_to_zero(self):
        params = SimParamsFactory(dt=0.1, ball_friction_decel=0.5)
        world = step(make_world(velocity=(0.04, 0.0)), params)
        self.assertEqual(world.ball.speed, 0.0)
        self.assertEqual(world.ball.position, (2.0, 2.0))

    def test_displacement_never_exceeds_limit(self):
        params = SimParamsFactory()
        rng = np.random.default_rng(1)
        world = make_world(ball=(3.0, 2.5))
        for _ in range(200):
            vx, vy, omega = rng.uniform(-3, 3, 3)
            world = set_command(world, 0, VelocityCommand(float(vx), float(vy), float(omega)))
            before = world.robot(0).pose
            world = step(world, params)
            after = world.robot(0).pose
            moved = math.hypot(after.x - before.x, after.y - before.y)
            self.assertLessEqual(moved, params.v_max * params.dt + 1e-12)

    def test_ball_speed_nonincreasing_without_kicks(self):
        params = SimParamsFactory()
        world = make_world(ball=(-3.0, -2.0), velocity=(1.2, 0.0))
        speed = world.ball.speed
        for _ in range(150):
            world = step(world, params)
            self.assertLessEqual(world.ball.speed, speed + 1e-12)
            speed = world.ball.speed

    def test_step_requires_running(self):
        world = finish(make_world())
        with self.assertRaises(SimulationStateError):
            step(world, SimParamsFactory())

    def test_determinism(self):
        params = SimParamsFactory(odometry_noise=0.1, gyro_noise_std=0.01, kick_angle_noise=0.05)
        world = set_command(make_world(), 0, VelocityCommand(0.3, 0.1, 0.4))
        a = b = world
        for _ in range(50):
            a = step(a, params)
            b = step(b, params)
        self.assertEqual(a, b)
        self.assertEqual(a.robot(0).odometry, b.robot(0).odometry)

    def test_gyro_bias_added(self):
        params = SimParamsFactory(gyro_bias=0.002)
        world = set_command(make_world(), 0, VelocityCommand(omega=0.5))
        self.assertAlmostEqual(step(world, params).robot(0).gyro_rate, 0.502)

    def test_odometry_reports_egocentric_displacement(self):
        params = SimParamsFactory()
        world = set_command(make_world(pose=Pose2D(0, 0, 1.0)), 0, VelocityCommand(0.3, -0.1, 0.2))
        dx, dy, dtheta = step(world, params).robot(0).odometry
        self.assertAlmostEqual(dx, 0.3 * params.dt)
        self.assertAlmostEqual(dy, -0.1 * params.dt)
        self.assertAlmostEqual(dtheta, 0.2 * params.dt)


class ContactTests(SimpleTestCase):

    def test_robot_obstacle_separated(self):
        obstacle = ObstacleState(100, (0.3, 0.0), radius=0.2)
        world = set_command(make_world(obstacles=[obstacle]), 0, VelocityCommand(vx=0.5))
        world = step(world, SimParamsFactory())
        pose = world.robot(0).pose
        self.assertGreaterEqual(math.hypot(pose.x - 0.3, pose.y) + 1e-12, 0.35)
        self.assertIn('collision', [e.kind for e in world.events])

    def test_robots_pushed_apart(self):
        robots = (RobotState(0, 'home', Pose2D(0, 0, 0)), RobotState(1, 'away', Pose2D(0.2, 0, math.pi)))
        world = step(make_world(robots=robots), SimParamsFactory())
        a, b = world.robot(0).pose, world.robot(1).pose
        self.assertAlmostEqual(math.hypot(a.x - b.x, a.y - b.y), 0.3)

    def test_ball_reflects_off_robot(self):
        params = SimParamsFactory()
        world = make_world(ball=(0.5, 0.0), velocity=(-1.0, 0.0))
        for _ in range(30):
            world = step(world, params)
            if world.ball.velocity[0] > 0:
                break
        self.assertGreater(world.ball.velocity[0], 0.0)
        self.assertLess(world.ball.speed, 0.35)
        self.assertGreaterEqual(world.ball.position[0], params.robot_radius + params.ball_radius - 1e-9)


class KickTests(SimpleTestCase):

    def _ready_world(self, theta):
        params = SimParamsFactory()
        pose = Pose2D(0.0, 0.0, theta)
        ball = foot_point(pose, Foot.RIGHT, params)
        return make_world(pose=pose, ball=ball), params

    def test_kick_along_heading(self):
        world, params = self._ready_world(0.0)
        world = apply_kick(world, 0, Foot.RIGHT, params)
        self.assertAlmostEqual(world.ball.velocity[0], 2.5)
        self.assertAlmostEqual(world.ball.velocity[1], 0.0)
        self.assertEqual(world.events[-1].kind, 'kick')

    def test_kick_quarter_turn(self):
        world, params = self._ready_world(math.pi / 2)
        world = apply_kick(world, 0, Foot.RIGHT, params)
        self.assertAlmostEqual(world.ball.velocity[0], 0.0)
        self.assertAlmostEqual(world.ball.velocity[1], 2.5)

    def test_kick_rejected_out_of_region(self):
        params = SimParamsFactory(kick_region_radius=0.3)
        world = make_world(ball=(1.25, -0.1))
        kicked = apply_kick(world, 0, Foot.RIGHT, params)
        self.assertEqual(kicked.ball, world.ball)
        self.assertEqual(kicked.events[-1].kind, 'kick_rejected')

    def test_either_foot_picks_nearest(self):
        params = SimParamsFactory()
        pose = Pose2D()
        world = make_world(ball=foot_point(pose, Foot.LEFT, params))
        world = apply_kick(world, 0, Foot.EITHER, params)
        self.assertEqual(dict(world.events[-1].extra)['foot'], 'Left')

    def test_unknown_robot(self):
        with self.assertRaises(LookupFailure):
            apply_kick(make_world(), 7, Foot.LEFT, SimParamsFactory())

    def test_trigger_applies_after_latency(self):
        params = SimParamsFactory(kick_latency=0.1, ball_friction_decel=0.0)
        world, _ = self._ready_world(0.0)
        world = set_command(world, 0, VelocityCommand(trigger=TriggerKind.KICK_RIGHT))
        kinds = []
        for _ in range(6):
            world = step(world, params)
            kinds += [e.kind for e in world.events]
        self.assertEqual(kinds.count('kick_scheduled'), 1)
        self.assertEqual(kinds.count('kick'), 1)
        self.assertGreater(world.ball.velocity[0], 2.0)

    def test_schedule_kick(self):
        world, params = self._ready_world(0.0)
        world = schedule_kick(world, 0, Foot.RIGHT, 0.04)
        self.assertEqual(len(world.pending_kicks), 1)
        world = step(step(world, params), params)
        self.assertEqual(world.pending_kicks, ())
        self.assertGreater(world.ball.speed, 2.0)


class GoalDetectionTests(SimpleTestCase):

    def test_goal_scored(self):
        field = FieldSpecFactory()
        world = make_world(ball=(4.45, 0.2), velocity=(4.0, 0.0))
        world = step(world, SimParamsFactory(dt=0.05))
        self.assertEqual(world.status, WorldStatus.GOAL_SCORED)
        self.assertEqual(world.score, (1, 0))
        self.assertLess(abs(world.ball.position[1]), field.goal_width / 2)

    def test_wide_shot_is_ball_out(self):
        world = step(make_world(ball=(4.45, 2.0), velocity=(4.0, 0.0)), SimParamsFactory(dt=0.05))
        self.assertEqual(world.status, WorldStatus.BALL_OUT)

    def test_own_goal_counts_for_opponent(self):
        world = step(make_world(ball=(-4.45, 0.0), velocity=(-4.0, 0.0)), SimParamsFactory(dt=0.05))
        self.assertEqual(world.score, (0, 1))

    def test_no_tunneling_against_substep_oracle(self):
        field = FieldSpecFactory()
        rng = np.random.default_rng(42)
        checked = 0
        for _ in range(4000):
            p0 = (float(rng.uniform(4.2, 4.499)), float(rng.uniform(-2.0, 2.0)))
            speed = rng.uniform(0.5, 5.0)
            angle = rng.uniform(-1.2, 1.2)
            p1 = (p0[0] + 0.05 * speed * math.cos(angle), p0[1] + 0.05 * speed * math.sin(angle))
            samples = [
                (p0[0] + (p1[0] - p0[0]) * k / 100.0, p0[1] + (p1[1] - p0[1]) * k / 100.0)
                for k in range(101)
            ]
            first = next((k for k, q in enumerate(samples) if q[0] >= field.half_length), None)
            if first is None:
                self.assertIsNone(detect_goal(field, p0, p1))
                continue
            inside = [abs(q[1]) <= field.goal_width / 2 for q in samples[max(0, first - 1):first + 1]]
            if len(set(inside)) > 1:
                continue
            checked += 1
            expected = 'home' if inside[0] else None
            self.assertEqual(detect_goal(field, p0, p1), expected)
        self.assertGreater(checked, 500)

    def test_resume_after_goal(self):
        world = step(make_world(ball=(4.45, 0.2), velocity=(4.0, 0.0)), SimParamsFactory(dt=0.05))
        world = resume_play(world, SimParamsFactory())
        self.assertEqual(world.status, WorldStatus.RUNNING)
        self.assertEqual(world.ball.position, (0.0, 0.0))

    def test_resume_after_ball_out(self):
        world = step(make_world(ball=(4.45, 2.0), velocity=(4.0, 0.0)), SimParamsFactory(dt=0.05))
        world = resume_play(world, SimParamsFactory())
        x, y = world.ball.position
        self.assertAlmostEqual(x, 4.2)
        self.assertAlmostEqual(y, 2.0)
        self.assertEqual(world.events[-1].kind, 'throw_in')


class ScenarioTests(SimpleTestCase):

    def test_moving_ball_challenge(self):
        field = FieldSpecFactory()
        config = ScenarioConfig(name=MOVING_BALL_CHALLENGE, d_ramp=2.0, release_speed=0.8)
        world = spawn_scenario(MOVING_BALL_CHALLENGE, config, seed=3, field=field)
        bx, by = world.ball.position
        self.assertAlmostEqual(bx, field.half_length - field.goal_area_length)
        self.assertAlmostEqual(abs(by), 2.0)
        self.assertEqual(world.ball.velocity[0], 0.0)
        self.assertAlmostEqual(world.ball.speed, 0.8)

    def test_challenge_ball_reaches_kick_point(self):
        params = SimParamsFactory(ball_friction_decel=0.0)
        config = ScenarioConfig(name=MOVING_BALL_CHALLENGE, d_ramp=1.0, release_speed=1.0)
        world = spawn_scenario(MOVING_BALL_CHALLENGE, config, field=FieldSpecFactory(), params=params)
        target = foot_point(world.robot(0).pose, Foot.RIGHT, params)
        closest = 10.0
        for _ in range(60):
            world = step(world, params)
            closest = min(closest, math.dist(world.ball.position, target))
        self.assertLess(closest, 0.02)
        self.assertNotIn('contact', [e.kind for e in world.events])

    def test_match_is_deterministic(self):
        self.assertEqual(spawn_scenario(MATCH, seed=7), spawn_scenario(MATCH, seed=7))

    def test_match_start_pose(self):
        field = FieldSpecFactory()
        config = ScenarioConfig(start_label=StartLabel.SIDELINE_LEFT.value)
        world = spawn_scenario(MATCH, config, field=field)
        self.assertEqual(world.robot(0).pose, start_pose_for(field, StartLabel.SIDELINE_LEFT).pose)
        self.assertGreater(world.robot(1).pose.x, 0.0)

    def test_avoidance_obstacle_between_robot_and_ball(self):
        for seed in range(20):
            world = spawn_scenario(AVOIDANCE_DRILL, ScenarioConfig(name=AVOIDANCE_DRILL,
                                   start_label=StartLabel.GOAL_AREA_FACING_OPPONENT.value), seed=seed)
            robot = world.robot(0).pose
            ox, oy = world.obstacles[0].position
            bx, by = world.ball.position
            self.assertLess(robot.x, ox)
            self.assertLess(ox, bx)

    def test_unknown_scenario(self):
        with self.assertRaises(ConfigurationError):
            spawn_scenario('Penalty')

    def test_unknown_scenario_in_config(self):
        with self.assertRaises(ConfigurationError) as ctx:
            ScenarioConfig.from_dict({'name': 'Penalty'})
        self.assertEqual(ctx.exception.key, 'scenario.name')


class TraceTests(SimpleTestCase):

    def _write(self):
        stream = io.StringIO()
        writer = TraceWriter(stream)
        writer.write(0.02, 'robot', 0, -0.85, 0.0, 0.1, (('vx', 0.5), ('state', 'GoBehindBallFar')))
        writer.write(0.04, 'goal', None, 4.6, 0.1, None, {'team': 'home'})
        return stream.getvalue()

    def test_header_and_rows(self):
        text = self._write()
        lines = text.splitlines()
        self.assertEqual(lines[0], '#schema=1')
        self.assertEqual(lines[1], 'time,event_kind,actor_id,x,y,theta,extra')
        self.assertEqual(lines[2], '0.02,robot,0,-0.85,0.0,0.1,vx=0.5;state=GoBehindBallFar')

    def test_parse(self):
        rows = parse_trace(self._write())
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0].number('vx'), 0.5)
        self.assertEqual(rows[1].actor_id, None)
        self.assertEqual(rows[1].extra['team'], 'home')
        self.assertEqual(rows[1].line_no, 4)

    def test_identical_writes(self):
        self.assertEqual(self._write(), self._write())

    def test_bad_number_reports_line(self):
        text = self._write() + 'abc,robot,0,0,0,0,\n'
        with self.assertRaises(TraceParseError) as ctx:
            parse_trace(text)
        self.assertEqual(ctx.exception.line_no, 5)

    def test_missing_header(self):
        with self.assertRaises(TraceParseError) as ctx:
            parse_trace('time,event_kind\n')
        self.assertEqual(ctx.exception.line_no, 1)
