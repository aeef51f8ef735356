"""
Tests for the behavior stack: approach, avoidance, ball handling,
dribbling and both FSMs.
"""

import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError, SimulationStateError
from core.factories import BehaviorParamsFactory, FieldSpecFactory, ObstacleClusterFactory
from field.geometry import Pose2D, field_to_ego
from simulation.state import Foot, TriggerKind, VelocityCommand

from .approach import approach_complete, approach_waypoint, ball_approach, kick_line
from .avoidance import avoid_obstacle, detour_waypoint, effective_cap, radial_component
from .ball_handling import _corridor_blocked_many, adjust_ball_target, corridor_blocked
from .behaviour_fsm import BehaviourState, behaviour_fsm_step
from .context import BehaviorContext
from .dribble import dribble_command, kick_command, lock_held
from .game_fsm import GameState, game_fsm_step
from .params import BehaviorParams
from .transitions import (
    DRIBBLE, FAR, FSM_BEHAVIOUR, FSM_GAME, KICK, NEAR, SEARCH, WALK,
    GameStateKind, check_transition, is_declared,
)

GOAL = (4.5, 0.0)


def context(pose, ball=None, obstacles=(), now=0.0, seen_at=None, **kwargs):
    """BehaviorContext from field-frame ball and obstacle positions."""
    field = kwargs.pop('field', FieldSpecFactory())
    ball_ego = field_to_ego(pose, ball) if ball is not None else None
    if ball is not None and seen_at is None:
        seen_at = now
    clusters = tuple(ObstacleClusterFactory(position=field_to_ego(pose, o)) for o in obstacles)
    return BehaviorContext(field=field, pose=pose, now=now, ball_ego=ball_ego,
                           ball_seen_at=seen_at, obstacles=clusters, **kwargs)


def score(target=GOAL, forced=False, foot=Foot.EITHER):
    return GameState(GameStateKind.SCORE_GOAL, ball_target=target, forced_dribble=forced, dribble_foot=foot)


def sweep_oracle(ball, target, obstacles, half_width, step_deg=1.0, limit_deg=90.0):
    """First clearing rotation in each direction on a coarse grid; minimal magnitude in degrees."""
    best = None
    for sign in (1.0, -1.0):
        angle = 0.0
        while angle <= limit_deg:
            a = math.radians(sign * angle)
            c, s = math.cos(a), math.sin(a)
            dx, dy = target[0] - ball[0], target[1] - ball[1]
            rotated = (ball[0] + c * dx - s * dy, ball[1] + s * dx + c * dy)
            if not corridor_blocked(ball, rotated, obstacles, half_width):
                best = angle if best is None else min(best, angle)
                break
            angle += step_deg
    return best


class BehaviorParamsTests(SimpleTestCase):

    def test_defaults(self):
        params = BehaviorParamsFactory()
        self.assertEqual(params.halo_radius, 0.65)
        self.assertAlmostEqual(params.near_speed, 0.25)
        self.assertAlmostEqual(params.cap(params.d_repel), 0.0)
        self.assertAlmostEqual(params.cap(params.influence_radius), params.v_cap)
        self.assertLess(params.cap(0.25), 0.0)

    def test_hysteresis_thresholds_validated(self):
        with self.assertRaises(ConfigurationError) as ctx:
            BehaviorParams.from_dict({'near_enter': 1.5, 'near_exit': 1.3})
        self.assertEqual(ctx.exception.key, 'behavior.near_enter')

    def test_unknown_key_rejected(self):
        with self.assertRaises(ConfigurationError):
            BehaviorParams.from_dict({'halo': 0.5})


class BallApproachTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()

    def test_far_aligned_walks_forward(self):
        cmd = ball_approach(Pose2D(-3.0, 0.0, 0.0), (0.0, 0.0), GOAL, 0.65, self.params)
        self.assertGreater(cmd.vx, 0.0)
        self.assertEqual(cmd.vy, 0.0)
        self.assertLess(abs(cmd.omega), 0.2)

    def test_near_side_steps_at_reduced_speed(self):
        cmd = ball_approach(Pose2D(0.0, -0.5, math.pi / 2), (0.0, 0.0), GOAL, 0.65, self.params)
        self.assertGreater(abs(cmd.vy), 0.0)
        self.assertLessEqual(cmd.speed, self.params.near_speed + 1e-9)

    def test_unknown_ball_returns_none(self):
        self.assertIsNone(ball_approach(Pose2D(0, 0, 0), None, GOAL, 0.65, self.params))

    def test_behind_point_completes_approach(self):
        pose = Pose2D(-0.65, 0.1, 0.0)
        line = kick_line(pose, (0.0, 0.0), GOAL, Foot.EITHER, self.params)
        self.assertEqual(line.foot, Foot.RIGHT)
        self.assertAlmostEqual(line.lateral, 0.0)
        self.assertAlmostEqual(line.along, 0.4)
        self.assertTrue(approach_complete(line, 0.65, self.params))

    def test_either_foot_picks_closer_foot(self):
        line = kick_line(Pose2D(-0.65, -0.1, 0.0), (0.0, 0.0), GOAL, Foot.EITHER, self.params)
        self.assertEqual(line.foot, Foot.LEFT)

    def test_misaligned_robot_not_complete(self):
        line = kick_line(Pose2D(-0.65, 0.1, 0.5), (0.0, 0.0), GOAL, Foot.EITHER, self.params)
        self.assertFalse(approach_complete(line, 0.65, self.params))

    def test_waypoint_never_inside_halo(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            pose = Pose2D(*rng.uniform(-4, 4, 2), rng.uniform(-math.pi, math.pi))
            ball = tuple(rng.uniform(-4, 4, 2))
            line = kick_line(pose, ball, GOAL, Foot.EITHER, self.params)
            waypoint = approach_waypoint(line, 0.65, self.params)
            gap = math.dist(waypoint, line.ball)
            self.assertGreaterEqual(gap, 0.65 - 1e-9)

    def test_far_case_never_side_steps(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            pose = Pose2D(*rng.uniform(-4, 4, 2), rng.uniform(-math.pi, math.pi))
            ball = tuple(rng.uniform(-4, 4, 2))
            cmd = ball_approach(pose, ball, GOAL, 0.65, self.params, near=False)
            self.assertEqual(cmd.vy, 0.0)


class AvoidObstacleTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()

    def test_no_obstacle_in_range_is_identity(self):
        cmd = VelocityCommand(0.3, 0.1, 0.2)
        out, report = avoid_obstacle(cmd, [ObstacleClusterFactory(position=(2.0, 0.0))], self.params)
        self.assertEqual(out, cmd)
        self.assertFalse(report.active)

    def test_dead_ahead_capped(self):
        cmd = VelocityCommand(0.3, 0.0, 0.0)
        out, report = avoid_obstacle(cmd, [ObstacleClusterFactory(position=(1.0, 0.0))], self.params)
        self.assertLessEqual(out.vx, self.params.cap(1.0) + 1e-9)
        self.assertLess(out.vx, 0.3)
        self.assertLessEqual(out.speed, 0.3 + 1e-9)
        self.assertAlmostEqual(report.cap, self.params.cap(1.0))

    def test_inside_repel_radius_moves_away(self):
        cmd = VelocityCommand(0.3, 0.0, 0.0)
        out, _ = avoid_obstacle(cmd, [ObstacleClusterFactory(position=(0.25, 0.0))], self.params)
        self.assertLess(radial_component(out.vx, out.vy, 0.0), 0.0)

    def test_turns_away_from_obstacle(self):
        cmd = VelocityCommand(0.3, 0.0, 0.0)
        left, _ = avoid_obstacle(cmd, [ObstacleClusterFactory(position=(1.0, 0.3))], self.params)
        right, _ = avoid_obstacle(cmd, [ObstacleClusterFactory(position=(1.0, -0.3))], self.params)
        self.assertLess(left.omega, 0.0)
        self.assertGreater(right.omega, 0.0)

    def test_axis_only_keeps_vy(self):
        cmd = VelocityCommand(0.4, 0.0, 0.0)
        out, _ = avoid_obstacle(cmd, [(0.8, 0.2)], self.params, axis_only=True)
        self.assertEqual(out.vy, 0.0)
        self.assertLess(out.vx, 0.4)

    def test_trigger_survives(self):
        cmd = VelocityCommand().with_trigger(TriggerKind.KICK_LEFT)
        out, _ = avoid_obstacle(cmd, [(0.5, 0.0)], self.params)
        self.assertEqual(out.trigger, TriggerKind.KICK_LEFT)

    def test_radial_cap_and_speed_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            axis_only = bool(rng.integers(2))
            vx, vy = rng.uniform(-0.5, 0.5, 2)
            if axis_only:
                vy = 0.0
            cmd = VelocityCommand(float(vx), float(vy), float(rng.uniform(-1, 1)))
            d = rng.uniform(0.05, 1.5)
            b = rng.uniform(-math.pi, math.pi)
            obstacle = (d * math.cos(b), d * math.sin(b))
            out, report = avoid_obstacle(cmd, [obstacle], self.params, axis_only=axis_only)
            self.assertTrue(report.active)
            self.assertAlmostEqual(report.cap, effective_cap(self.params, d, b, cmd.speed, axis_only))
            self.assertGreaterEqual(report.cap, self.params.cap(d) - 1e-12)
            self.assertLessEqual(radial_component(out.vx, out.vy, report.bearing), report.cap + 1e-9)
            self.assertLessEqual(out.speed, cmd.speed + 1e-9)
            self.assertLessEqual(abs(out.omega), self.params.omega_max + 1e-12)

    def test_pass_side_sets_turn_direction(self):
        cmd = VelocityCommand(0.3, 0.0, 0.0)
        out, _ = avoid_obstacle(cmd, [(1.0, 0.3)], self.params, axis_only=True, pass_side=1.0)
        self.assertGreater(out.omega, 0.0)


class DetourTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()

    def test_clear_path_keeps_waypoint(self):
        self.assertEqual(detour_waypoint((3.0, 0.0), [], self.params), ((3.0, 0.0), None))
        beside = [ObstacleClusterFactory(position=(1.0, 0.8))]
        self.assertEqual(detour_waypoint((3.0, 0.0), beside, self.params), ((3.0, 0.0), None))
        beyond = [ObstacleClusterFactory(position=(1.3, 0.0))]
        self.assertEqual(detour_waypoint((0.5, 0.0), beyond, self.params), ((0.5, 0.0), None))

    def test_obstacle_beyond_influence_ignored(self):
        far_away = [ObstacleClusterFactory(position=(2.0, 0.0))]
        self.assertEqual(detour_waypoint((4.0, 0.0), far_away, self.params), ((4.0, 0.0), None))

    def test_blocking_obstacle_gives_tangent_point(self):
        obstacle = (1.0, 0.05)
        point, side = detour_waypoint((3.0, 0.0), [ObstacleClusterFactory(position=obstacle)], self.params)
        self.assertEqual(side, -1.0)
        self.assertLess(point[1], 0.0)
        self.assertAlmostEqual(math.dist(point, obstacle), self.params.detour_clearance)
        self.assertAlmostEqual(math.hypot(*point) ** 2 + self.params.detour_clearance ** 2,
                               math.hypot(*obstacle) ** 2)

    def test_passes_on_the_waypoint_side(self):
        point, side = detour_waypoint((3.0, 0.4), [(1.0, 0.0)], self.params)
        self.assertEqual(side, 1.0)
        self.assertGreater(point[1], 0.0)

    def test_inside_clearance_follows_the_circle(self):
        obstacle = (0.4, 0.05)
        point, side = detour_waypoint((3.0, 0.0), [obstacle], self.params)
        self.assertEqual(side, -1.0)
        heading = math.atan2(point[1], point[0])
        self.assertAlmostEqual(heading, math.atan2(obstacle[1], obstacle[0]) - math.pi / 2)


class AdjustBallTargetTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()
        self.field = FieldSpecFactory()

    def test_batched_corridor_test_agrees(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            ball = tuple(rng.uniform(-2, 2, 2))
            obstacles = [tuple(o) for o in rng.uniform(-3, 3, (3, 2))]
            targets = rng.uniform(-4, 4, (50, 2))
            batched = _corridor_blocked_many(ball, targets, obstacles, 0.45)
            self.assertEqual(batched.tolist(),
                             [corridor_blocked(ball, tuple(t), obstacles, 0.45) for t in targets])

    def test_no_obstacles_unchanged(self):
        target, forced, foot = adjust_ball_target((0.0, 0.0), GOAL, [], self.params, self.field)
        self.assertEqual(target, GOAL)
        self.assertFalse(forced)
        self.assertEqual(foot, Foot.EITHER)

    def test_obstacle_on_line_rotates_minimally(self):
        decision = adjust_ball_target((0.0, 0.0), GOAL, [(1.0, 0.0)], self.params, self.field)
        self.assertAlmostEqual(abs(decision.rotation), math.asin(0.45), places=4)
        self.assertFalse(corridor_blocked((0.0, 0.0), decision.ball_target, [(1.0, 0.0)], 0.45 - 1e-6))
        oracle = sweep_oracle((0.0, 0.0), GOAL, [(1.0, 0.0)], 0.45)
        self.assertLessEqual(abs(math.degrees(abs(decision.rotation)) - oracle), 1.0)
        # rotated about 27 degrees the ray misses the goal mouth
        self.assertTrue(decision.forced_dribble)

    def test_rotates_toward_the_shorter_side(self):
        ball = (2.0, 0.0)
        decision = adjust_ball_target(ball, GOAL, [(2.8, 0.35)], self.params, self.field)
        self.assertLess(decision.rotation, 0.0)
        self.assertFalse(decision.forced_dribble)
        self.assertFalse(corridor_blocked(ball, decision.ball_target, [(2.8, 0.35)], 0.45 - 1e-6))

    def test_tie_goes_to_the_side_still_on_goal(self):
        ball = (3.0, 0.6)
        heading = math.atan2(GOAL[1] - ball[1], GOAL[0] - ball[0])
        obstacle = (ball[0] + math.cos(heading), ball[1] + math.sin(heading))
        decision = adjust_ball_target(ball, GOAL, [obstacle], self.params, self.field)
        self.assertAlmostEqual(decision.rotation, math.asin(0.45), places=4)
        self.assertFalse(decision.forced_dribble)

    def test_close_obstacle_forces_dribble_with_far_foot(self):
        target, forced, foot = adjust_ball_target((0.0, 0.0), GOAL, [(0.0, -0.3)], self.params, self.field)
        self.assertEqual(target, GOAL)
        self.assertTrue(forced)
        self.assertEqual(foot, Foot.LEFT)
        _, _, foot = adjust_ball_target((0.0, 0.0), GOAL, [(0.0, 0.3)], self.params, self.field)
        self.assertEqual(foot, Foot.RIGHT)

    def test_rotation_within_a_degree_of_sweep(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            ball = (float(rng.uniform(-3, 3)), float(rng.uniform(-2, 2)))
            distance = rng.uniform(0.3, 2.0)
            direction = math.atan2(GOAL[1] - ball[1], GOAL[0] - ball[0]) + rng.uniform(-0.3, 0.3)
            obstacle = (ball[0] + distance * math.cos(direction), ball[1] + distance * math.sin(direction))
            decision = adjust_ball_target(ball, GOAL, [obstacle], self.params, self.field)
            oracle = sweep_oracle(ball, GOAL, [obstacle], 0.45)
            if oracle is None:
                continue
            self.assertLessEqual(abs(math.degrees(abs(decision.rotation)) - oracle), 1.0)

    def test_forced_dribble_soundness(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            ball = (float(rng.uniform(-4, 4)), float(rng.uniform(-3, 3)))
            obstacles = [tuple(rng.uniform(-4, 4, 2)) for _ in range(rng.integers(1, 3))]
            decision = adjust_ball_target(ball, GOAL, obstacles, self.params, self.field)
            if decision.forced_dribble:
                close = min(math.dist(ball, o) for o in obstacles) < self.params.close_threshold
                self.assertTrue(close or corridor_blocked(ball, GOAL, obstacles, 0.45))
            else:
                self.assertEqual(decision.dribble_foot, Foot.EITHER)


class DribbleTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()

    def line(self, pose, foot=Foot.RIGHT):
        return kick_line(pose, (0.0, 0.0), GOAL, foot, self.params)

    def test_aligned_is_pure_forward(self):
        cmd = dribble_command(self.line(Pose2D(-0.4, 0.1, 0.0)), self.params)
        self.assertAlmostEqual(cmd.vx, self.params.dribble_speed)
        self.assertAlmostEqual(cmd.vy, 0.0)
        self.assertAlmostEqual(cmd.omega, 0.0)

    def test_ball_left_of_foot_line_steps_left(self):
        cmd = dribble_command(self.line(Pose2D(-0.4, 0.05, 0.0)), self.params)
        self.assertGreater(cmd.vy, 0.0)

    def test_heading_error_corrected(self):
        cmd = dribble_command(self.line(Pose2D(-0.4, 0.1, 0.2)), self.params)
        self.assertLess(cmd.omega, 0.0)

    def test_kick_fires_within_reach(self):
        cmd, fired = kick_command(self.line(Pose2D(-0.3, 0.1, 0.0)), self.params)
        self.assertTrue(fired)
        self.assertEqual(cmd.trigger, TriggerKind.KICK_RIGHT)
        cmd, fired = kick_command(self.line(Pose2D(-0.3, -0.1, 0.0), Foot.LEFT), self.params)
        self.assertEqual(cmd.trigger, TriggerKind.KICK_LEFT)

    def test_kick_steps_up_when_out_of_reach(self):
        cmd, fired = kick_command(self.line(Pose2D(-0.65, 0.1, 0.0)), self.params)
        self.assertFalse(fired)
        self.assertGreater(cmd.vx, 0.0)
        self.assertEqual(cmd.trigger, TriggerKind.NONE)

    def test_lock_uses_widened_tolerance(self):
        drifted = self.line(Pose2D(-0.4, 0.2, 0.0))
        self.assertAlmostEqual(abs(drifted.lateral), 0.1)
        self.assertFalse(approach_complete(drifted, 0.65, self.params))
        self.assertTrue(lock_held(drifted, self.params))
        self.assertFalse(lock_held(self.line(Pose2D(-0.4, 0.35, 0.0)), self.params))
        self.assertFalse(lock_held(self.line(Pose2D(-1.5, 0.1, 0.0)), self.params))


class TransitionTests(SimpleTestCase):

    def test_declared_edges(self):
        self.assertTrue(is_declared(FSM_BEHAVIOUR, 'GoBehindBallFar', 'GoBehindBallNear'))
        self.assertTrue(is_declared(FSM_BEHAVIOUR, NEAR, KICK))
        self.assertFalse(is_declared(FSM_BEHAVIOUR, FAR, KICK))
        self.assertFalse(is_declared(FSM_BEHAVIOUR, 'Far', 'Near'))
        self.assertTrue(is_declared(FSM_GAME, 'ScoreGoal', 'DefendGoal'))
        self.assertFalse(is_declared(FSM_GAME, 'ScoreGoal', 'ScoreGoal'))

    def test_undeclared_edge_raises(self):
        with self.assertRaises(SimulationStateError):
            check_transition(FSM_BEHAVIOUR, KICK, DRIBBLE)


class GameFsmTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()

    def test_ball_at_midfield_scores(self):
        gs = game_fsm_step(GameState(), context(Pose2D(-2, 0, 0), (0.0, 0.0)), self.params)
        self.assertEqual(gs.state, GameStateKind.SCORE_GOAL)
        self.assertEqual(gs.ball_target, GOAL)
        self.assertFalse(gs.forced_dribble)
        self.assertFalse(gs.ball_lost)

    def test_positioning_phase(self):
        ctx = context(Pose2D(-2, 0, 0), (0.0, 0.0), positioning=True, assigned_pose=Pose2D(-0.85, 0, 0))
        gs = game_fsm_step(GameState(), ctx, self.params)
        self.assertEqual(gs.state, GameStateKind.AUTO_POSITION)
        self.assertEqual(gs.reason, 'positioning phase')

    def test_last_defender_in_own_third(self):
        params = BehaviorParamsFactory(last_defender=True)
        gs = game_fsm_step(GameState(), context(Pose2D(-1, 0, math.pi), (-3.0, 0.0)), params)
        self.assertEqual(gs.state, GameStateKind.DEFEND_GOAL)
        self.assertAlmostEqual(gs.defend_pose.x, -3.5)
        self.assertAlmostEqual(gs.defend_pose.y, 0.0)
        self.assertAlmostEqual(gs.defend_pose.theta, 0.0)
        gs = game_fsm_step(gs, context(Pose2D(-1, 0, 0), (0.0, 0.0)), params)
        self.assertEqual(gs.state, GameStateKind.SCORE_GOAL)

    def test_ball_lost_after_timeout(self):
        ctx = context(Pose2D(-2, 0, 0), (0.0, 0.0), now=6.0, seen_at=0.0)
        self.assertTrue(game_fsm_step(GameState(), ctx, self.params).ball_lost)

    def test_obstacle_rotates_target(self):
        gs = game_fsm_step(GameState(), context(Pose2D(-2, 0, 0), (0.0, 0.0), obstacles=[(1.0, 0.0)]),
                           self.params)
        self.assertNotEqual(gs.ball_target, GOAL)
        self.assertTrue(gs.blocked)
        self.assertTrue(gs.forced_dribble)


class BehaviourFsmTests(SimpleTestCase):

    def setUp(self):
        self.params = BehaviorParamsFactory()

    def step(self, state, pose, ball=(0.0, 0.0), gs=None, **kwargs):
        bs = state if isinstance(state, BehaviourState) else BehaviourState(state=state)
        return behaviour_fsm_step(bs, gs or score(), context(pose, ball, **kwargs), self.params)

    def test_aligned_behind_ball_kicks(self):
        bs, cmd, diag = self.step(NEAR, Pose2D(-0.3, 0.1, 0.0))
        self.assertEqual(bs.state, KICK)
        self.assertEqual(cmd.trigger, TriggerKind.KICK_RIGHT)
        self.assertEqual(diag.transition.target, 'Kick')
        bs, cmd, diag = behaviour_fsm_step(bs, score(), context(Pose2D(-0.3, 0.1, 0.0), (0.0, 0.0)),
                                           self.params)
        self.assertEqual(bs.state, FAR)
        self.assertEqual(diag.transition.reason, 'kick triggered')

    def test_forced_dribble_enters_dribble(self):
        bs, cmd, _ = self.step(NEAR, Pose2D(-0.65, 0.1, 0.0), gs=score(forced=True, foot=Foot.RIGHT))
        self.assertEqual(bs.state, DRIBBLE)
        self.assertTrue(bs.dribble_lock)
        self.assertEqual(bs.foot, Foot.RIGHT)
        self.assertEqual(cmd.trigger, TriggerKind.NONE)

    def test_dribble_tolerates_drift(self):
        bs = BehaviourState(state=DRIBBLE, foot=Foot.RIGHT, dribble_lock=True)
        gs = score(forced=True, foot=Foot.RIGHT)
        bs, cmd, diag = self.step(bs, Pose2D(-0.4, 0.2, 0.0), gs=gs)
        self.assertEqual(bs.state, DRIBBLE)
        self.assertIsNone(diag.transition)
        self.assertGreater(cmd.vx, 0.0)

    def test_dribble_lock_lost(self):
        bs = BehaviourState(state=DRIBBLE, foot=Foot.RIGHT, dribble_lock=True)
        bs, _, diag = self.step(bs, Pose2D(-0.4, 0.35, 0.0), gs=score(forced=True, foot=Foot.RIGHT))
        self.assertEqual(bs.state, FAR)
        self.assertFalse(bs.dribble_lock)
        self.assertEqual(diag.transition.reason, 'dribble lock lost')

    def test_hysteresis(self):
        pose = Pose2D(-1.15, 0.0, 0.0)
        self.assertEqual(self.step(FAR, pose)[0].state, FAR)
        self.assertEqual(self.step(NEAR, pose)[0].state, NEAR)
        self.assertEqual(self.step(FAR, Pose2D(-0.9, 0.0, 0.0))[0].state, NEAR)
        self.assertEqual(self.step(NEAR, Pose2D(-1.4, 0.0, 0.0))[0].state, FAR)

    def test_static_world_never_flips_back(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            pose = Pose2D(*rng.uniform(-2, 0, 2), rng.uniform(-math.pi, math.pi))
            bs = BehaviourState(state=FAR if rng.integers(2) else NEAR)
            previous = None
            for _ in range(4):
                bs, _, diag = behaviour_fsm_step(bs, score(), context(pose, (0.0, 0.0)), self.params)
                if diag.transition and previous:
                    self.assertNotEqual((diag.transition.source, diag.transition.target),
                                        (previous.target, previous.source))
                previous = diag.transition

    def test_ball_lost_searches(self):
        gs = GameState(GameStateKind.SCORE_GOAL, ball_target=GOAL, ball_lost=True)
        bs, cmd, diag = self.step(FAR, Pose2D(-2, 0, 0), gs=gs, now=6.0, seen_at=0.0)
        self.assertEqual(bs.state, SEARCH)
        self.assertEqual((cmd.vx, cmd.vy), (0.0, 0.0))
        self.assertNotEqual(cmd.omega, 0.0)
        self.assertEqual(diag.transition.reason, 'ball lost')

    def test_unknown_ball_searches(self):
        bs, _, _ = self.step(NEAR, Pose2D(-2, 0, 0), ball=None)
        self.assertEqual(bs.state, SEARCH)
        bs, _, _ = self.step(bs, Pose2D(-2, 0, 0))
        self.assertEqual(bs.state, FAR)

    def test_auto_position_walks_to_assigned_pose(self):
        gs = GameState(GameStateKind.AUTO_POSITION, ball_target=GOAL)
        target = Pose2D(-0.85, 0.0, 0.0)
        bs, cmd, _ = self.step(FAR, Pose2D(-2.0, 0.0, 0.0), gs=gs, assigned_pose=target)
        self.assertEqual(bs.state, WALK)
        self.assertGreater(cmd.vx, 0.0)
        bs, cmd, _ = self.step(bs, target, gs=gs, assigned_pose=target)
        self.assertEqual(cmd, VelocityCommand())

    def test_far_state_emits_no_side_step(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            pose = Pose2D(*rng.uniform(-4, 4, 2), rng.uniform(-math.pi, math.pi))
            ball = tuple(rng.uniform(-4, 4, 2))
            obstacles = [tuple(rng.uniform(-4, 4, 2))]
            bs, cmd, _ = self.step(FAR, pose, ball=ball, obstacles=obstacles)
            if bs.state == FAR:
                self.assertEqual(cmd.vy, 0.0)

    def test_far_approach_walks_around_blocking_obstacle(self):
        obstacle = (-0.5, 0.05)
        pose, bs = Pose2D(-2.0, 0.0, 0.0), BehaviourState(state=FAR)
        closest, detoured = math.inf, False
        for _ in range(300):
            bs, cmd, diag = self.step(bs, pose, ball=(1.0, 0.0), obstacles=[obstacle])
            if bs.state != FAR:
                break
            self.assertEqual(cmd.vy, 0.0)
            detoured = detoured or diag.detour is not None
            pose = pose.moved(cmd.vx * 0.1, 0.0, cmd.omega * 0.1)
            closest = min(closest, math.dist(pose.position, obstacle))
        self.assertEqual(bs.state, NEAR)
        self.assertTrue(detoured)
        self.assertGreater(pose.x, obstacle[0])
        self.assertGreater(closest, self.params.d_repel)

    def test_emitted_commands_respect_invariants(self):
        rng = np.random.default_rng(10)
        states = [FAR, NEAR, KICK, DRIBBLE, SEARCH, WALK]
        for _ in range(200):
            pose = Pose2D(*rng.uniform(-3, 3, 2), rng.uniform(-math.pi, math.pi))
            ball = tuple(pose.position + rng.uniform(-1.5, 1.5, 2))
            obstacles = [tuple(pose.position + rng.uniform(-1.2, 1.2, 2))]
            state = states[rng.integers(len(states))]
            bs = BehaviourState(state=state, foot=Foot.RIGHT)
            gs = score(forced=bool(rng.integers(2)), foot=Foot.RIGHT)
            bs, cmd, diag = self.step(bs, pose, ball=ball, gs=gs, obstacles=obstacles)
            if diag.transition:
                self.assertTrue(is_declared(FSM_BEHAVIOUR, diag.transition.source, diag.transition.target))
            if diag.waypoint is not None:
                self.assertGreaterEqual(math.dist(diag.waypoint, diag.ball_ego), diag.halo_radius - 1e-9)
            report = diag.avoidance
            if report.active:
                self.assertLessEqual(radial_component(cmd.vx, cmd.vy, report.bearing), report.cap + 1e-9)
                self.assertLessEqual(cmd.speed, diag.command_in.speed + 1e-9)
