"""
Tests for gyro integration and the hypothesis bank.
"""

from collections import deque
from dataclasses import replace
import math

import numpy as np
from django.test import SimpleTestCase, tag

from core.exceptions import ConfigurationError, DomainError, SimulationStateError
from core.factories import FieldSpecFactory, NoiseModelFactory, ZeroNoiseModelFactory
from field.geometry import Pose2D, mirror_pose, normalize_angle
from field.landmarks import LandmarkKind
from field.spec import StartLabel, StartPose, start_pose_for, start_poses
from perception.observation import LandmarkSighting, Observation, observe
from simulation.state import BallState, RobotState, WorldState

from .bank import (
    BankMode, Hypothesis, HypothesisBank, correct, init_bank, pose_estimate, predict,
    restart_bank, select_best,
)
from .gyro import GyroState, integrate_gyro
from .likelihood import LocalizationParams, frame_likelihood


def world_at(pose, seed=0, step=0):
    return WorldState(
        field=FieldSpecFactory(),
        robots=(RobotState(0, 'home', pose),),
        ball=BallState((4.4, 2.9)),
        seed=seed,
        step_index=step,
    )


def lock_trial(label, noise, seed=0, bias=0.0, frames=100):
    """Stand at a start pose and run the bank at 10 Hz until it locks."""
    field = FieldSpecFactory()
    truth = start_pose_for(field, label).pose
    gyro = GyroState(bias=bias)
    bank = init_bank(field, start_poses(field), 0.0, 10.0, gyro)
    history = deque(maxlen=10)
    for frame in range(1, frames + 1):
        gyro = integrate_gyro(gyro, bias, 0.1)
        bank = predict(bank, (0.0, 0.0), gyro)
        obs = observe(world_at(truth, seed, frame * 5), 0, noise, field)
        history.append(obs)
        bank = correct(bank, obs, field)
        bank = select_best(bank, frame * 0.1, history, field)
        if bank.mode == BankMode.LOCKED:
            return bank
    return bank


# =============================================================================
# GYRO
# =============================================================================

class GyroTests(SimpleTestCase):

    def test_constant_rate(self):
        g = GyroState()
        for _ in range(100):
            g = integrate_gyro(g, 0.5, 0.02)
        self.assertAlmostEqual(g.yaw_integrated, 1.0, places=9)

    def test_zero_rate(self):
        g = GyroState(yaw_integrated=0.4)
        for _ in range(50):
            g = integrate_gyro(g, 0.0, 0.02)
        self.assertEqual(g.yaw_integrated, 0.4)

    def test_bias_drift(self):
        g = GyroState(bias=0.002)
        for _ in range(3000):
            g = integrate_gyro(g, 0.0 + g.bias, 0.02)
        self.assertAlmostEqual(g.yaw_integrated, 0.12, places=9)

    def test_dt_must_be_positive(self):
        with self.assertRaises(DomainError):
            integrate_gyro(GyroState(), 0.1, 0.0)


# =============================================================================
# BANK
# =============================================================================

class InitBankTests(SimpleTestCase):

    def setUp(self):
        self.field = FieldSpecFactory()

    def test_one_hypothesis_per_start_pose(self):
        bank = init_bank(self.field, start_poses(self.field), 0.0, 10.0)
        self.assertEqual([h.start_label for h in bank.hypotheses], list(StartLabel))
        self.assertTrue(all(h.alive and h.score == 0.0 for h in bank.hypotheses))
        self.assertEqual(bank.mode, BankMode.CONVERGING)
        for h, sp in zip(bank.hypotheses, start_poses(self.field)):
            self.assertEqual(h.reference_offset, sp.pose.theta)

    def test_two_face_the_opponent_goal(self):
        bank = init_bank(self.field, start_poses(self.field), 0.0, 10.0)
        self.assertEqual(sum(1 for h in bank.hypotheses if h.pose.theta == 0.0), 2)

    def test_deterministic(self):
        self.assertEqual(init_bank(self.field, start_poses(self.field), 1.0, 10.0),
                         init_bank(self.field, start_poses(self.field), 1.0, 10.0))

    def test_wrong_count(self):
        with self.assertRaises(ConfigurationError):
            init_bank(self.field, start_poses(self.field)[:3], 0.0, 10.0)

    def test_restart_keeps_sideline_pair(self):
        bank = restart_bank(self.field, 300.0, 10.0, GyroState(yaw_integrated=2.0))
        alive = [bank.hypotheses[i].start_label for i in bank.alive]
        self.assertEqual(alive, [StartLabel.SIDELINE_LEFT, StartLabel.SIDELINE_RIGHT])
        self.assertEqual(bank.started_at, 300.0)


class PredictTests(SimpleTestCase):

    def bank(self, theta):
        return HypothesisBank((Hypothesis(Pose2D(1.0, 0.5, theta), StartLabel.CENTER_FACING_OPPONENT, theta),))

    def test_forward_delta(self):
        bank = predict(self.bank(0.0), (0.1, 0.0), GyroState())
        self.assertAlmostEqual(bank.hypotheses[0].pose.x, 1.1)

    def test_delta_rotates_with_heading(self):
        bank = predict(self.bank(math.pi), (0.1, 0.0), GyroState())
        self.assertAlmostEqual(bank.hypotheses[0].pose.x, 0.9)
        self.assertAlmostEqual(bank.hypotheses[0].pose.y, 0.5)

    def test_identity(self):
        field = FieldSpecFactory()
        bank = init_bank(field, start_poses(field), 0.0, 10.0)
        self.assertEqual(predict(bank, (0.0, 0.0), GyroState()), bank)

    def test_heading_slaved_to_gyro(self):
        field = FieldSpecFactory()
        bank = init_bank(field, start_poses(field), 0.0, 10.0)
        gyro = GyroState()
        for step in range(40):
            gyro = integrate_gyro(gyro, 0.37, 0.02)
            bank = predict(bank, (0.01, 0.002), gyro)
            for h in bank.hypotheses:
                self.assertEqual(h.pose.theta, normalize_angle(h.reference_offset + gyro.yaw_integrated))

    def test_dead_bank(self):
        bank = replace(self.bank(0.0), hypotheses=(replace(self.bank(0.0).hypotheses[0], alive=False),))
        with self.assertRaises(SimulationStateError):
            predict(bank, (0.1, 0.0), GyroState())


class CorrectTests(SimpleTestCase):

    def setUp(self):
        self.field = FieldSpecFactory()
        self.poses = start_poses(self.field)

    def test_true_hypothesis_scores_best(self):
        for truth in self.poses:
            obs = observe(world_at(truth.pose), 0, ZeroNoiseModelFactory(), self.field)
            scores = {sp.label: frame_likelihood(sp.pose, obs, self.field).log_likelihood for sp in self.poses}
            best = scores.pop(truth.label)
            self.assertTrue(all(best > other for other in scores.values()), truth.label)

    def test_generic_poses(self):
        generic = [Pose2D(-1.3, 0.4, 0.2), Pose2D(-3.1, -0.7, -0.1), Pose2D(-2.0, 2.2, -1.2), Pose2D(-2.6, -2.4, 1.4)]
        candidates = [StartPose(p, label) for p, label in zip(generic, StartLabel)]
        for truth in candidates:
            obs = observe(world_at(truth.pose), 0, ZeroNoiseModelFactory(), self.field)
            scores = {c.label: frame_likelihood(c.pose, obs, self.field).log_likelihood for c in candidates}
            best = scores.pop(truth.label)
            self.assertTrue(all(best > other for other in scores.values()), truth.label)

    def test_empty_observation(self):
        bank = init_bank(self.field, self.poses, 0.0, 10.0)
        self.assertIs(correct(bank, Observation(stamp=0.0), self.field), bank)

    def test_equal_observation_counts(self):
        bank = init_bank(self.field, self.poses, 0.0, 10.0)
        for step in range(5):
            obs = observe(world_at(self.poses[0].pose, 3, step), 0, NoiseModelFactory(), self.field)
            bank = correct(bank, obs, self.field)
        counts = {bank.hypotheses[i].observations for i in bank.alive}
        self.assertEqual(len(counts), 1)

    def test_correction_reduces_position_error(self):
        truth = Pose2D(-1.0, 0.6, 0.3)
        obs = observe(world_at(truth), 0, ZeroNoiseModelFactory(), self.field)
        guess = Pose2D(truth.x + 0.2, truth.y - 0.15, truth.theta)
        bank = HypothesisBank((Hypothesis(guess, StartLabel.CENTER_FACING_OPPONENT, truth.theta),))
        corrected = correct(bank, obs, self.field).hypotheses[0].pose
        self.assertEqual(corrected.theta, truth.theta)
        before = math.hypot(guess.x - truth.x, guess.y - truth.y)
        after = math.hypot(corrected.x - truth.x, corrected.y - truth.y)
        self.assertLess(after, before)

    def test_likelihood_peaks_at_truth(self):
        truth = Pose2D(-1.5, -0.8, 0.4)
        obs = observe(world_at(truth), 0, ZeroNoiseModelFactory(), self.field)
        at_truth = frame_likelihood(truth, obs, self.field).log_likelihood
        for i in range(-5, 6):
            for j in range(-5, 6):
                if i == 0 and j == 0:
                    continue
                pose = Pose2D(truth.x + 0.1 * i, truth.y + 0.1 * j, truth.theta)
                self.assertLess(frame_likelihood(pose, obs, self.field).log_likelihood, at_truth)

    def test_mirrored_hypotheses_tie_on_lines(self):
        truth = Pose2D(-1.7, 0.9, 0.35)
        bank = HypothesisBank((
            Hypothesis(truth, StartLabel.CENTER_FACING_OPPONENT, truth.theta),
            Hypothesis(mirror_pose(truth), StartLabel.GOAL_AREA_FACING_OPPONENT, mirror_pose(truth).theta),
        ))
        history = deque(maxlen=10)
        for step in range(30):
            obs = observe(world_at(truth, 9, step), 0, ZeroNoiseModelFactory(), self.field)
            obs = replace(obs, landmarks=tuple(obs.landmarks_of(LandmarkKind.LINE_SEGMENT)))
            history.append(obs)
            bank = correct(bank, obs, self.field)
            a, b = bank.hypotheses
            self.assertAlmostEqual(a.score, b.score, delta=1e-9)
            bank = select_best(bank, 0.1 * step, history, self.field)
            self.assertEqual(bank.mode, BankMode.CONVERGING)

    @tag('slow')
    def test_line_evidence_never_locks(self):
        rng = np.random.default_rng(17)
        noise = NoiseModelFactory()
        for trial in range(100):
            x, y = rng.uniform(-3.5, -0.5), rng.uniform(-2.5, 2.5)
            truth = Pose2D(float(x), float(y), float(rng.uniform(-math.pi, math.pi)))
            mirrored = mirror_pose(truth)
            bank = HypothesisBank((
                Hypothesis(truth, StartLabel.CENTER_FACING_OPPONENT, truth.theta),
                Hypothesis(mirrored, StartLabel.GOAL_AREA_FACING_OPPONENT, mirrored.theta),
            ))
            history = deque(maxlen=10)
            for step in range(20):
                obs = observe(world_at(truth, trial, step), 0, noise, self.field)
                obs = replace(obs, landmarks=tuple(obs.landmarks_of(LandmarkKind.LINE_SEGMENT)))
                history.append(obs)
                bank = correct(bank, obs, self.field)
                a, b = bank.hypotheses
                self.assertAlmostEqual(a.score, b.score, delta=1e-9, msg=f"trial {trial}")
                bank = select_best(bank, 0.1 * step, history, self.field)
                self.assertNotEqual(bank.mode, BankMode.LOCKED, f"trial {trial}")
            self.assertEqual(bank.mode, BankMode.CONVERGING)


class SelectBestTests(SimpleTestCase):

    def setUp(self):
        self.field = FieldSpecFactory()
        self.bank = init_bank(self.field, start_poses(self.field), 0.0, 10.0)

    def with_scores(self, *scores):
        hypotheses = tuple(replace(h, score=s) for h, s in zip(self.bank.hypotheses, scores))
        return replace(self.bank, hypotheses=hypotheses)

    def test_margin_and_center_circle_lock(self):
        pose = self.bank.hypotheses[0].pose
        circle = LandmarkSighting(LandmarkKind.CENTER_CIRCLE, (-pose.x, 0.0), 1.0)
        bank = select_best(self.with_scores(0.0, -10.0, -20.0, -30.0), 1.0,
                           [Observation(0.9, landmarks=(circle,))], self.field)
        self.assertEqual(bank.mode, BankMode.LOCKED)
        self.assertEqual(bank.best, 0)
        self.assertTrue(bank.confirmed)
        self.assertEqual(bank.alive, [0])

    def test_timeout_with_tie(self):
        bank = select_best(self.with_scores(-1.0, -1.0, -1.0, -1.0), 10.5, [], self.field)
        self.assertEqual(bank.mode, BankMode.LOCKED)
        self.assertEqual(bank.best, 0)
        self.assertFalse(bank.confirmed)

    def test_confirmation_residual_too_large(self):
        stray = LandmarkSighting(LandmarkKind.CENTER_CIRCLE, (2.5, 1.5), 1.0)
        bank = select_best(self.with_scores(0.0, -10.0, -20.0, -30.0), 1.0,
                           [Observation(0.9, landmarks=(stray,))], self.field)
        self.assertEqual(bank.mode, BankMode.CONVERGING)

    def test_margin_not_reached(self):
        pose = self.bank.hypotheses[0].pose
        circle = LandmarkSighting(LandmarkKind.CENTER_CIRCLE, (-pose.x, 0.0), 1.0)
        bank = select_best(self.with_scores(0.0, -4.0, -20.0, -30.0), 1.0,
                           [Observation(0.9, landmarks=(circle,))], self.field)
        self.assertEqual(bank.mode, BankMode.CONVERGING)

    def test_locked_bank_unchanged(self):
        locked = select_best(self.bank, 11.0, [], self.field)
        self.assertIs(select_best(locked, 12.0, [], self.field), locked)

    def test_zero_noise_lock_matches_start_pose(self):
        for label in StartLabel:
            bank = lock_trial(label, ZeroNoiseModelFactory())
            self.assertEqual(bank.mode, BankMode.LOCKED)
            self.assertTrue(bank.confirmed)
            self.assertEqual(bank.hypotheses[bank.best].start_label, label)

    @tag('slow')
    def test_lock_accuracy_under_noise(self):
        correct_locks, trials = 0, 0
        squared_errors = []
        for seed in range(30):
            for label in StartLabel:
                bank = lock_trial(label, NoiseModelFactory(), seed=seed, bias=0.002)
                trials += 1
                if bank.mode == BankMode.LOCKED:
                    pose, truth = bank.hypotheses[bank.best].pose, start_pose_for(FieldSpecFactory(), label).pose
                    squared_errors.append((pose.x - truth.x) ** 2 + (pose.y - truth.y) ** 2)
                if bank.mode == BankMode.LOCKED and bank.hypotheses[bank.best].start_label == label:
                    correct_locks += 1
        self.assertGreaterEqual(correct_locks / trials, 0.95)
        self.assertLessEqual(math.sqrt(sum(squared_errors) / len(squared_errors)), 0.3)


class PoseEstimateTests(SimpleTestCase):

    def setUp(self):
        self.field = FieldSpecFactory()
        self.bank = init_bank(self.field, start_poses(self.field), 0.0, 10.0)

    def test_locked(self):
        locked = select_best(self.bank, 11.0, [], self.field)
        estimate = pose_estimate(locked)
        self.assertEqual(estimate.pose, locked.hypotheses[locked.best].pose)
        self.assertFalse(estimate.low_confidence)

    def test_converging_leader(self):
        hypotheses = list(self.bank.hypotheses)
        hypotheses[2] = replace(hypotheses[2], score=3.0)
        estimate = pose_estimate(replace(self.bank, hypotheses=tuple(hypotheses)))
        self.assertEqual(estimate.pose, hypotheses[2].pose)
        self.assertTrue(estimate.low_confidence)
        self.assertEqual(estimate.label, StartLabel.SIDELINE_LEFT)

    def test_all_dead(self):
        dead = replace(self.bank, hypotheses=tuple(replace(h, alive=False) for h in self.bank.hypotheses))
        with self.assertRaises(SimulationStateError):
            pose_estimate(dead)

    def test_params_validated(self):
        with self.assertRaises(ConfigurationError):
            LocalizationParams.from_dict({'margin': -1})
