"""
Tests for the moving-ball estimator and kick controller.
"""

from collections import deque
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError, DomainError, SimulationStateError, StalledBallError
from perception.observation import Observation
from simulation.state import TriggerKind

from .controller import KickPhase, KickTimingController, kick_controller_step
from .estimator import (
    BallTrack, KickTimingParams, admit_pair, estimate_velocity, smooth_velocity, time_of_arrival,
)
from .measurements import BallMeasurement


def m(p, r, t):
    return BallMeasurement(p=p, r=r, t=t)


def uniform_run(speed, start_distance, believed_latency, period=0.02, true_latency=0.3):
    """
    Feed a zero-noise ball rolling straight at r_kick and return
    (trigger time, closed-form trigger time, distance to r_kick at contact).
    """
    params = KickTimingParams(kick_latency=believed_latency, r_kick=(0.25, -0.1))
    controller = KickTimingController(params)
    start = np.array([0.25, -0.1 - start_distance])
    velocity = np.array([0.0, speed])
    for step in range(int(10.0 / period)):
        now = step * period
        position = start + velocity * now
        controller.step(Observation(now, ball=m(0.9, tuple(position), now)), now)
        if controller.trigger_time is not None:
            break
    contact = start + velocity * (controller.trigger_time + true_latency)
    ideal = start_distance / speed - believed_latency
    return controller.trigger_time, ideal, math.dist(contact, params.r_kick)


class AdmitPairTests(SimpleTestCase):

    def test_confident_pair(self):
        s1, s2 = m(0.9, (0, 0), 0.0), m(0.9, (0.1, 0), 0.2)
        self.assertEqual(admit_pair([s1, s2], KickTimingParams(p_min=0.5, delta_t=0.1)), (s1, s2))

    def test_low_confidence_rejected_under_and(self):
        s1, s2 = m(0.9, (0, 0), 0.0), m(0.3, (0.1, 0), 0.2)
        self.assertIsNone(admit_pair([s1, s2], KickTimingParams(admission_rule='and')))

    def test_low_confidence_admitted_on_time_under_or(self):
        s1, s2 = m(0.9, (0, 0), 0.0), m(0.3, (0.1, 0), 0.2)
        self.assertEqual(admit_pair([s1, s2], KickTimingParams(admission_rule='or')), (s1, s2))

    def test_or_rejects_close_low_confidence_pair(self):
        s1, s2 = m(0.9, (0, 0), 0.0), m(0.3, (0.1, 0), 0.05)
        self.assertIsNone(admit_pair([s1, s2], KickTimingParams(admission_rule='or')))

    def test_single_measurement(self):
        self.assertIsNone(admit_pair([m(0.9, (0, 0), 0.0)]))

    def test_and_skips_to_older_partner(self):
        stack = [m(0.9, (0, 0), 0.0), m(0.9, (0.02, 0), 0.02), m(0.9, (0.2, 0), 0.2), m(0.9, (0.22, 0), 0.22)]
        self.assertEqual(admit_pair(stack), (stack[1], stack[3]))


class EstimateVelocityTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(estimate_velocity(m(1, (0, 0), 0.0), m(1, (0.5, 0), 0.5)), 1.0)
        self.assertEqual(estimate_velocity(m(1, (1, 1), 0.0), m(1, (1, 1), 0.3)), 0.0)
        self.assertAlmostEqual(estimate_velocity(m(1, (0, 0), 0.0), m(1, (0.3, 0.4), 1.0)), 0.5)

    def test_ordering(self):
        with self.assertRaises(DomainError):
            estimate_velocity(m(1, (0, 0), 1.0), m(1, (1, 0), 1.0))

    def test_homogeneity(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            r1, r2 = rng.normal(size=2), rng.normal(size=2)
            t1 = float(rng.uniform(0, 5))
            t2 = t1 + float(rng.uniform(0.01, 1))
            k, shift = float(rng.uniform(0.1, 10)), float(rng.uniform(-3, 3))
            v = estimate_velocity(m(1, r1, t1), m(1, r2, t2))
            self.assertAlmostEqual(estimate_velocity(m(1, k * r1, t1), m(1, k * r2, t2)), k * v, places=9)
            self.assertAlmostEqual(estimate_velocity(m(1, r1, t1 + shift + 10), m(1, r2, t2 + shift + 10)), v,
                                   places=6)


class SmoothVelocityTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(smooth_velocity([1.0, 1.0, 1.0]), 1.0)
        self.assertAlmostEqual(smooth_velocity([0.8, 1.0, 1.2]), 1.0)
        self.assertEqual(smooth_velocity(deque([0.6], maxlen=3)), 0.6)

    def test_empty(self):
        with self.assertRaises(SimulationStateError):
            smooth_velocity([])

    def test_bounded(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            values = list(rng.uniform(0, 3, int(rng.integers(1, 4))))
            v = smooth_velocity(values)
            self.assertLessEqual(min(values) - 1e-12, v)
            self.assertLessEqual(v, max(values) + 1e-12)

    def test_deque_evicts_oldest(self):
        track = BallTrack(KickTimingParams(window=3, delta_t=0.01))
        for i in range(6):
            track.push(m(0.9, (0.1 * i * i, 0.0), 0.1 * i))
            track.update()
        self.assertEqual(len(track.V), 3)
        self.assertAlmostEqual(track.V[-1], 9.0)
        self.assertAlmostEqual(track.V[0], 5.0)


class TimeOfArrivalTests(SimpleTestCase):

    def test_examples(self):
        self.assertAlmostEqual(time_of_arrival((0.6, 0.0), (0.0, 0.0), 1.2), 0.5)
        self.assertEqual(time_of_arrival((0.3, 0.2), (0.3, 0.2), 1.0), 0.0)

    def test_stalled(self):
        with self.assertRaises(StalledBallError):
            time_of_arrival((0.6, 0.0), (0.0, 0.0), 0.0)
        with self.assertRaises(StalledBallError):
            time_of_arrival((0.6, 0.0), (0.0, 0.0), 0.02, v_eps=0.02)

    def test_positive(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            r2 = tuple(rng.normal(size=2))
            self.assertGreater(time_of_arrival((0.25, -0.1), r2, float(rng.uniform(0.03, 2))), 0.0)


class BallTrackTests(SimpleTestCase):

    def test_rejects_stale_measurement(self):
        track = BallTrack()
        track.push(m(0.9, (0, 0), 1.0))
        with self.assertRaises(DomainError):
            track.push(m(0.9, (0, 0), 1.0))

    def test_params_validated(self):
        with self.assertRaises(ConfigurationError):
            KickTimingParams.from_dict({'admission_rule': 'xor'})
        with self.assertRaises(ConfigurationError):
            BallTrack(KickTimingParams(window=0))


class KickControllerTests(SimpleTestCase):

    def test_phase_progression(self):
        track = BallTrack()
        phase, trigger, _ = kick_controller_step(track, KickPhase.STANDING, None, 0.0)
        self.assertEqual((phase, trigger), (KickPhase.PRE_KICK, TriggerKind.PRE_KICK))
        phase, trigger, _ = kick_controller_step(track, phase, None, 0.02)
        self.assertEqual((phase, trigger), (KickPhase.WAITING, None))
        self.assertEqual(kick_controller_step(track, KickPhase.KICKING, None, 1.0)[0], KickPhase.DONE)
        self.assertEqual(kick_controller_step(track, KickPhase.DONE, None, 1.1)[0], KickPhase.DONE)

    def test_trigger_at_latency_boundary(self):
        track = BallTrack(KickTimingParams(r_kick=(0.0, 0.0)))
        track.push(m(0.9, (-1.5, 0.0), 0.0))
        obs = Observation(0.5, ball=m(0.9, (-0.75, 0.0), 0.5))
        phase, trigger, estimate = kick_controller_step(track, KickPhase.WAITING, obs, 0.5, kick_latency=0.5)
        self.assertEqual(estimate.t_arrive, 0.5)
        self.assertEqual(phase, KickPhase.KICKING)
        self.assertEqual(trigger, TriggerKind.KICK_RIGHT)

    def test_receding_ball_waits(self):
        track = BallTrack(KickTimingParams(r_kick=(0.0, 0.0)))
        track.push(m(0.9, (-0.2, 0.0), 0.0))
        obs = Observation(0.5, ball=m(0.9, (-0.3, 0.0), 0.5))
        phase, trigger, estimate = kick_controller_step(track, KickPhase.WAITING, obs, 0.5, kick_latency=5.0)
        self.assertEqual(phase, KickPhase.WAITING)
        self.assertIsNone(trigger)
        self.assertFalse(estimate.approaching)

    def test_stationary_ball_waits(self):
        track = BallTrack(KickTimingParams(r_kick=(0.0, 0.0)))
        track.push(m(0.9, (-0.3, 0.0), 0.0))
        obs = Observation(0.5, ball=m(0.9, (-0.3, 0.0), 0.5))
        phase, trigger, _ = kick_controller_step(track, KickPhase.WAITING, obs, 0.5, kick_latency=5.0)
        self.assertEqual((phase, trigger), (KickPhase.WAITING, None))

    def test_uniform_ball_trigger_error_within_one_period(self):
        for speed in (0.4, 0.6, 0.8, 1.0):
            trigger, ideal, miss = uniform_run(speed, 1.0, 0.3)
            self.assertLessEqual(abs(trigger - ideal), 0.02 + 1e-9, speed)
            self.assertLessEqual(miss, 0.2, speed)

    def test_latency_error_tolerated(self):
        for speed in (0.5, 1.0):
            for t_err in (-0.15, -0.05, 0.05, 0.15):
                _, _, miss = uniform_run(speed, 1.0, 0.3 + t_err, true_latency=0.3)
                self.assertLessEqual(miss, 0.2, (speed, t_err))

    def test_estimates_recorded(self):
        controller = KickTimingController(KickTimingParams(r_kick=(0.0, 0.0)))
        for step in range(20):
            now = 0.05 * step
            controller.step(Observation(now, ball=m(0.9, (-2.0 + 0.5 * now, 0.0), now)), now)
        self.assertTrue(controller.estimates)
        self.assertTrue(all(e.approaching for e in controller.estimates))
        self.assertAlmostEqual(controller.estimates[-1].v_smooth, 0.5)
