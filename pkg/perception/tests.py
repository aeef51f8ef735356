"""
Tests for synthetic observations, the raster line pipeline and obstacles.
"""

import math

import numpy as np
from django.test import SimpleTestCase, tag

from core.exceptions import ConfigurationError, DomainError, LookupFailure
from core.factories import FieldSpecFactory, NoiseModelFactory, ZeroNoiseModelFactory
from field.geometry import Pose2D, ego_to_field
from field.landmarks import FieldPaint, LandmarkKind
from simulation.state import BallState, ObstacleState, RobotState, WorldState

from .lines import (
    GridSpec, HoughParams, LineGrid, MergeTolerance, Segment, angle_difference,
    hough_segments, merge_segments, render_line_grid,
)
from .observation import Sensor, _visible_runs, observe
from .obstacles import (
    ObstacleCluster, ObstacleDetection, ObstacleParams, classify_signature,
    expected_obstacle_size, update_clusters,
)
from .signatures import ColorSignature, ObstacleLabel, TEAM_SIGNATURES, UNIFORM_SIGNATURE, signature_models


def make_world(pose=Pose2D(), ball=(2.0, 0.0), obstacles=(), seed=5):
    return WorldState(
        field=FieldSpecFactory(),
        robots=(RobotState(0, 'home', pose),),
        ball=BallState(ball),
        obstacles=tuple(obstacles),
        seed=seed,
    )


def plant(cells, a, b):
    """Rasterize the segment a-b (col, row) into ``cells``; returns the cell set."""
    n = int(max(abs(b[0] - a[0]), abs(b[1] - a[1]))) + 1
    planted = set()
    for t in np.linspace(0.0, 1.0, n):
        col = int(round(a[0] + t * (b[0] - a[0])))
        row = int(round(a[1] + t * (b[1] - a[1])))
        cells[row, col] = 1
        planted.add((col, row))
    return planted


def unit_grid(cells):
    return LineGrid(resolution=1.0, origin=(0.0, 0.0), cells=cells)


# =============================================================================
# OBSERVATIONS
# =============================================================================

class ObserveTests(SimpleTestCase):

    def test_zero_noise_ball_ahead(self):
        obs = observe(make_world(), 0, ZeroNoiseModelFactory(), FieldSpecFactory())
        self.assertEqual(obs.ball.r, (2.0, 0.0))
        self.assertAlmostEqual(obs.ball.p, 1.0 - 0.5 * 2.0 / 6.0)
        self.assertEqual(obs.ball.t, 0.0)

    def test_ball_behind_is_absent(self):
        obs = observe(make_world(ball=(-2.0, 0.0)), 0, ZeroNoiseModelFactory(fov=2.618), FieldSpecFactory())
        self.assertIsNone(obs.ball)

    def test_camera_yaw_turns_the_cone(self):
        noise = ZeroNoiseModelFactory(camera_yaw=math.pi / 2)
        obs = observe(make_world(ball=(0.0, 2.0)), 0, noise, FieldSpecFactory())
        self.assertAlmostEqual(obs.ball.r[0], 0.0)
        self.assertAlmostEqual(obs.ball.r[1], 2.0)
        self.assertIsNone(observe(make_world(), 0, noise, FieldSpecFactory()).ball)

    def test_radial_noise_scales_with_distance(self):
        noise = NoiseModelFactory(range_noise_coeff=0.05, bearing_noise_std=0.0)
        sensor = Sensor(noise, np.random.default_rng(2024))
        errors = [math.hypot(*sensor.perturb((4.0, 0.0))) - 4.0 for _ in range(10000)]
        self.assertAlmostEqual(float(np.std(errors)), 0.20, delta=0.02)

    def test_false_negatives(self):
        noise = ZeroNoiseModelFactory(false_negative_prob=1.0)
        obs = observe(make_world(), 0, noise, FieldSpecFactory())
        self.assertTrue(obs.is_empty)

    def test_fov_soundness(self):
        noise = NoiseModelFactory(bearing_noise_std=0.2, range_noise_coeff=0.2)
        rng = np.random.default_rng(8)
        for seed in range(40):
            pose = Pose2D(float(rng.uniform(-4, 4)), float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)))
            ball = (float(rng.uniform(-4.5, 4.5)), float(rng.uniform(-3, 3)))
            obs = observe(make_world(pose=pose, ball=ball, seed=seed), 0, noise, FieldSpecFactory())
            points = [s.position for s in obs.landmarks]
            points += [p for s in obs.landmarks if s.endpoints for p in s.endpoints]
            if obs.ball:
                points.append(obs.ball.r)
            for p in points:
                self.assertLessEqual(abs(math.atan2(p[1], p[0])), noise.fov / 2 + 1e-9)
                self.assertLessEqual(math.hypot(*p), noise.max_range + 1e-9)

    def test_deterministic_per_step(self):
        noise = NoiseModelFactory()
        world = make_world(pose=Pose2D(-1.0, 0.5, 0.3))
        self.assertEqual(observe(world, 0, noise, FieldSpecFactory()),
                         observe(world, 0, noise, FieldSpecFactory()))

    def test_unknown_robot(self):
        with self.assertRaises(LookupFailure):
            observe(make_world(), 3, NoiseModelFactory(), FieldSpecFactory())

    def test_goal_posts_seen_from_center(self):
        obs = observe(make_world(), 0, ZeroNoiseModelFactory(), FieldSpecFactory())
        posts = sorted(s.position for s in obs.landmarks_of(LandmarkKind.GOAL_POST))
        self.assertEqual(len(posts), 2)
        self.assertAlmostEqual(posts[0][0], 4.5)
        self.assertAlmostEqual(posts[0][1], -1.3)

    def test_line_sightings_lie_on_paint(self):
        pose = Pose2D(-1.0, 0.0, 0.0)
        obs = observe(make_world(pose=pose), 0, ZeroNoiseModelFactory(), FieldSpecFactory())
        lines = obs.landmarks_of(LandmarkKind.LINE_SEGMENT)
        self.assertTrue(lines)
        halfway = [s for s in lines if all(abs(ego_to_field(pose, p)[0]) < 1e-9 for p in s.endpoints)]
        self.assertEqual(len(halfway), 1)

    def test_raster_line_source(self):
        noise = ZeroNoiseModelFactory(line_source='raster', max_range=3.0, grid_resolution=0.1)
        obs = observe(make_world(pose=Pose2D(-0.5, 0.0, 0.0)), 0, noise, FieldSpecFactory())
        angles = []
        for sighting in obs.landmarks_of(LandmarkKind.LINE_SEGMENT):
            (ax, ay), (bx, by) = sighting.endpoints
            angles.append(math.atan2(by - ay, bx - ax) % math.pi)
        self.assertTrue(any(angle_difference(a, math.pi / 2) < math.radians(3) for a in angles))

    def test_raster_lines_can_be_missed(self):
        noise = ZeroNoiseModelFactory(line_source='raster', max_range=3.0, grid_resolution=0.1,
                                      false_negative_prob=1.0)
        obs = observe(make_world(pose=Pose2D(-0.5, 0.0, 0.0)), 0, noise, FieldSpecFactory())
        self.assertEqual(obs.landmarks_of(LandmarkKind.LINE_SEGMENT), [])

    def test_raster_lines_carry_measurement_noise(self):
        world = make_world(pose=Pose2D(-0.5, 0.0, 0.0))
        clean = ZeroNoiseModelFactory(line_source='raster', max_range=3.0, grid_resolution=0.1)
        noisy = ZeroNoiseModelFactory(line_source='raster', max_range=3.0, grid_resolution=0.1,
                                      range_noise_coeff=0.1, bearing_noise_std=0.05)
        a = [s.endpoints for s in observe(world, 0, clean, FieldSpecFactory()).landmarks_of(LandmarkKind.LINE_SEGMENT)]
        b = [s.endpoints for s in observe(world, 0, noisy, FieldSpecFactory()).landmarks_of(LandmarkKind.LINE_SEGMENT)]
        self.assertTrue(a)
        self.assertEqual(len(a), len(b))
        self.assertNotEqual(a, b)

    def test_visible_mask_agrees_with_visible(self):
        sensor = Sensor(NoiseModelFactory(camera_yaw=0.3), np.random.default_rng(0))
        points = np.random.default_rng(4).uniform(-7, 7, (500, 2))
        mask = sensor.visible_mask(points)
        self.assertEqual(mask.tolist(), [sensor.visible(tuple(p)) for p in points])

    def test_visible_runs_stop_at_line_ends(self):
        flags = np.array([True, True, False, True, True, True])
        owner = np.array([0, 0, 0, 0, 1, 1])
        self.assertEqual(_visible_runs(flags, owner), {0: (0, 1), 1: (4, 5)})

    def test_obstacle_candidate_size(self):
        obstacle = ObstacleState(100, (2.0, 0.0), radius=0.2, height=1.5)
        obs = observe(make_world(ball=(-2.0, 0.0), obstacles=[obstacle]), 0,
                      ZeroNoiseModelFactory(), FieldSpecFactory())
        self.assertEqual(len(obs.obstacle_candidates), 1)
        self.assertAlmostEqual(obs.obstacle_candidates[0].apparent_size, 0.75)


# =============================================================================
# LINE GRID
# =============================================================================

class RenderLineGridTests(SimpleTestCase):

    def test_halfway_line_ahead(self):
        grid = render_line_grid(Pose2D(0.0, 0.0, math.pi / 2), FieldSpecFactory(), GridSpec())
        for x in (1.0, 1.5, 2.0, 2.5):
            col = int(round((x - grid.origin[0]) / grid.resolution))
            row = int(round((0.0 - grid.origin[1]) / grid.resolution))
            self.assertEqual(grid.cells[row, col], 1)

    def test_empty_paint(self):
        grid = render_line_grid(Pose2D(), FieldPaint(segments=(), circles=()), GridSpec())
        self.assertEqual(int(grid.cells.sum()), 0)

    def test_deterministic(self):
        a = render_line_grid(Pose2D(-1, 1, 0.4), FieldSpecFactory(), GridSpec())
        b = render_line_grid(Pose2D(-1, 1, 0.4), FieldSpecFactory(), GridSpec())
        self.assertTrue(a.same_as(b))

    def test_cells_outside_cone_are_clear(self):
        grid = render_line_grid(Pose2D(-2.0, 0.0, 0.0), FieldSpecFactory(), GridSpec())
        rows, cols = np.nonzero(grid.cells)
        x = grid.origin[0] + cols * grid.resolution
        y = grid.origin[1] + rows * grid.resolution
        self.assertTrue(np.all(np.abs(np.arctan2(y, x)) <= 2.618 / 2 + 1e-9))


# =============================================================================
# HOUGH
# =============================================================================

class HoughTests(SimpleTestCase):

    def test_single_run(self):
        cells = np.zeros((40, 40), dtype=np.uint8)
        plant(cells, (5, 10), (24, 10))
        segments = hough_segments(unit_grid(cells), HoughParams(min_support=5))
        self.assertEqual(len(segments), 1)
        ends = sorted(segments[0].endpoints)
        self.assertLessEqual(math.dist(ends[0], (5, 10)), 1.0)
        self.assertLessEqual(math.dist(ends[1], (24, 10)), 1.0)
        self.assertEqual(segments[0].support, 20)

    def test_empty_grid(self):
        self.assertEqual(hough_segments(unit_grid(np.zeros((40, 40), dtype=np.uint8))), [])

    def test_perpendicular_runs(self):
        cells = np.zeros((40, 40), dtype=np.uint8)
        plant(cells, (5, 20), (24, 20))
        plant(cells, (30, 5), (30, 24))
        segments = hough_segments(unit_grid(cells), HoughParams(min_support=5))
        self.assertEqual(len(segments), 2)
        diff = angle_difference(segments[0].angle, segments[1].angle)
        self.assertAlmostEqual(math.degrees(diff), 90.0, delta=2.0)

    def test_gap_splits_run(self):
        cells = np.zeros((40, 40), dtype=np.uint8)
        plant(cells, (2, 8), (12, 8))
        plant(cells, (20, 8), (32, 8))
        segments = hough_segments(unit_grid(cells), HoughParams(min_support=5, max_gap=3))
        self.assertEqual(len(segments), 2)

    def test_inliers_near_carrier(self):
        cells = np.zeros((40, 40), dtype=np.uint8)
        planted = plant(cells, (3, 4), (33, 21))
        params = HoughParams(min_support=5)
        segment = hough_segments(unit_grid(cells), params)[0]
        near = [p for p in planted if segment.offset_of(p) <= params.rho_resolution]
        self.assertEqual(len(near), segment.support)

    def test_degenerate_params(self):
        with self.assertRaises(ConfigurationError):
            hough_segments(unit_grid(np.ones((4, 4), dtype=np.uint8)), HoughParams(min_support=1))

    @tag('slow')
    def test_planted_lines_recovered(self):
        rng = np.random.default_rng(77)
        successes = 0
        for trial in range(200):
            cells = np.zeros((40, 40), dtype=np.uint8)
            planted = []
            wanted = int(rng.integers(1, 4))
            while len(planted) < wanted:
                angle = float(rng.uniform(0, math.pi))
                if any(angle_difference(angle, other) < math.radians(20) for other, _ in planted):
                    continue
                length = float(rng.uniform(20, 35))
                a = rng.uniform(2, 37, 2)
                b = a + length * np.array([math.cos(angle), math.sin(angle)])
                if not np.all((b >= 1) & (b <= 38)):
                    continue
                angle = math.atan2(round(b[1]) - round(a[1]), round(b[0]) - round(a[0])) % math.pi
                planted.append((angle, plant(cells, tuple(a), tuple(b))))

            segments = hough_segments(unit_grid(cells), HoughParams(min_support=5, seed=trial))
            self.assertEqual(merge_segments(merge_segments(segments)), merge_segments(segments))
            recovered = 0
            for angle, cells_set in planted:
                matching = [s for s in segments if angle_difference(s.angle, angle) <= math.radians(2)]
                support = sum(s.support for s in matching)
                if support >= 0.9 * len(cells_set):
                    recovered += 1
            if recovered == len(planted):
                successes += 1
        self.assertGreaterEqual(successes, 180)

    @tag('slow')
    def test_matches_exhaustive_pair_fit(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            cells = np.zeros((40, 40), dtype=np.uint8)
            a = rng.uniform(3, 12, 2)
            angle = float(rng.uniform(0, math.pi / 2))
            plant(cells, tuple(a), tuple(a + 25 * np.array([math.cos(angle), math.sin(angle)])))
            points = unit_grid(cells).occupied()
            best, best_angle = (-1, 0.0), None
            for i in range(len(points)):
                for j in range(i + 1, len(points)):
                    d = points[j] - points[i]
                    n = np.array([-d[1], d[0]]) / np.hypot(*d)
                    score = (int(np.sum(np.abs((points - points[i]) @ n) <= 1.0)), float(np.hypot(*d)))
                    if score > best:
                        best, best_angle = score, math.atan2(d[1], d[0]) % math.pi
            segment = max(hough_segments(unit_grid(cells)), key=lambda s: s.support)
            self.assertLessEqual(math.degrees(angle_difference(segment.angle, best_angle)), 3.0)
            self.assertGreaterEqual(segment.support, 0.9 * best[0])


# =============================================================================
# MERGE
# =============================================================================

class MergeSegmentsTests(SimpleTestCase):

    def test_collinear_gap_merges(self):
        a = Segment(((0.0, 0.0), (1.0, 0.0)), 20)
        b = Segment(((1.05, 0.0), (2.0, 0.0)), 19)
        merged = merge_segments([a, b], MergeTolerance(gap_tol=0.15))
        self.assertEqual(len(merged), 1)
        ends = sorted(merged[0].endpoints)
        self.assertAlmostEqual(ends[0][0], 0.0)
        self.assertAlmostEqual(ends[1][0], 2.0)
        self.assertEqual(merged[0].support, 39)

    def test_perpendicular_unchanged(self):
        a = Segment(((0.0, 0.0), (1.0, 0.0)), 20)
        b = Segment(((1.05, 0.0), (1.05, 1.0)), 20)
        self.assertEqual(merge_segments([a, b]), [a, b])

    def test_far_apart_collinear_unchanged(self):
        a = Segment(((0.0, 0.0), (1.0, 0.0)), 20)
        b = Segment(((2.0, 0.0), (3.0, 0.0)), 20)
        self.assertEqual(len(merge_segments([a, b])), 2)

    def test_idempotent_and_endpoints_covered(self):
        rng = np.random.default_rng(12)
        tol = MergeTolerance()
        for _ in range(50):
            segments = []
            for _ in range(6):
                x0 = float(rng.uniform(0, 3))
                y = float(rng.choice([0.0, 1.0])) + float(rng.normal(0, 0.02))
                segments.append(Segment(((x0, y), (x0 + float(rng.uniform(0.2, 1.0)), y)), 10))
            once = merge_segments(segments, tol)
            self.assertLessEqual(len(once), len(segments))
            self.assertEqual(merge_segments(once, tol), once)
            for segment in segments:
                for p in segment.endpoints:
                    self.assertTrue(any(out.offset_of(p) <= tol.offset_tol + 1e-12 for out in once))


# =============================================================================
# OBSTACLES
# =============================================================================

class ObstacleTests(SimpleTestCase):

    def test_expected_size_halves_with_distance(self):
        near = expected_obstacle_size(2.0, (1.3, 1.3))
        far = expected_obstacle_size(4.0, (1.3, 1.3))
        self.assertAlmostEqual(near.min_apparent, 0.65)
        self.assertAlmostEqual(far.min_apparent, 0.325)

    def test_expected_size_monotone(self):
        sizes = [expected_obstacle_size(d, (0.8, 2.0)).max_apparent for d in (1, 2, 5, 10, 100)]
        self.assertEqual(sizes, sorted(sizes, reverse=True))

    def test_expected_size_domain(self):
        with self.assertRaises(DomainError):
            expected_obstacle_size(0.0, (0.8, 2.0))

    def test_classify_exact_model(self):
        models = signature_models('home')
        self.assertEqual(classify_signature(TEAM_SIGNATURES['away'], models, 0.2), ObstacleLabel.RIVAL)

    def test_classify_unknown_past_threshold(self):
        self.assertEqual(classify_signature(UNIFORM_SIGNATURE, signature_models('home'), 0.2),
                         ObstacleLabel.UNKNOWN)

    def test_classify_argmin(self):
        base = ColorSignature.from_weights([1, 0, 0, 0, 0, 0, 0, 0])
        teammate = ColorSignature.from_weights([0.95, 0.05, 0, 0, 0, 0, 0, 0])
        rival = ColorSignature.from_weights([0.85, 0.15, 0, 0, 0, 0, 0, 0])
        models = {ObstacleLabel.TEAMMATE: teammate, ObstacleLabel.RIVAL: rival}
        self.assertAlmostEqual(base.l1(teammate), 0.1)
        self.assertAlmostEqual(base.l1(rival), 0.3)
        self.assertEqual(classify_signature(base, models, 0.5), ObstacleLabel.TEAMMATE)

    def test_classify_tie_breaks_in_label_order(self):
        sig = TEAM_SIGNATURES['home']
        models = {ObstacleLabel.REFEREE: sig, ObstacleLabel.RIVAL: sig}
        self.assertEqual(classify_signature(sig, models, 0.1), ObstacleLabel.RIVAL)

    def test_classify_needs_models(self):
        with self.assertRaises(ConfigurationError):
            classify_signature(UNIFORM_SIGNATURE, {}, 0.2)

    def test_matched_cluster_gains(self):
        params = ObstacleParams(gain_up=0.4, gain_down=0.2)
        cluster = ObstacleCluster((2.0, 0.0), ObstacleLabel.RIVAL, 0.5, 0.0)
        result = update_clusters([cluster], [ObstacleDetection((2.0, 0.1), ObstacleLabel.RIVAL)],
                                 Pose2D(), params, now=0.1)
        self.assertEqual(len(result), 1)
        self.assertAlmostEqual(result[0].certainty, 0.7)
        self.assertAlmostEqual(result[0].position[1], 0.05)

    def test_unmatched_cluster_decays(self):
        params = ObstacleParams(gain_up=0.4, gain_down=0.2)
        cluster = ObstacleCluster((2.0, 0.0), ObstacleLabel.RIVAL, 0.5, 0.0)
        self.assertAlmostEqual(update_clusters([cluster], [], Pose2D(), params)[0].certainty, 0.4)

    def test_prediction_uses_ego_motion(self):
        params = ObstacleParams(match_radius=0.1)
        cluster = ObstacleCluster((2.0, 0.0), ObstacleLabel.REFEREE, 0.5, 0.0)
        result = update_clusters([cluster], [ObstacleDetection((1.0, 0.0), ObstacleLabel.REFEREE)],
                                 Pose2D(1.0, 0.0, 0.0), params)
        self.assertEqual(len(result), 1)
        self.assertEqual(result[0].position, (1.0, 0.0))

    def test_new_detection_spawns_cluster(self):
        params = ObstacleParams()
        result = update_clusters([], [ObstacleDetection((1.0, 1.0), ObstacleLabel.UNKNOWN)], Pose2D(), params)
        self.assertEqual(result[0].certainty, params.gain_up)

    def test_certainty_converges_monotonically(self):
        params = ObstacleParams()
        clusters = [ObstacleCluster((2.0, 0.0), ObstacleLabel.RIVAL, 0.3, 0.0)]
        previous = 0.3
        for _ in range(30):
            clusters = update_clusters(clusters, [ObstacleDetection((2.0, 0.0), ObstacleLabel.RIVAL)],
                                       Pose2D(), params)
            self.assertGreaterEqual(clusters[0].certainty, previous)
            self.assertLessEqual(clusters[0].certainty, 1.0)
            previous = clusters[0].certainty
        for _ in range(100):
            clusters = update_clusters(clusters, [], Pose2D(), params)
            if not clusters:
                break
            self.assertLess(clusters[0].certainty, previous)
            previous = clusters[0].certainty
        self.assertEqual(clusters, [])

    def test_gains_validated(self):
        with self.assertRaises(ConfigurationError):
            update_clusters([], [], Pose2D(), ObstacleParams(gain_up=1.0))
