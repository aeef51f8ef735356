"""
Tests for field geometry, the landmark catalog and start poses.
"""

import math
import tempfile
from collections import Counter
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError
from core.factories import FieldSpecFactory, SmallFieldSpecFactory

from .geometry import Pose2D, ego_to_field, field_to_ego, mirror_pose, normalize_angle
from .landmarks import LandmarkKind, OwnerHalf, field_paint, landmark_catalog
from .spec import FieldSpec, StartLabel, load_field_spec, start_poses

SPECS = (FieldSpecFactory(), SmallFieldSpecFactory())


class Pose2DTests(SimpleTestCase):

    def test_theta_normalized(self):
        self.assertAlmostEqual(Pose2D(0, 0, 3 * math.pi).theta, math.pi)
        self.assertAlmostEqual(Pose2D(0, 0, -math.pi).theta, math.pi)
        self.assertAlmostEqual(Pose2D(0, 0, 2 * math.pi + 0.1).theta, 0.1)

    def test_normalize_range(self):
        for angle in np.linspace(-20, 20, 401):
            a = normalize_angle(float(angle))
            self.assertTrue(-math.pi < a <= math.pi)

    def test_ego_to_field_examples(self):
        self.assertEqual(ego_to_field(Pose2D(0, 0, 0), (1, 0)), (1.0, 0.0))
        x, y = ego_to_field(Pose2D(1, 2, math.pi / 2), (1, 0))
        self.assertAlmostEqual(x, 1.0)
        self.assertAlmostEqual(y, 3.0)
        x, y = ego_to_field(Pose2D(0, 0, math.pi), (1, 0))
        self.assertAlmostEqual(x, -1.0)
        self.assertAlmostEqual(y, 0.0)

    def test_frames_are_inverse(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            pose = Pose2D(*rng.uniform(-5, 5, 2), rng.uniform(-4, 4))
            p = tuple(rng.uniform(-5, 5, 2))
            back = field_to_ego(pose, ego_to_field(pose, p))
            self.assertLess(math.hypot(back[0] - p[0], back[1] - p[1]), 1e-12)

    def test_mirror_pose(self):
        m = mirror_pose(Pose2D(1, 2, 0))
        self.assertEqual((m.x, m.y), (-1.0, -2.0))
        self.assertAlmostEqual(m.theta, math.pi)
        self.assertAlmostEqual(mirror_pose(Pose2D(0, 0, math.pi / 2)).theta, -math.pi / 2)

    def test_mirror_is_involution(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            pose = Pose2D(*rng.uniform(-5, 5, 2), rng.uniform(-math.pi, math.pi))
            twice = mirror_pose(mirror_pose(pose))
            self.assertAlmostEqual(twice.x, pose.x)
            self.assertAlmostEqual(twice.y, pose.y)
            self.assertAlmostEqual(math.cos(twice.theta - pose.theta), 1.0)


class FieldSpecTests(SimpleTestCase):

    def test_defaults_are_valid(self):
        FieldSpec().clean()

    def test_length_must_exceed_width(self):
        with self.assertRaises(ConfigurationError) as ctx:
            FieldSpec.from_dict({'length': 5, 'width': 6})
        self.assertEqual(ctx.exception.key, 'field.length')

    def test_sub_dimension_must_fit(self):
        with self.assertRaises(ConfigurationError) as ctx:
            FieldSpec.from_dict({'goal_width': 7})
        self.assertEqual(ctx.exception.key, 'field.goal_width')

    def test_missing_required_length(self):
        with self.assertRaises(ConfigurationError) as ctx:
            FieldSpec.from_dict({'width': 6}, required=('length', 'width'))
        self.assertIn('field.length', str(ctx.exception))

    def test_load_key_value_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'kid.cfg'
            path.write_text('length=6\nwidth=4\ngoal_width=1.8\ngoal_area_width=2.2\n'
                            'center_circle_radius=0.5\npenalty_mark_distance=1.5\n')
            spec = load_field_spec(path)
        self.assertEqual(spec.length, 6.0)
        self.assertEqual(spec.goal_width, 1.8)


class LandmarkCatalogTests(SimpleTestCase):

    def test_goal_posts(self):
        posts = {lm.position for lm in landmark_catalog(FieldSpec()) if lm.kind == LandmarkKind.GOAL_POST}
        self.assertIn((4.5, 1.3), posts)
        self.assertIn((4.5, -1.3), posts)
        self.assertEqual(len(posts), 4)

    def test_penalty_marks_and_center(self):
        catalog = landmark_catalog(FieldSpec())
        marks = sorted(lm.position for lm in catalog if lm.kind == LandmarkKind.PENALTY_MARK)
        self.assertAlmostEqual(marks[0][0], -2.4)
        self.assertAlmostEqual(marks[1][0], 2.4)
        centers = [lm for lm in catalog if lm.kind == LandmarkKind.CENTER_CIRCLE]
        self.assertEqual([c.position for c in centers], [(0.0, 0.0)])

    def test_junction_counts(self):
        for spec in SPECS:
            counts = Counter(lm.kind for lm in landmark_catalog(spec))
            self.assertEqual(counts[LandmarkKind.JUNCTION_L], 8)
            self.assertEqual(counts[LandmarkKind.JUNCTION_T], 6)
            self.assertEqual(counts[LandmarkKind.JUNCTION_X], 2)
            self.assertEqual(counts[LandmarkKind.LINE_SEGMENT], 11)

    def test_center_circle_crossings_are_x_junctions(self):
        spec = FieldSpec()
        xs = sorted(lm.position for lm in landmark_catalog(spec) if lm.kind == LandmarkKind.JUNCTION_X)
        self.assertEqual(xs, [(0.0, -0.75), (0.0, 0.75)])

    def test_sorted_by_kind_then_position(self):
        catalog = landmark_catalog(FieldSpec())
        keys = [lm.sort_key for lm in catalog]
        self.assertEqual(keys, sorted(keys))

    def test_symmetry_closure(self):
        for spec in SPECS:
            catalog = landmark_catalog(spec)
            for lm in catalog:
                image = lm.mirrored()
                matches = [
                    other for other in catalog
                    if other.kind == lm.kind
                    and math.hypot(other.position[0] - image.position[0],
                                   other.position[1] - image.position[1]) < 1e-9
                ]
                self.assertEqual(len(matches), 1, lm)
                self.assertEqual(matches[0].owner_half, image.owner_half)

    def test_point_landmarks_inside_field(self):
        spec = FieldSpec()
        for lm in landmark_catalog(spec):
            if lm.kind == LandmarkKind.LINE_SEGMENT:
                continue
            self.assertLessEqual(abs(lm.position[0]), spec.half_length + 1e-12)
            self.assertLessEqual(abs(lm.position[1]), spec.half_width + 1e-12)

    def test_owner_half(self):
        for lm in landmark_catalog(FieldSpec()):
            if lm.position[0] > 0:
                self.assertEqual(lm.owner_half, OwnerHalf.OPPONENT)
            elif lm.position[0] < 0:
                self.assertEqual(lm.owner_half, OwnerHalf.OWN)

    def test_pure_function(self):
        self.assertEqual(landmark_catalog(FieldSpec()), landmark_catalog(FieldSpec()))

    def test_invalid_spec_rejected(self):
        with self.assertRaises(ConfigurationError):
            landmark_catalog(FieldSpec(length=5.0, width=6.0))

    def test_paint_has_center_circle(self):
        paint = field_paint(FieldSpec())
        self.assertEqual(paint.circles, (((0.0, 0.0), 0.75),))
        self.assertEqual(len(paint.segments), 11)


class StartPoseTests(SimpleTestCase):

    def test_four_distinct_poses(self):
        for spec in SPECS:
            poses = start_poses(spec)
            self.assertEqual(len(poses), 4)
            self.assertEqual(len({(p.pose.x, p.pose.y) for p in poses}), 4)
            self.assertEqual([p.label for p in poses], list(StartLabel))

    def test_orientations(self):
        poses = {p.label: p.pose for p in start_poses(FieldSpec())}
        self.assertEqual(poses[StartLabel.CENTER_FACING_OPPONENT].theta, 0.0)
        self.assertEqual(poses[StartLabel.GOAL_AREA_FACING_OPPONENT].theta, 0.0)
        self.assertAlmostEqual(poses[StartLabel.SIDELINE_LEFT].theta, -math.pi / 2)
        self.assertAlmostEqual(poses[StartLabel.SIDELINE_RIGHT].theta, math.pi / 2)
        for pose in poses.values():
            self.assertLess(pose.x, 0.0)

    def test_override(self):
        poses = start_poses(FieldSpec(), overrides={StartLabel.SIDELINE_LEFT: Pose2D(-1.0, 3.0, -math.pi / 2)})
        self.assertEqual(poses[2].pose.x, -1.0)

    def test_colliding_override_rejected(self):
        spec = FieldSpec()
        clash = start_poses(spec)[0].pose
        with self.assertRaises(ConfigurationError):
            start_poses(spec, overrides={StartLabel.SIDELINE_LEFT: clash})
