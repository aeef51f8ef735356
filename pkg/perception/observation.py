"""
Synthetic egocentric observations.

Every item in view is reported with probability ``1 - false_negative_prob``;
its range gets Gaussian noise with std ``range_noise_coeff * range`` and its
bearing Gaussian noise with std ``bearing_noise_std``. Noisy values are
clamped back into the camera cone and range so nothing is ever reported
outside of them.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from core.cache_utils import cached_function
from core.rng import substream
from field.geometry import field_to_ego, normalize_angle
from field.landmarks import POINT_KINDS, LandmarkKind, landmark_catalog
from kick_timing.measurements import BallMeasurement

from .lines import GridSpec, HoughParams, MergeTolerance, hough_segments, merge_segments, render_line_grid

logger = logging.getLogger(__name__)

_MIN_RANGE = 1e-6


@dataclass(frozen=True)
class LandmarkSighting:
    """A seen landmark; LineSegment sightings carry both egocentric endpoints."""
    kind: LandmarkKind
    position: tuple
    confidence: float
    endpoints: tuple = None


@dataclass(frozen=True)
class ObstacleCandidate:
    position: tuple
    apparent_size: float
    signature: object


@dataclass(frozen=True)
class Observation:
    stamp: float
    ball: BallMeasurement = None
    landmarks: tuple = ()
    obstacle_candidates: tuple = ()

    @property
    def is_empty(self):
        return self.ball is None and not self.landmarks and not self.obstacle_candidates

    def landmarks_of(self, *kinds):
        return [s for s in self.landmarks if s.kind in kinds]


class Sensor:
    """Visibility test and noise draws for one observation frame."""

    def __init__(self, noise, rng):
        self.noise = noise
        self.rng = rng

    def polar(self, p_ego):
        distance = math.hypot(p_ego[0], p_ego[1])
        bearing = normalize_angle(math.atan2(p_ego[1], p_ego[0]) - self.noise.camera_yaw)
        return distance, bearing

    def visible(self, p_ego):
        distance, bearing = self.polar(p_ego)
        return _MIN_RANGE < distance <= self.noise.max_range and abs(bearing) <= self.noise.half_fov

    def visible_mask(self, points):
        """visible() over an (N, 2) array of egocentric points."""
        distance = np.hypot(points[:, 0], points[:, 1])
        bearing = np.arctan2(points[:, 1], points[:, 0]) - self.noise.camera_yaw
        bearing = np.arctan2(np.sin(bearing), np.cos(bearing))
        in_range = (distance > _MIN_RANGE) & (distance <= self.noise.max_range)
        return in_range & (np.abs(bearing) <= self.noise.half_fov)

    def detected(self):
        return self.rng.random() >= self.noise.false_negative_prob

    def perturb(self, p_ego):
        distance, bearing = self.polar(p_ego)
        noise = self.noise
        distance += float(self.rng.normal(0.0, 1.0)) * noise.range_noise_coeff * distance
        bearing += float(self.rng.normal(0.0, 1.0)) * noise.bearing_noise_std
        distance = min(noise.max_range, max(_MIN_RANGE, distance))
        bearing = min(noise.half_fov, max(-noise.half_fov, bearing))
        heading = bearing + noise.camera_yaw
        return (distance * math.cos(heading), distance * math.sin(heading))

    def confidence(self, p_ego):
        return self.noise.ball_confidence(math.hypot(p_ego[0], p_ego[1]))


def _to_ego_array(pose, points):
    """field_to_ego over an (N, 2) array."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    dx, dy = points[:, 0] - pose.x, points[:, 1] - pose.y
    return np.column_stack([c * dx + s * dy, -s * dx + c * dy])


@cached_function(prefix='perception.line_samples')
def _line_samples(field, step):
    """
    Sample points along every painted line segment of ``field``.

    Returns:
        (lines, points, owner): the LineSegment landmarks in catalog order,
        an (N, 2) array of field-frame samples and the index into ``lines``
        each sample belongs to
    """
    lines = [lm for lm in landmark_catalog(field) if lm.kind == LandmarkKind.LINE_SEGMENT]
    points, owner = [], []
    for index, landmark in enumerate(lines):
        (ax, ay), (bx, by) = landmark.endpoints
        count = max(2, int(math.ceil(math.hypot(bx - ax, by - ay) / step)) + 1)
        ts = np.linspace(0.0, 1.0, count)
        points.append(np.column_stack([ax + ts * (bx - ax), ay + ts * (by - ay)]))
        owner.append(np.full(count, index))
    if not lines:
        return lines, np.zeros((0, 2)), np.zeros(0, dtype=int)
    return lines, np.concatenate(points), np.concatenate(owner)


def _visible_runs(flags, owner):
    """
    Longest contiguous visible stretch per line, as {line index: (first, last)}
    sample indices. Ties keep the earlier stretch.
    """
    same = owner[1:] == owner[:-1]
    joined_before = np.concatenate(([False], same & flags[:-1]))
    joined_after = np.concatenate((same & flags[1:], [False]))
    starts = np.flatnonzero(flags & ~joined_before)
    ends = np.flatnonzero(flags & ~joined_after)
    best = {}
    for start, end in zip(starts, ends):
        line = int(owner[start])
        if line not in best or end - start > best[line][1] - best[line][0]:
            best[line] = (int(start), int(end))
    return best


def _geometric_lines(sensor, pose, field):
    lines, samples, owner = _line_samples(field, sensor.noise.line_sample_step)
    if not lines:
        return []
    ego = _to_ego_array(pose, samples)
    runs = _visible_runs(sensor.visible_mask(ego), owner)
    sightings = []
    for index in range(len(lines)):
        if index not in runs:
            continue
        first, last = runs[index]
        a, b = tuple(float(v) for v in ego[first]), tuple(float(v) for v in ego[last])
        if math.hypot(b[0] - a[0], b[1] - a[1]) < sensor.noise.min_line_length:
            continue
        sighting = _line_sighting(sensor, a, b)
        if sighting is not None:
            sightings.append(sighting)
    return sightings


def _line_sighting(sensor, a, b):
    """Detection draw and endpoint noise for a seen line; None when missed."""
    if not sensor.detected():
        return None
    a, b = sensor.perturb(a), sensor.perturb(b)
    if a == b:
        return None
    mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    return LandmarkSighting(LandmarkKind.LINE_SEGMENT, mid, sensor.confidence(mid), (a, b))


def _raster_lines(sensor, world, pose, field):
    grid = render_line_grid(pose, field, GridSpec.for_noise(sensor.noise))
    min_cells = max(2, int(sensor.noise.min_line_length / grid.resolution))
    segments = hough_segments(grid, HoughParams(
        min_support=min_cells,
        rho_resolution=1.5,
        max_gap=4.0,
        seed=world.seed + world.step_index,
    ))
    segments = merge_segments(segments, MergeTolerance(gap_tol=4 * grid.resolution,
                                                       offset_tol=2 * grid.resolution))
    sightings = []
    for segment in segments:
        a, b = segment.endpoints
        if not (sensor.visible(a) and sensor.visible(b)):
            continue
        sighting = _line_sighting(sensor, a, b)
        if sighting is not None:
            sightings.append(sighting)
    return sightings


def observe(world, robot_id, noise, field, rng=None):
    """
    One egocentric perception frame of robot ``robot_id``.

    Args:
        world: WorldState (ground truth)
        robot_id: observing robot
        noise: NoiseModel
        field: FieldSpec
        rng: numpy Generator; defaults to the perception substream of this
            step and robot

    Returns:
        Observation stamped with the world time
    """
    robot = world.robot(robot_id)
    if rng is None:
        rng = substream(world.seed, 'perception', world.step_index, robot_id)
    sensor = Sensor(noise, rng)
    pose = robot.pose

    ball = None
    ball_ego = field_to_ego(pose, world.ball.position)
    if sensor.visible(ball_ego) and sensor.detected():
        measured = sensor.perturb(ball_ego)
        ball = BallMeasurement(p=sensor.confidence(measured), r=measured, t=world.time)

    catalog = landmark_catalog(field)
    landmarks = []
    for landmark in catalog:
        if landmark.kind not in POINT_KINDS:
            continue
        p_ego = field_to_ego(pose, landmark.position)
        if sensor.visible(p_ego) and sensor.detected():
            measured = sensor.perturb(p_ego)
            landmarks.append(LandmarkSighting(landmark.kind, measured, sensor.confidence(measured)))

    if noise.line_source == 'raster':
        landmarks += _raster_lines(sensor, world, pose, field)
    else:
        landmarks += _geometric_lines(sensor, pose, field)

    candidates = []
    others = [(r.pose.position, r.height, r.signature) for r in world.robots if r.id != robot_id]
    others += [(o.position, o.height, o.signature) for o in world.obstacles]
    for position, height, signature in others:
        p_ego = field_to_ego(pose, position)
        if not (sensor.visible(p_ego) and sensor.detected()):
            continue
        measured = sensor.perturb(p_ego)
        size = height / math.hypot(*p_ego)
        size *= max(0.0, 1.0 + float(rng.normal(0.0, 1.0)) * noise.obstacle_size_noise)
        candidates.append(ObstacleCandidate(measured, size, signature))

    return Observation(
        stamp=world.time,
        ball=ball,
        landmarks=tuple(landmarks),
        obstacle_candidates=tuple(candidates),
    )

