"""
Landmark association and per-frame likelihood of a pose hypothesis.

Every sighting is moved into the field frame through the hypothesis pose
and associated with the nearest catalog landmark of the same kind. Point
landmarks score their Euclidean residual; line sightings score the
distance of their midpoint to the catalog segment plus their angle
residual. Each sighting contributes a Gaussian log-likelihood floored at
``log_likelihood_floor``; sightings without a partner inside the gate
contribute the floor.
"""

from dataclasses import dataclass
import math

import numpy as np

from core.cache_utils import cached_function
from core.config import build_section
from core.exceptions import ConfigurationError
from field.geometry import ego_to_field
from field.landmarks import POINT_KINDS, LandmarkKind, landmark_catalog


@dataclass(frozen=True)
class LocalizationParams:
    sigma_base: float = 0.1
    sigma_per_meter: float = 0.05
    angle_sigma: float = 0.1
    log_likelihood_floor: float = -8.0
    association_gate: float = 1.5
    correction_gain: float = 0.3
    margin: float = 5.0
    confirm_distance: float = 0.5
    confirm_angle: float = 0.2
    timeout: float = 10.0
    history_frames: int = 10

    def clean(self):
        for name in ('sigma_base', 'angle_sigma', 'association_gate', 'confirm_distance',
                     'confirm_angle', 'timeout'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')
        if self.sigma_per_meter < 0:
            raise ConfigurationError('sigma_per_meter', 'must be >= 0')
        if not self.log_likelihood_floor < 0:
            raise ConfigurationError('log_likelihood_floor', 'must be < 0')
        if not 0.0 <= self.correction_gain <= 1.0:
            raise ConfigurationError('correction_gain', 'must be within [0, 1]')
        if self.margin < 0:
            raise ConfigurationError('margin', 'must be >= 0')
        if self.history_frames < 1:
            raise ConfigurationError('history_frames', 'must be >= 1')

    @classmethod
    def from_dict(cls, data, prefix='localization'):
        return build_section(cls, data, prefix=prefix)

    def sigma(self, distance):
        return self.sigma_base + self.sigma_per_meter * distance


@dataclass(frozen=True)
class LandmarkIndex:
    """Catalog landmarks as arrays, grouped by kind, in catalog order."""
    points: dict
    seg_a: np.ndarray
    seg_b: np.ndarray
    seg_angle: np.ndarray


@cached_function(prefix='localization.landmark_index')
def _cached_index(field):
    catalog = landmark_catalog(field)
    points = {}
    for kind in POINT_KINDS:
        rows = [lm.position for lm in catalog if lm.kind == kind]
        points[kind] = np.array(rows, dtype=float).reshape(-1, 2)
    segments = [lm.endpoints for lm in catalog if lm.kind == LandmarkKind.LINE_SEGMENT]
    seg_a = np.array([s[0] for s in segments], dtype=float).reshape(-1, 2)
    seg_b = np.array([s[1] for s in segments], dtype=float).reshape(-1, 2)
    delta = seg_b - seg_a
    seg_angle = np.arctan2(delta[:, 1], delta[:, 0]) % math.pi
    return LandmarkIndex(points, seg_a, seg_b, seg_angle)


def landmark_index(field):
    field.clean()
    return _cached_index(field)


@dataclass(frozen=True)
class Association:
    """One sighting matched to a catalog landmark; ``target`` is None past the gate."""
    kind: LandmarkKind
    target: int
    residual: float
    log_likelihood: float
    shift: tuple


@dataclass(frozen=True)
class FrameFit:
    log_likelihood: float
    shift: tuple
    associations: tuple

    @property
    def count(self):
        return len(self.associations)

    @property
    def mean_log_likelihood(self):
        return self.log_likelihood / self.count if self.associations else 0.0


def _angle_residual(a, b):
    d = np.abs(a - b) % math.pi
    return np.minimum(d, math.pi - d)


def _associate_point(sighting, pose, index, params):
    q = np.asarray(ego_to_field(pose, sighting.position))
    candidates = index.points.get(sighting.kind)
    sigma = params.sigma(math.hypot(*sighting.position))
    if candidates is None or not len(candidates):
        return Association(sighting.kind, None, math.inf, params.log_likelihood_floor, (0.0, 0.0))
    distances = np.hypot(*(candidates - q).T)
    best = int(np.argmin(distances))
    residual = float(distances[best])
    if residual > params.association_gate:
        return Association(sighting.kind, None, residual, params.log_likelihood_floor, (0.0, 0.0))
    log_likelihood = max(params.log_likelihood_floor, -0.5 * (residual / sigma) ** 2)
    shift = tuple(float(v) for v in candidates[best] - q)
    return Association(sighting.kind, best, residual, log_likelihood, shift)


def _unmatched(kind, residual, params):
    return Association(kind, None, residual, params.log_likelihood_floor, (0.0, 0.0))


def _associate_lines(sightings, pose, index, params):
    """Associate every line sighting of a frame at once; one Association per sighting."""
    if not len(index.seg_a):
        return [_unmatched(sighting.kind, math.inf, params) for sighting in sightings]
    ends = np.array([s.endpoints for s in sightings], dtype=float)
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    fx = pose.x + c * ends[..., 0] - s * ends[..., 1]
    fy = pose.y + s * ends[..., 0] + c * ends[..., 1]
    mid = np.column_stack([(fx[:, 0] + fx[:, 1]) / 2.0, (fy[:, 0] + fy[:, 1]) / 2.0])
    angle = np.arctan2(fy[:, 1] - fy[:, 0], fx[:, 1] - fx[:, 0]) % math.pi
    sigma = params.sigma(np.array([math.hypot(*sighting.position) for sighting in sightings]))

    delta = index.seg_b - index.seg_a
    length_sq = np.einsum('ij,ij->i', delta, delta)
    rel = mid[:, None, :] - index.seg_a[None, :, :]
    t = np.clip(np.einsum('slk,lk->sl', rel, delta) / length_sq, 0.0, 1.0)
    closest = index.seg_a[None, :, :] + delta[None, :, :] * t[..., None]
    distances = np.hypot(mid[:, None, 0] - closest[..., 0], mid[:, None, 1] - closest[..., 1])
    angles = _angle_residual(index.seg_angle[None, :], angle[:, None])
    cost = (distances / sigma[:, None]) ** 2 + (angles / params.angle_sigma) ** 2
    best = np.argmin(cost, axis=1)

    associations = []
    for row, sighting in enumerate(sightings):
        target = int(best[row])
        residual = float(distances[row, target])
        if residual > params.association_gate:
            associations.append(_unmatched(sighting.kind, residual, params))
            continue
        log_likelihood = max(params.log_likelihood_floor, -0.5 * float(cost[row, target]))
        # only the offset across the carrier is observable from a line
        direction = delta[target]
        normal = np.array([-direction[1], direction[0]]) / math.hypot(direction[0], direction[1])
        offset = float((index.seg_a[target] - mid[row]) @ normal)
        shift = (float(offset * normal[0]), float(offset * normal[1]))
        associations.append(Association(sighting.kind, target, residual, log_likelihood, shift))
    return associations


def frame_likelihood(pose, observation, field, params=None):
    """
    Score one observation against a pose hypothesis.

    Args:
        pose: Pose2D hypothesis, field frame
        observation: perception Observation
        field: FieldSpec
        params: LocalizationParams

    Returns:
        FrameFit with the summed log-likelihood and the damped least-squares
        (x, y) shift toward the associated landmarks
    """
    params = params or LocalizationParams()
    index = landmark_index(field)
    lines = [s for s in observation.landmarks if s.kind == LandmarkKind.LINE_SEGMENT]
    line_fits = iter(_associate_lines(lines, pose, index, params) if lines else ())
    associations = [
        next(line_fits) if sighting.kind == LandmarkKind.LINE_SEGMENT
        else _associate_point(sighting, pose, index, params)
        for sighting in observation.landmarks
    ]

    weighted, total_weight = np.zeros(2), 0.0
    for sighting, association in zip(observation.landmarks, associations):
        if association.target is None:
            continue
        weight = 1.0 / params.sigma(math.hypot(*sighting.position)) ** 2
        weighted += weight * np.asarray(association.shift)
        total_weight += weight
    shift = (0.0, 0.0)
    if total_weight > 0:
        shift = tuple(float(v) for v in params.correction_gain * weighted / total_weight)

    return FrameFit(
        log_likelihood=float(sum(a.log_likelihood for a in associations)),
        shift=shift,
        associations=tuple(associations),
    )
