"""
Obstacle handling: size gating, color classification and egocentric
clusters with certainty dynamics.
"""

from dataclasses import dataclass, replace
import logging
import math

from core.config import build_section
from core.exceptions import ConfigurationError, DomainError
from field.geometry import field_to_ego

from .signatures import ObstacleLabel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ApparentSize:
    min_apparent: float
    max_apparent: float

    def contains(self, size):
        return self.min_apparent <= size <= self.max_apparent


def expected_obstacle_size(distance, class_heights, height_scale=1.0):
    """
    Apparent-size interval of an obstacle class at ``distance``.

    Args:
        distance: meters, > 0
        class_heights: (min_height, max_height) in meters
        height_scale: camera constant mapping height/distance to apparent size

    Returns:
        ApparentSize
    """
    if not distance > 0:
        raise DomainError(f"distance must be > 0, got {distance}")
    low, high = class_heights
    return ApparentSize(height_scale * low / distance, height_scale * high / distance)


def classify_signature(sig, models, threshold):
    """
    Label of the nearest model signature (L1), or Unknown past ``threshold``.

    Ties resolve in ObstacleLabel order.
    """
    if not models:
        raise ConfigurationError('signature_models', 'at least one model signature is required')
    best_label, best_distance = None, math.inf
    for label in ObstacleLabel:
        if label not in models:
            continue
        distance = sig.l1(models[label])
        if distance < best_distance:
            best_label, best_distance = label, distance
    if best_distance > threshold:
        return ObstacleLabel.UNKNOWN
    return best_label


@dataclass(frozen=True)
class ObstacleParams:
    gain_up: float = 0.3
    gain_down: float = 0.1
    match_radius: float = 0.5
    blend: float = 0.5
    certainty_floor: float = 0.05
    min_height: float = 0.8
    max_height: float = 2.0
    height_scale: float = 1.0
    signature_threshold: float = 0.4

    def clean(self):
        for name in ('gain_up', 'gain_down'):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigurationError(name, 'must be within (0, 1)')
        if not 0.0 <= self.blend <= 1.0:
            raise ConfigurationError('blend', 'must be within [0, 1]')
        if not 0.0 <= self.certainty_floor < 1.0:
            raise ConfigurationError('certainty_floor', 'must be within [0, 1)')
        if not self.match_radius > 0:
            raise ConfigurationError('match_radius', 'must be > 0')
        if not 0 < self.min_height <= self.max_height:
            raise ConfigurationError('min_height', 'must be > 0 and <= max_height')
        if not self.height_scale > 0:
            raise ConfigurationError('height_scale', 'must be > 0')
        if self.signature_threshold < 0:
            raise ConfigurationError('signature_threshold', 'must be >= 0')

    @classmethod
    def from_dict(cls, data, prefix='obstacles'):
        return build_section(cls, data, prefix=prefix)


@dataclass(frozen=True)
class ObstacleDetection:
    position: tuple
    label: ObstacleLabel


@dataclass(frozen=True)
class ObstacleCluster:
    position: tuple
    label: ObstacleLabel
    certainty: float
    last_seen: float

    def __post_init__(self):
        if not 0.0 <= self.certainty <= 1.0:
            raise DomainError(f"certainty {self.certainty} outside [0, 1]")
        if not all(math.isfinite(v) for v in self.position):
            raise DomainError('cluster position must be finite')

    @property
    def distance(self):
        return math.hypot(*self.position)


def detect_obstacles(candidates, models, params):
    """Gate candidates by expected apparent size, then classify the survivors."""
    detections = []
    for candidate in candidates:
        distance = math.hypot(*candidate.position)
        if distance <= 0:
            continue
        expected = expected_obstacle_size(distance, (params.min_height, params.max_height),
                                          params.height_scale)
        if not expected.contains(candidate.apparent_size):
            logger.debug(f"Discarded obstacle candidate of size {candidate.apparent_size:.3f} at {distance:.2f} m")
            continue
        label = classify_signature(candidate.signature, models, params.signature_threshold)
        detections.append(ObstacleDetection(candidate.position, label))
    return detections


def update_clusters(clusters, detections, ego_motion, params, now=0.0):
    """
    Predict, match and update obstacle clusters for one perception frame.

    Args:
        clusters: list of ObstacleCluster, egocentric
        detections: list of ObstacleDetection, egocentric
        ego_motion: Pose2D of the robot's new frame expressed in its old frame
        params: ObstacleParams
        now: frame stamp

    Returns:
        list of ObstacleCluster (matched and decayed clusters first, then new ones)
    """
    params.clean()
    predicted = [replace(c, position=field_to_ego(ego_motion, c.position)) for c in clusters]

    pairs = []
    for ci, cluster in enumerate(predicted):
        for di, detection in enumerate(detections):
            d = math.hypot(cluster.position[0] - detection.position[0],
                           cluster.position[1] - detection.position[1])
            if d <= params.match_radius:
                pairs.append((d, ci, di))
    pairs.sort()

    matched_clusters, matched_detections = {}, set()
    for _, ci, di in pairs:
        if ci in matched_clusters or di in matched_detections:
            continue
        matched_clusters[ci] = di
        matched_detections.add(di)

    result = []
    for ci, cluster in enumerate(predicted):
        if ci in matched_clusters:
            detection = detections[matched_clusters[ci]]
            position = tuple(
                (1.0 - params.blend) * p + params.blend * q
                for p, q in zip(cluster.position, detection.position)
            )
            label = cluster.label if detection.label == ObstacleLabel.UNKNOWN else detection.label
            certainty = cluster.certainty + params.gain_up * (1.0 - cluster.certainty)
            result.append(ObstacleCluster(position, label, min(1.0, certainty), now))
        else:
            certainty = cluster.certainty * (1.0 - params.gain_down)
            if certainty >= params.certainty_floor:
                result.append(replace(cluster, certainty=certainty))
    for di, detection in enumerate(detections):
        if di not in matched_detections:
            result.append(ObstacleCluster(detection.position, detection.label, params.gain_up, now))
    return result
