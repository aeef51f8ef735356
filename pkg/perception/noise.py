"""
Sensor noise model for synthetic perception.
"""

from dataclasses import dataclass
import math

from core.config import build_section
from core.exceptions import ConfigurationError

LINE_SOURCE_CHOICES = [
    ('geometric', 'Exact painted geometry, sampled'),
    ('raster', 'Rasterized grid through Hough extraction and merging'),
]


@dataclass(frozen=True)
class NoiseModel:
    """
    Camera field of view, range limit and the noise applied to every
    reported item. Radial error std is ``range_noise_coeff * distance``.
    """
    fov: float = 2.618
    max_range: float = 6.0
    range_noise_coeff: float = 0.02
    bearing_noise_std: float = 0.01
    false_negative_prob: float = 0.05
    camera_yaw: float = 0.0
    obstacle_size_noise: float = 0.05
    line_source: str = 'geometric'
    line_sample_step: float = 0.1
    min_line_length: float = 0.3
    grid_resolution: float = 0.05

    @property
    def half_fov(self):
        return self.fov / 2.0

    def clean(self):
        if not 0.0 < self.fov <= 2.0 * math.pi:
            raise ConfigurationError('fov', 'must be within (0, 2*pi]')
        if not self.max_range > 0:
            raise ConfigurationError('max_range', 'must be > 0')
        for name in ('range_noise_coeff', 'bearing_noise_std', 'obstacle_size_noise'):
            if getattr(self, name) < 0:
                raise ConfigurationError(name, 'must be >= 0')
        if not 0.0 <= self.false_negative_prob <= 1.0:
            raise ConfigurationError('false_negative_prob', 'must be within [0, 1]')
        if self.line_source not in dict(LINE_SOURCE_CHOICES):
            raise ConfigurationError('line_source', f"must be one of {', '.join(dict(LINE_SOURCE_CHOICES))}")
        for name in ('line_sample_step', 'min_line_length', 'grid_resolution'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')

    @classmethod
    def from_dict(cls, data, prefix='noise'):
        return build_section(cls, data, prefix=prefix)

    def ball_confidence(self, distance):
        """Detection confidence of a ball seen at ``distance``."""
        return min(1.0, max(0.0, 1.0 - 0.5 * distance / self.max_range))
