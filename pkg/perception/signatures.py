"""
Color signatures: normalized color histograms standing in for the
bounding-box histograms of detected robots.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from core.exceptions import ConfigurationError

SIGNATURE_BINS = 8


class ObstacleLabel(str, Enum):
    # enumeration order is the classification tie-break order
    TEAMMATE = 'Teammate'
    RIVAL = 'Rival'
    REFEREE = 'Referee'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class ColorSignature:
    histogram: tuple

    def __post_init__(self):
        object.__setattr__(self, 'histogram', tuple(float(w) for w in self.histogram))

    @classmethod
    def from_weights(cls, weights):
        """Normalize nonnegative weights into a signature."""
        values = np.asarray(weights, dtype=float)
        if values.size == 0 or np.any(values < 0) or values.sum() <= 0:
            raise ConfigurationError('signature', 'weights must be nonnegative with a positive sum')
        return cls(tuple(values / values.sum()))

    def clean(self, bins=SIGNATURE_BINS):
        if len(self.histogram) != bins:
            raise ConfigurationError('signature', f"expected {bins} bins, got {len(self.histogram)}")
        if any(w < 0 for w in self.histogram):
            raise ConfigurationError('signature', 'weights must be nonnegative')
        if abs(sum(self.histogram) - 1.0) > 1e-9:
            raise ConfigurationError('signature', 'weights must sum to 1')

    def as_array(self):
        return np.asarray(self.histogram, dtype=float)

    def l1(self, other):
        return float(np.abs(self.as_array() - other.as_array()).sum())


UNIFORM_SIGNATURE = ColorSignature.from_weights([1.0] * SIGNATURE_BINS)

# Jersey and referee colors; bins run roughly from dark to bright hues.
TEAM_SIGNATURES = {
    'home': ColorSignature.from_weights([0.05, 0.05, 0.05, 0.05, 0.1, 0.5, 0.1, 0.1]),
    'away': ColorSignature.from_weights([0.05, 0.5, 0.1, 0.1, 0.05, 0.05, 0.05, 0.1]),
    'referee': ColorSignature.from_weights([0.6, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05]),
}


def other_team(team):
    return 'away' if team == 'home' else 'home'


def signature_models(team):
    """Label → model signature as seen by a robot of ``team``."""
    return {
        ObstacleLabel.TEAMMATE: TEAM_SIGNATURES[team],
        ObstacleLabel.RIVAL: TEAM_SIGNATURES[other_team(team)],
        ObstacleLabel.REFEREE: TEAM_SIGNATURES['referee'],
    }
