"""
Inputs of one behavior step. Everything in here is an estimate produced
by the agent's own perception and localization.
"""

from dataclasses import dataclass

from field.geometry import Pose2D, ego_to_field


@dataclass(frozen=True)
class BehaviorContext:
    """
    ``ball_ego`` is the last known egocentric ball position (None when the
    ball was never seen); ``ball_seen_at`` the stamp of its last sighting.
    ``obstacles`` are egocentric ObstacleClusters.
    """
    field: object
    pose: Pose2D
    now: float
    pose_confidence: float = 1.0
    low_confidence: bool = False
    ball_ego: tuple = None
    ball_seen_at: float = None
    obstacles: tuple = ()
    positioning: bool = False
    assigned_pose: Pose2D = None

    @property
    def ball_known(self):
        return self.ball_ego is not None

    @property
    def ball_age(self):
        if self.ball_seen_at is None:
            return float('inf')
        return self.now - self.ball_seen_at

    @property
    def ball_field(self):
        if self.ball_ego is None:
            return None
        return ego_to_field(self.pose, self.ball_ego)

    def obstacles_field(self):
        return [ego_to_field(self.pose, c.position) for c in self.obstacles]
