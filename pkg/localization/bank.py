"""
Four-hypothesis pose bank.

Every hypothesis starts at one of the legal start poses and keeps its
heading slaved to the integrated gyro yaw through a fixed reference
offset; landmarks only ever correct x and y. The bank accumulates
per-hypothesis log-likelihoods until one hypothesis leads by a margin and
a goal post or the center circle confirms it, or until the timeout forces
a lock.
"""

from dataclasses import dataclass, replace
from enum import Enum
import logging
import math

from core.exceptions import ConfigurationError, SimulationStateError
from field.geometry import Pose2D, ego_to_field, field_to_ego, normalize_angle
from field.landmarks import LandmarkKind
from field.spec import StartLabel, start_poses as default_start_poses

from .likelihood import LocalizationParams, frame_likelihood, landmark_index

logger = logging.getLogger(__name__)

CONFIRMING_KINDS = (LandmarkKind.GOAL_POST, LandmarkKind.CENTER_CIRCLE)
RESTART_LABELS = (StartLabel.SIDELINE_LEFT, StartLabel.SIDELINE_RIGHT)


class BankMode(str, Enum):
    CONVERGING = 'Converging'
    LOCKED = 'Locked'


@dataclass(frozen=True)
class Hypothesis:
    """
    ``reference_offset`` maps the shared integrated gyro yaw to this
    hypothesis' heading: theta = yaw_integrated + reference_offset.
    """
    pose: Pose2D
    start_label: StartLabel
    reference_offset: float
    score: float = 0.0
    alive: bool = True
    observations: int = 0
    last_frame: float = 0.0


@dataclass(frozen=True)
class HypothesisBank:
    hypotheses: tuple
    mode: BankMode = BankMode.CONVERGING
    started_at: float = 0.0
    timeout: float = 10.0
    best: int = None
    confirmed: bool = None

    @property
    def alive(self):
        return [i for i, h in enumerate(self.hypotheses) if h.alive]

    def leader(self):
        """Index of the best-scoring alive hypothesis; ties go to the lower index."""
        alive = self.alive
        if not alive:
            raise SimulationStateError('hypothesis bank has no alive hypothesis')
        return max(alive, key=lambda i: (self.hypotheses[i].score, -i))


@dataclass(frozen=True)
class PoseEstimate:
    pose: Pose2D
    confidence: float
    low_confidence: bool
    label: StartLabel


def init_bank(field, start_poses, now, timeout, gyro=None):
    """
    Seed one hypothesis per start pose.

    Args:
        field: FieldSpec
        start_poses: exactly four StartPose
        now: current time, becomes ``started_at``
        timeout: seconds before select_best forces a lock
        gyro: GyroState at initialization; offsets are taken against its yaw

    Returns:
        HypothesisBank in Converging mode
    """
    field.clean()
    start_poses = tuple(start_poses)
    if len(start_poses) != 4:
        raise ConfigurationError('start_poses', f"exactly four start poses are required, got {len(start_poses)}")
    if not timeout > 0:
        raise ConfigurationError('timeout', 'must be > 0')
    yaw = gyro.yaw_integrated if gyro is not None else 0.0
    hypotheses = tuple(
        Hypothesis(pose=sp.pose, start_label=sp.label, reference_offset=sp.pose.theta - yaw)
        for sp in start_poses
    )
    return HypothesisBank(hypotheses=hypotheses, started_at=now, timeout=timeout)


def restart_bank(field, now, timeout, gyro=None, start_poses=None):
    """
    Re-initialization after a mid-match restart: the robot re-enters from a
    sideline, so only the two sideline hypotheses stay alive.
    """
    start_poses = start_poses or default_start_poses(field)
    bank = init_bank(field, start_poses, now, timeout, gyro)
    hypotheses = tuple(replace(h, alive=h.start_label in RESTART_LABELS) for h in bank.hypotheses)
    logger.info(f"Localization restarted at t={now:.2f} from the sideline pair")
    return replace(bank, hypotheses=hypotheses)


def _slaved(hypothesis, x, y, gyro):
    return Pose2D(x, y, hypothesis.reference_offset + gyro.yaw_integrated)


def predict(bank, odometry_delta, gyro):
    """
    Dead-reckon every alive hypothesis.

    Args:
        bank: HypothesisBank
        odometry_delta: egocentric (dx, dy) travelled since the last predict,
            expressed in the robot frame at that time
        gyro: current GyroState

    Returns:
        HypothesisBank
    """
    if not bank.alive:
        raise SimulationStateError('cannot predict an empty hypothesis bank')
    dx, dy = odometry_delta[0], odometry_delta[1]
    hypotheses = []
    for h in bank.hypotheses:
        if h.alive:
            x, y = ego_to_field(h.pose, (dx, dy))
            h = replace(h, pose=_slaved(h, x, y, gyro))
        hypotheses.append(h)
    return replace(bank, hypotheses=tuple(hypotheses))


def correct(bank, obs, field, params=None):
    """
    Score one observation against every alive hypothesis and nudge its
    position toward the associated landmarks. Headings are left alone.
    """
    params = params or LocalizationParams()
    if obs is None or not obs.landmarks:
        return bank
    hypotheses = []
    for h in bank.hypotheses:
        if h.alive:
            fit = frame_likelihood(h.pose, obs, field, params)
            pose = Pose2D(h.pose.x + fit.shift[0], h.pose.y + fit.shift[1], h.pose.theta)
            h = replace(h, pose=pose, score=h.score + fit.log_likelihood,
                        observations=h.observations + 1, last_frame=fit.mean_log_likelihood)
        hypotheses.append(h)
    return replace(bank, hypotheses=tuple(hypotheses))


def confirms(pose, history, field, params=None):
    """
    True when a goal post or center circle sighting in ``history`` agrees
    with ``pose`` within the confirmation gate in distance and bearing.
    """
    params = params or LocalizationParams()
    index = landmark_index(field)
    for obs in reversed(list(history or ())):
        for sighting in obs.landmarks_of(*CONFIRMING_KINDS):
            q = ego_to_field(pose, sighting.position)
            for candidate in index.points[sighting.kind]:
                if math.hypot(candidate[0] - q[0], candidate[1] - q[1]) > params.confirm_distance:
                    continue
                expected = field_to_ego(pose, tuple(candidate))
                seen = math.atan2(sighting.position[1], sighting.position[0])
                if abs(normalize_angle(math.atan2(expected[1], expected[0]) - seen)) <= params.confirm_angle:
                    return True
    return False


def _lock(bank, best, confirmed):
    hypotheses = tuple(replace(h, alive=(i == best)) for i, h in enumerate(bank.hypotheses))
    return replace(bank, hypotheses=hypotheses, mode=BankMode.LOCKED, best=best, confirmed=confirmed)


def select_best(bank, now, history, field, params=None):
    """
    Try to lock the bank onto a single hypothesis.

    Locks when the leader beats the runner-up by more than ``margin`` and a
    confirming landmark agrees with the leader's pose; otherwise locks to
    the leader unconfirmed once ``now - started_at`` exceeds the timeout.
    A bank that is already Locked is returned unchanged.
    """
    params = params or LocalizationParams()
    if bank.mode == BankMode.LOCKED:
        return bank
    leader = bank.leader()
    others = [bank.hypotheses[i].score for i in bank.alive if i != leader]
    runner_up = max(others) if others else -math.inf
    label = bank.hypotheses[leader].start_label.value

    if bank.hypotheses[leader].score - runner_up > params.margin:
        if confirms(bank.hypotheses[leader].pose, history, field, params):
            logger.info(f"Localization locked to {label} at t={now:.2f}")
            return _lock(bank, leader, True)
        logger.debug(f"Leader {label} awaits landmark confirmation at t={now:.2f}")

    if now - bank.started_at > bank.timeout:
        logger.warning(f"Localization timed out after {now - bank.started_at:.1f} s, locking to {label} unconfirmed")
        return _lock(bank, leader, False)
    return bank


def pose_estimate(bank):
    """
    Current best pose.

    Returns:
        PoseEstimate; confidence is exp of the leader's mean per-sighting
        log-likelihood in its last frame. Converging banks are flagged low
        confidence.
    """
    leader = bank.best if bank.mode == BankMode.LOCKED else bank.leader()
    if leader is None or not bank.hypotheses[leader].alive:
        raise SimulationStateError('hypothesis bank has no alive hypothesis')
    h = bank.hypotheses[leader]
    return PoseEstimate(
        pose=h.pose,
        confidence=math.exp(h.last_frame),
        low_confidence=bank.mode != BankMode.LOCKED,
        label=h.start_label,
    )
