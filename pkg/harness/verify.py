"""
Offline re-check of the loggable invariants of a trace.

Violations are report content, not errors; only an unreadable trace
raises (TraceParseError with the line number).
"""

from dataclasses import dataclass, field as dc_field
import logging
import math

from behaviors.avoidance import effective_cap, radial_component
from behaviors.params import BehaviorParams
from behaviors.transitions import FAR, NEAR, is_declared
from field.geometry import normalize_angle
from perception.noise import NoiseModel
from simulation.trace import read_trace

from .config import AgentParams

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
# ball travel below which the world counts as static between two ticks
STATIC_BALL_TRAVEL = 0.05
APPROACH_PAIR = {FAR.value, NEAR.value}

CHECK_CHOICES = [
    ('radial_cap', 'Velocity component toward the nearest obstacle above the cap'),
    ('speed_bound', 'Avoidance raised the commanded speed'),
    ('far_purity', 'Side-step emitted in GoBehindBallFar'),
    ('halo', 'Approach waypoint strictly inside the halo'),
    ('fsm_edge', 'Transition outside the declared edge set'),
    ('fsm_continuity', 'Transition source differs from the last target'),
    ('certainty', 'Certainty or confidence outside [0, 1]'),
    ('fov', 'Observation outside the camera field of view'),
    ('contact', 'Robot disc touched an obstacle disc'),
    ('hysteresis', 'Near/far transition undone on the next perception tick'),
]


@dataclass(frozen=True)
class Violation:
    line_no: int
    check: str
    message: str


@dataclass
class VerificationReport:
    rows_checked: int = 0
    violations: list = dc_field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def counts(self):
        result = {}
        for v in self.violations:
            result[v.check] = result.get(v.check, 0) + 1
        return result


class _Limits:
    """Parameters the checks need, taken from the trace's ``params`` row."""

    def __init__(self, row=None):
        behavior = BehaviorParams()
        noise = NoiseModel()
        number = row.number if row is not None else (lambda key, default=None: default)
        self.behavior = BehaviorParams(
            v_cap=number('v_cap', behavior.v_cap),
            d_repel=number('d_repel', behavior.d_repel),
            influence_radius=number('influence_radius', behavior.influence_radius),
        )
        self.fov = number('fov', noise.fov)
        self.max_range = number('max_range', noise.max_range)
        self.camera_yaw = number('camera_yaw', noise.camera_yaw)
        self.perception_period = number('perception_period', AgentParams().perception_period)


def _check_cmd(row, limits):
    found = []
    vx, vy = row.number('vx', 0.0), row.number('vy', 0.0)
    if row.extra.get('state') == FAR.value and vy != 0.0:
        found.append(('far_purity', f"vy={vy!r} in {FAR.value}"))
    distance = row.number('obs_d')
    if distance is None:
        return found
    bearing = row.number('obs_b', 0.0)
    in_speed = row.number('in_speed', 0.0)
    cap = effective_cap(limits.behavior, distance, bearing, in_speed, row.flag('axis'))
    radial = radial_component(vx, vy, bearing)
    if radial > cap + TOLERANCE:
        found.append(('radial_cap', f"radial {radial:.4f} > cap {cap:.4f} at {distance:.3f} m"))
    if math.hypot(vx, vy) > in_speed + TOLERANCE:
        found.append(('speed_bound', f"speed {math.hypot(vx, vy):.4f} > input {in_speed:.4f}"))
    return found


def _check_halo(row):
    radius = row.number('radius', 0.0)
    gap = math.hypot(row.x - row.number('ball_x', 0.0), row.y - row.number('ball_y', 0.0))
    if gap < radius - TOLERANCE:
        return [('halo', f"waypoint {gap:.4f} m from the ball, halo {radius:.4f} m")]
    return []


def _check_obs(row, limits):
    item = row.extra.get('item')
    if item == 'LineSegment' and limits.fov > math.pi:
        return []
    found = []
    distance = math.hypot(row.x, row.y)
    bearing = normalize_angle(math.atan2(row.y, row.x) - limits.camera_yaw)
    if distance > limits.max_range + TOLERANCE or abs(bearing) > limits.fov / 2.0 + TOLERANCE:
        found.append(('fov', f"{item} at range {distance:.3f} m, bearing {bearing:.3f} rad"))
    p = row.number('p')
    if p is not None and not 0.0 <= p <= 1.0:
        found.append(('certainty', f"{item} confidence {p!r}"))
    return found


def _check_bounded(row, key):
    value = row.number(key)
    if value is not None and not 0.0 <= value <= 1.0:
        return [('certainty', f"{row.kind} {key} {value!r}")]
    return []


class _Bodies:
    """Disc radii from the header rows and the last ball position seen."""

    def __init__(self, rows):
        self.robots = {r.actor_id: r.number('radius') for r in rows if r.kind == 'start'}
        self.obstacles = {r.actor_id: (r.x, r.y, r.number('radius')) for r in rows if r.kind == 'obstacle'}
        self.ball = None

    def check_collision(self, row):
        other = row.extra.get('other', '')
        if not other.startswith('obstacle:'):
            return []
        obstacle_id = int(other.split(':', 1)[1])
        known = self.obstacles.get(obstacle_id)
        robot_radius = self.robots.get(row.actor_id)
        if known is None or robot_radius is None or known[2] is None or row.x is None:
            return [('contact', f"robot {row.actor_id} touched obstacle {obstacle_id}")]
        gap = math.hypot(row.x - known[0], row.y - known[1])
        return [('contact', f"robot {row.actor_id} {gap:.3f} m from obstacle {obstacle_id}, "
                            f"contact at {robot_radius + known[2]:.3f} m")]


def _check_hysteresis(row, previous, ball, limits):
    if previous is None or {row.extra.get('from'), row.extra.get('to')} != APPROACH_PAIR:
        return []
    time, source, target, ball_then = previous
    if (row.extra.get('from'), row.extra.get('to')) != (target, source):
        return []
    if row.time - time > limits.perception_period + TOLERANCE:
        return []
    if ball is not None and ball_then is not None and math.dist(ball, ball_then) > STATIC_BALL_TRAVEL:
        return []
    return [('hysteresis', f"{source} -> {target} undone after {row.time - time:.3f} s")]


def verify_rows(rows):
    """
    Re-check every row of a parsed trace.

    Returns:
        VerificationReport
    """
    params_row = next((r for r in rows if r.kind == 'params'), None)
    limits = _Limits(params_row)
    current = {}
    last_switch = {}
    bodies = _Bodies(rows)
    report = VerificationReport(rows_checked=len(rows))

    for row in rows:
        found = []
        if row.kind == 'cmd':
            found = _check_cmd(row, limits)
        elif row.kind == 'halo':
            found = _check_halo(row)
        elif row.kind == 'obs':
            found = _check_obs(row, limits)
        elif row.kind == 'ball' and row.x is not None:
            bodies.ball = row.position
        elif row.kind == 'collision':
            found = bodies.check_collision(row)
        elif row.kind == 'cluster':
            found = _check_bounded(row, 'certainty')
        elif row.kind == 'loc':
            found = _check_bounded(row, 'confidence')
        elif row.kind == 'fsm':
            fsm, source, target = row.extra.get('fsm'), row.extra.get('from'), row.extra.get('to')
            if not is_declared(fsm, source, target):
                found.append(('fsm_edge', f"{fsm} {source} -> {target}"))
            key = (row.actor_id, fsm)
            if key in current and current[key] != source:
                found.append(('fsm_continuity', f"{fsm} left {source} while in {current[key]}"))
            current[key] = target
            if fsm == 'behaviour':
                found += _check_hysteresis(row, last_switch.get(row.actor_id), bodies.ball, limits)
                last_switch[row.actor_id] = (row.time, source, target, bodies.ball)
        for check, message in found:
            report.violations.append(Violation(row.line_no, check, message))

    if report.violations:
        logger.warning(f"Trace verification found {len(report.violations)} violation(s): {report.counts()}")
    return report


def verify_trace(trace_path):
    """Parse ``trace_path`` and re-check it."""
    return verify_rows(read_trace(trace_path))
