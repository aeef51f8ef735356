"""
Landmark catalog and painted geometry of a FieldSpec.

Junctions are derived from the painted primitives by counting the line arms
leaving each intersection point: two arms make an L, three a T, four an X.
"""

from dataclasses import dataclass
from enum import Enum
import logging
import math

from core.cache_utils import cached_function

from .geometry import mirror_point

logger = logging.getLogger(__name__)

_EPS = 1e-9
_TOL = 1e-6


class LandmarkKind(str, Enum):
    GOAL_POST = 'GoalPost'
    PENALTY_MARK = 'PenaltyMark'
    CENTER_CIRCLE = 'CenterCircle'
    JUNCTION_X = 'JunctionX'
    JUNCTION_T = 'JunctionT'
    JUNCTION_L = 'JunctionL'
    LINE_SEGMENT = 'LineSegment'


KIND_ORDER = {kind: index for index, kind in enumerate(LandmarkKind)}

POINT_KINDS = tuple(kind for kind in LandmarkKind if kind != LandmarkKind.LINE_SEGMENT)

JUNCTION_BY_ARMS = {
    2: LandmarkKind.JUNCTION_L,
    3: LandmarkKind.JUNCTION_T,
    4: LandmarkKind.JUNCTION_X,
}


class OwnerHalf(str, Enum):
    OWN = 'Own'
    OPPONENT = 'Opponent'
    NEUTRAL = 'Neutral'

    @classmethod
    def for_x(cls, x):
        if x < -_EPS:
            return cls.OWN
        if x > _EPS:
            return cls.OPPONENT
        return cls.NEUTRAL

    def flipped(self):
        return {
            OwnerHalf.OWN: OwnerHalf.OPPONENT,
            OwnerHalf.OPPONENT: OwnerHalf.OWN,
            OwnerHalf.NEUTRAL: OwnerHalf.NEUTRAL,
        }[self]


@dataclass(frozen=True)
class Landmark:
    """
    A catalog entry. For LineSegment the position is the segment midpoint and
    ``endpoints`` holds both ends; point landmarks leave it None.
    """
    kind: LandmarkKind
    position: tuple
    owner_half: OwnerHalf
    endpoints: tuple = None

    @property
    def sort_key(self):
        return (KIND_ORDER[self.kind], self.position[0], self.position[1])

    def mirrored(self):
        endpoints = None
        if self.endpoints is not None:
            endpoints = tuple(mirror_point(p) for p in self.endpoints)
        return Landmark(self.kind, mirror_point(self.position), self.owner_half.flipped(), endpoints)


@dataclass(frozen=True)
class FieldPaint:
    """Painted field geometry: straight lines, circles and spot marks."""
    segments: tuple
    circles: tuple
    marks: tuple = ()


def _clean_zero(value):
    # keep -0.0 out of catalog coordinates so ordering and equality are stable
    return 0.0 if value == 0.0 else value


def _pt(x, y):
    return (_clean_zero(float(x)), _clean_zero(float(y)))


def _paint(spec):
    hl = spec.half_length
    hw = spec.half_width
    segments = [
        (_pt(-hl, hw), _pt(hl, hw)),
        (_pt(-hl, -hw), _pt(hl, -hw)),
        (_pt(-hl, -hw), _pt(-hl, hw)),
        (_pt(hl, -hw), _pt(hl, hw)),
        (_pt(0.0, -hw), _pt(0.0, hw)),
    ]
    gx = hl - spec.goal_area_length
    gy = spec.goal_area_width / 2.0
    for side in (-1.0, 1.0):
        segments.append((_pt(side * gx, -gy), _pt(side * gx, gy)))
        segments.append((_pt(side * gx, gy), _pt(side * hl, gy)))
        segments.append((_pt(side * gx, -gy), _pt(side * hl, -gy)))
    marks = (
        _pt(-(hl - spec.penalty_mark_distance), 0.0),
        _pt(hl - spec.penalty_mark_distance, 0.0),
        _pt(0.0, 0.0),
    )
    circles = ((_pt(0.0, 0.0), float(spec.center_circle_radius)),)
    return FieldPaint(segments=tuple(segments), circles=circles, marks=marks)


@cached_function(prefix='field.field_paint')
def _cached_paint(spec):
    return _paint(spec)


def field_paint(spec):
    """Painted geometry of a valid FieldSpec."""
    spec.clean()
    return _cached_paint(spec)


def _segment_arms(point, segment):
    """Arms a segment contributes at ``point``: 0 off-segment, 1 at an end, 2 inside."""
    (ax, ay), (bx, by) = segment
    dx, dy = bx - ax, by - ay
    length = math.hypot(dx, dy)
    px, py = point[0] - ax, point[1] - ay
    if abs(px * dy - py * dx) / length > _TOL:
        return 0
    t = (px * dx + py * dy) / (length * length)
    if t < -_TOL or t > 1.0 + _TOL:
        return 0
    if abs(t) <= _TOL or abs(t - 1.0) <= _TOL:
        return 1
    return 2


def _circle_arms(point, circle):
    (cx, cy), radius = circle
    return 2 if abs(math.hypot(point[0] - cx, point[1] - cy) - radius) <= _TOL else 0


def _segment_intersection(s1, s2):
    (x1, y1), (x2, y2) = s1
    (x3, y3), (x4, y4) = s2
    denom = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    if abs(denom) <= _TOL:
        return None
    t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / denom
    u = -((x1 - x2) * (y1 - y3) - (y1 - y2) * (x1 - x3)) / denom
    if -_TOL <= t <= 1.0 + _TOL and -_TOL <= u <= 1.0 + _TOL:
        return (x1 + t * (x2 - x1), y1 + t * (y2 - y1))
    return None


def _segment_circle_intersections(segment, circle):
    (ax, ay), (bx, by) = segment
    (cx, cy), radius = circle
    dx, dy = bx - ax, by - ay
    fx, fy = ax - cx, ay - cy
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - radius * radius
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    points = []
    for t in ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a)):
        if -_TOL <= t <= 1.0 + _TOL:
            points.append((ax + t * dx, ay + t * dy))
    return points


def _junctions(paint):
    candidates = []
    for segment in paint.segments:
        candidates.extend(segment)
    for i, first in enumerate(paint.segments):
        for second in paint.segments[i + 1:]:
            point = _segment_intersection(first, second)
            if point is not None:
                candidates.append(point)
        for circle in paint.circles:
            candidates.extend(_segment_circle_intersections(first, circle))

    seen = {}
    for point in candidates:
        key = (round(point[0], 6), round(point[1], 6))
        seen.setdefault(key, _pt(*key))

    junctions = []
    for point in seen.values():
        arms = sum(_segment_arms(point, s) for s in paint.segments)
        arms += sum(_circle_arms(point, c) for c in paint.circles)
        kind = JUNCTION_BY_ARMS.get(arms)
        if kind is not None:
            junctions.append(Landmark(kind, point, OwnerHalf.for_x(point[0])))
    return junctions


def _catalog(spec, paint):
    hl = spec.half_length
    gw = spec.goal_width / 2.0
    pm = hl - spec.penalty_mark_distance
    landmarks = [
        Landmark(LandmarkKind.GOAL_POST, _pt(x, y), OwnerHalf.for_x(x))
        for x in (-hl, hl) for y in (-gw, gw)
    ]
    landmarks += [
        Landmark(LandmarkKind.PENALTY_MARK, _pt(x, 0.0), OwnerHalf.for_x(x))
        for x in (-pm, pm)
    ]
    landmarks.append(Landmark(LandmarkKind.CENTER_CIRCLE, _pt(0.0, 0.0), OwnerHalf.NEUTRAL))
    landmarks += _junctions(paint)
    for a, b in paint.segments:
        mid = _pt((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
        landmarks.append(Landmark(LandmarkKind.LINE_SEGMENT, mid, OwnerHalf.for_x(mid[0]), (a, b)))
    landmarks.sort(key=lambda lm: lm.sort_key)
    return tuple(landmarks)


@cached_function(prefix='field.landmark_catalog')
def _cached_catalog(spec):
    catalog = _catalog(spec, _cached_paint(spec))
    logger.debug(f"Built landmark catalog with {len(catalog)} entries for {spec}")
    return catalog


def landmark_catalog(spec):
    """
    All landmarks of a field, sorted by kind, then x, then y.

    Args:
        spec: FieldSpec; validated before use

    Returns:
        list of Landmark (goal posts, penalty marks, center circle,
        X/T/L junctions, line segments)
    """
    spec.clean()
    return list(_cached_catalog(spec))


def landmarks_of_kind(spec, kind):
    kind = LandmarkKind(kind)
    return [lm for lm in landmark_catalog(spec) if lm.kind == kind]
