"""
Static SVG rendering of a trace: field paint, robot and ball paths,
obstacles, halo circles and goal markers.
"""

import logging
from pathlib import Path

from django.template.loader import render_to_string

from core.exceptions import ConfigurationError
from field.geometry import Pose2D, ego_to_field
from field.spec import FieldSpec
from simulation.trace import read_trace

logger = logging.getLogger(__name__)

PIXELS_PER_METER = 80
MARGIN = 0.7
TEAM_COLORS = {'home': '#d62728', 'away': '#1f77b4'}
DEFAULT_COLOR = '#444444'


class _Canvas:
    """Maps field meters to SVG pixels (y up on the field, down in SVG)."""

    def __init__(self, field):
        self.field = field
        self.width = (field.length + 2 * MARGIN) * PIXELS_PER_METER
        self.height = (field.width + 2 * MARGIN) * PIXELS_PER_METER

    def x(self, value):
        return round((value + self.field.half_length + MARGIN) * PIXELS_PER_METER, 2)

    def y(self, value):
        return round((self.field.half_width + MARGIN - value) * PIXELS_PER_METER, 2)

    def length(self, value):
        return round(value * PIXELS_PER_METER, 2)

    def point(self, p):
        return self.x(p[0]), self.y(p[1])

    def rect(self, x0, y0, x1, y1):
        return {
            'x': self.x(min(x0, x1)), 'y': self.y(max(y0, y1)),
            'w': self.length(abs(x1 - x0)), 'h': self.length(abs(y1 - y0)),
        }

    def polyline(self, points):
        return ' '.join(f"{x},{y}" for x, y in (self.point(p) for p in points))


def _field_from_rows(rows):
    row = next((r for r in rows if r.kind == 'field'), None)
    if row is None:
        return FieldSpec()
    data = {key: value for key, value in row.extra.items() if key in FieldSpec.__dataclass_fields__}
    try:
        return FieldSpec.from_dict(data)
    except ConfigurationError as exc:
        logger.warning(f"Trace field row is invalid ({exc}); drawing the default field")
        return FieldSpec()


def _field_paint(canvas):
    field = canvas.field
    hl, hw = field.half_length, field.half_width
    goal_half = field.goal_width / 2.0
    area_half = field.goal_area_width / 2.0
    rects = [canvas.rect(-hl, -hw, hl, hw)]
    for sign in (-1, 1):
        rects.append(canvas.rect(sign * hl, -area_half, sign * (hl - field.goal_area_length), area_half))
    goals = [canvas.rect(sign * hl, -goal_half, sign * (hl + 0.4), goal_half) for sign in (-1, 1)]
    marks = [canvas.point((sign * (hl - field.penalty_mark_distance), 0.0)) for sign in (-1, 1)]
    return {
        'rects': rects,
        'goals': goals,
        'center_line': {'x': canvas.x(0.0), 'y1': canvas.y(hw), 'y2': canvas.y(-hw)},
        'center_circle': {'cx': canvas.x(0.0), 'cy': canvas.y(0.0),
                          'r': canvas.length(field.center_circle_radius)},
        'marks': [{'cx': cx, 'cy': cy} for cx, cy in marks],
        'line_width': max(1.0, canvas.length(field.line_width)),
    }


def svg_context(rows):
    """Template context for the rows of one trace."""
    field = _field_from_rows(rows)
    canvas = _Canvas(field)
    teams = {r.actor_id: r.extra.get('team') for r in rows if r.kind == 'start'}
    radii = {r.actor_id: r.number('radius', 0.15) for r in rows if r.kind == 'start'}

    paths = {}
    last_pose = {}
    ball_path = []
    halos = []
    for row in rows:
        if row.kind == 'robot' and row.x is not None:
            paths.setdefault(row.actor_id, []).append((row.x, row.y))
            last_pose[row.actor_id] = Pose2D(row.x, row.y, row.theta or 0.0)
        elif row.kind == 'ball' and row.x is not None:
            ball_path.append((row.x, row.y))
        elif row.kind == 'halo' and row.actor_id in last_pose:
            center = ego_to_field(last_pose[row.actor_id], (row.number('ball_x', 0.0), row.number('ball_y', 0.0)))
            cx, cy = canvas.point(center)
            halos.append({'cx': cx, 'cy': cy, 'r': canvas.length(row.number('radius', 0.0))})

    robots = []
    for robot_id, points in sorted(paths.items()):
        end_x, end_y = canvas.point(points[-1])
        robots.append({
            'id': robot_id,
            'color': TEAM_COLORS.get(teams.get(robot_id), DEFAULT_COLOR),
            'points': canvas.polyline(points),
            'end_x': end_x,
            'end_y': end_y,
            'r': canvas.length(radii.get(robot_id, 0.15)),
        })

    obstacles = []
    for row in rows:
        if row.kind == 'obstacle' and row.x is not None:
            cx, cy = canvas.point((row.x, row.y))
            obstacles.append({'cx': cx, 'cy': cy, 'r': canvas.length(row.number('radius', 0.2))})

    goals = []
    for row in rows:
        if row.kind == 'goal':
            x = row.x if row.x is not None else 0.0
            x = max(-field.half_length, min(field.half_length, x))
            gx, gy = canvas.point((x, row.y if row.y is not None else 0.0))
            goals.append({'x': gx, 'y': gy, 'team': row.extra.get('team', ''),
                          'color': TEAM_COLORS.get(row.extra.get('team'), DEFAULT_COLOR)})

    return {
        'width': canvas.length(field.length + 2 * MARGIN),
        'height': canvas.length(field.width + 2 * MARGIN),
        'paint': _field_paint(canvas),
        'robots': robots,
        'ball_points': canvas.polyline(ball_path) if ball_path else '',
        'obstacles': obstacles,
        'halos': halos,
        'goals': goals,
    }


def render_svg(trace_path, out_path=None):
    """
    Render ``trace_path`` to SVG.

    Args:
        trace_path: trace file
        out_path: destination; defaults to the trace path with ``.svg``

    Returns:
        Path of the written file
    """
    trace_path = Path(trace_path)
    out_path = Path(out_path) if out_path else trace_path.with_suffix('.svg')
    rows = read_trace(trace_path)
    document = render_to_string('harness/field.svg', svg_context(rows))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(document)
    logger.info(f"Rendered {trace_path} ({len(rows)} rows) to {out_path}")
    return out_path
