"""
Raster line pipeline: line-occupancy grid, probabilistic Hough segment
extraction and collinear segment merging.

Grid cells are addressed ``cells[row, col]``; the egocentric position of a
cell center is ``(origin_x + col * resolution, origin_y + row * resolution)``.
Hough parameters are expressed in cells, segments are returned in meters.
"""

from dataclasses import dataclass, field as dc_field
import logging
import math

import numpy as np

from core.config import build_section
from core.exceptions import ConfigurationError
from core.rng import substream
from field.landmarks import FieldPaint, field_paint

logger = logging.getLogger(__name__)


# =============================================================================
# GRID
# =============================================================================

@dataclass(frozen=True, eq=False)
class LineGrid:
    resolution: float
    origin: tuple
    cells: np.ndarray

    def __post_init__(self):
        if not self.resolution > 0:
            raise ConfigurationError('resolution', 'must be > 0')
        if self.cells.ndim != 2:
            raise ConfigurationError('cells', 'grid must be rectangular')

    @property
    def shape(self):
        return self.cells.shape

    def occupied(self):
        """(N, 2) array of occupied cells as (col, row) floats."""
        rows, cols = np.nonzero(self.cells)
        return np.column_stack([cols, rows]).astype(float)

    def to_ego(self, col, row):
        return (self.origin[0] + col * self.resolution, self.origin[1] + row * self.resolution)

    def same_as(self, other):
        return (self.resolution == other.resolution and tuple(self.origin) == tuple(other.origin)
                and np.array_equal(self.cells, other.cells))


@dataclass(frozen=True)
class GridSpec:
    """Extent of the egocentric line grid plus the camera culling limits."""
    resolution: float = 0.05
    x_min: float = 0.0
    x_max: float = 6.0
    y_min: float = -3.0
    y_max: float = 3.0
    fov: float = 2.618
    max_range: float = 6.0
    camera_yaw: float = 0.0

    def clean(self):
        if not self.resolution > 0:
            raise ConfigurationError('resolution', 'must be > 0')
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ConfigurationError('x_max', 'grid extent must be positive')

    @classmethod
    def for_noise(cls, noise):
        reach = noise.max_range
        return cls(
            resolution=noise.grid_resolution,
            x_min=-reach if noise.fov > math.pi else 0.0,
            x_max=reach,
            y_min=-reach,
            y_max=reach,
            fov=noise.fov,
            max_range=noise.max_range,
            camera_yaw=noise.camera_yaw,
        )


def _distance_to_segments(px, py, segments):
    best = np.full(px.shape, np.inf)
    for (ax, ay), (bx, by) in segments:
        dx, dy = bx - ax, by - ay
        length_sq = dx * dx + dy * dy
        t = np.clip(((px - ax) * dx + (py - ay) * dy) / length_sq, 0.0, 1.0)
        best = np.minimum(best, np.hypot(px - (ax + t * dx), py - (ay + t * dy)))
    return best


def render_line_grid(robot_pose, field, grid_spec=None):
    """
    Rasterize the painted field lines visible from ``robot_pose``.

    A cell is set when its center lies within half a line width plus half a
    cell of the paint, inside the camera cone and within range.

    Args:
        robot_pose: Pose2D of the robot, field frame
        field: FieldSpec or FieldPaint
        grid_spec: GridSpec

    Returns:
        LineGrid
    """
    grid_spec = grid_spec or GridSpec()
    grid_spec.clean()
    if isinstance(field, FieldPaint):
        paint, line_width = field, 0.05
    else:
        paint, line_width = field_paint(field), field.line_width

    res = grid_spec.resolution
    cols = int(math.floor((grid_spec.x_max - grid_spec.x_min) / res)) + 1
    rows = int(math.floor((grid_spec.y_max - grid_spec.y_min) / res)) + 1
    ex = grid_spec.x_min + np.arange(cols) * res
    ey = grid_spec.y_min + np.arange(rows) * res
    gx, gy = np.meshgrid(ex, ey)

    bearing = np.arctan2(gy, gx) - grid_spec.camera_yaw
    bearing = np.arctan2(np.sin(bearing), np.cos(bearing))
    rng = np.hypot(gx, gy)
    visible = (rng <= grid_spec.max_range) & (np.abs(bearing) <= grid_spec.fov / 2.0)

    c, s = math.cos(robot_pose.theta), math.sin(robot_pose.theta)
    fx = robot_pose.x + c * gx - s * gy
    fy = robot_pose.y + s * gx + c * gy

    threshold = line_width / 2.0 + res / 2.0
    painted = np.zeros(gx.shape, dtype=bool)
    if paint.segments:
        painted |= _distance_to_segments(fx, fy, paint.segments) <= threshold
    for (cx, cy), radius in paint.circles:
        painted |= np.abs(np.hypot(fx - cx, fy - cy) - radius) <= threshold

    cells = (painted & visible).astype(np.uint8)
    return LineGrid(resolution=res, origin=(grid_spec.x_min, grid_spec.y_min), cells=cells)


def dump_pgm(grid, path):
    """Write the grid as an ASCII PGM (P2), forward axis to the right, +y up."""
    rows, cols = grid.shape
    lines = ['P2', f"{cols} {rows}", '1']
    for row in range(rows - 1, -1, -1):
        lines.append(' '.join(str(int(v)) for v in grid.cells[row]))
    with open(path, 'w') as handle:
        handle.write('\n'.join(lines) + '\n')


# =============================================================================
# SEGMENTS
# =============================================================================

@dataclass(frozen=True)
class Segment:
    """
    Line segment with its inlier count. ``sources`` keeps the endpoints of
    every segment merged into this one.
    """
    endpoints: tuple
    support: int
    sources: tuple = dc_field(default=(), compare=False, repr=False)

    def __post_init__(self):
        a, b = self.endpoints
        a = (float(a[0]), float(a[1]))
        b = (float(b[0]), float(b[1]))
        if a == b:
            raise ConfigurationError('endpoints', 'segment endpoints must be distinct')
        object.__setattr__(self, 'endpoints', (a, b))
        if not self.sources:
            object.__setattr__(self, 'sources', (a, b))

    @property
    def length(self):
        (ax, ay), (bx, by) = self.endpoints
        return math.hypot(bx - ax, by - ay)

    @property
    def direction(self):
        (ax, ay), (bx, by) = self.endpoints
        length = self.length
        return ((bx - ax) / length, (by - ay) / length)

    @property
    def angle(self):
        """Undirected carrier angle in [0, pi)."""
        dx, dy = self.direction
        return math.atan2(dy, dx) % math.pi

    @property
    def midpoint(self):
        (ax, ay), (bx, by) = self.endpoints
        return ((ax + bx) / 2.0, (ay + by) / 2.0)

    def offset_of(self, point):
        """Perpendicular distance from ``point`` to the carrier line."""
        (ax, ay) = self.endpoints[0]
        dx, dy = self.direction
        return abs((point[0] - ax) * dy - (point[1] - ay) * dx)


def angle_difference(a, b):
    """Smallest difference between two undirected line angles."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


@dataclass(frozen=True)
class HoughParams:
    """Probabilistic Hough parameters; distances in cells."""
    min_support: int = 5
    angle_bins: int = 180
    rho_resolution: float = 1.0
    max_gap: float = 3.0
    vote_threshold: int = 3
    min_pair_separation: float = 5.0
    max_iterations: int = 4000
    seed: int = 0

    def clean(self):
        if self.min_support < 2:
            raise ConfigurationError('min_support', 'must be >= 2')
        if self.angle_bins < 1:
            raise ConfigurationError('angle_bins', 'must be >= 1')
        for name in ('rho_resolution', 'max_gap'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(name, 'must be > 0')
        if self.vote_threshold < 1 or self.max_iterations < 1:
            raise ConfigurationError('vote_threshold', 'vote threshold and iterations must be >= 1')
        if self.min_pair_separation < 0:
            raise ConfigurationError('min_pair_separation', 'must be >= 0')

    @classmethod
    def from_dict(cls, data, prefix='hough'):
        return build_section(cls, data, prefix=prefix)


def _fit_carrier(points):
    """Total-least-squares line: (centroid, unit direction)."""
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    direction = vt[0]
    # fixed orientation so identical inputs give identical segments
    if direction[0] < 0 or (direction[0] == 0 and direction[1] < 0):
        direction = -direction
    return centroid, direction


def _offsets(points, centroid, direction):
    normal = np.array([-direction[1], direction[0]])
    return np.abs((points - centroid) @ normal)


def _runs(t, max_gap):
    """Split sorted projections into index runs separated by gaps > max_gap."""
    order = np.argsort(t, kind='stable')
    runs = []
    current = [order[0]]
    for prev, idx in zip(order[:-1], order[1:]):
        if t[idx] - t[prev] > max_gap:
            runs.append(current)
            current = []
        current.append(idx)
    runs.append(current)
    return runs


def hough_segments(grid, params=None):
    """
    Extract line segments from a line grid.

    Random pairs of still-unexplained cells vote for the line through them.
    When a (angle, rho) bin reaches ``vote_threshold`` the line is refined by
    a total-least-squares fit over all cells within ``rho_resolution``, split
    at gaps longer than ``max_gap`` and every run with at least
    ``min_support`` cells becomes a segment. Cells of accepted runs stop
    taking part in sampling; they still count as support of later lines
    crossing them.

    Returns:
        list of Segment in egocentric meters
    """
    params = params or HoughParams()
    params.clean()
    points = grid.occupied()
    if len(points) < params.min_support:
        return []

    rng = substream(params.seed, 'perception', 0, 9)
    remaining = np.ones(len(points), dtype=bool)
    votes = {}
    segments = []
    rho_bins = params.rho_resolution

    for _ in range(params.max_iterations):
        candidates = np.flatnonzero(remaining)
        if len(candidates) < 2:
            break
        i, j = rng.choice(candidates, size=2, replace=False)
        d = points[j] - points[i]
        separation = math.hypot(d[0], d[1])
        if separation < max(params.min_pair_separation, 1e-9):
            continue
        direction = d / separation
        normal_angle = math.atan2(direction[0], -direction[1]) % math.pi
        normal = np.array([math.cos(normal_angle), math.sin(normal_angle)])
        rho = float(points[i] @ normal)
        key = (int(normal_angle / math.pi * params.angle_bins) % params.angle_bins,
               int(round(rho / rho_bins)))
        votes[key] = votes.get(key, 0) + 1
        if votes[key] < params.vote_threshold:
            continue
        del votes[key]

        centroid, carrier = points[i], direction
        inliers = _offsets(points, centroid, carrier) <= 1.5 * params.rho_resolution
        for _refine in range(2):
            if inliers.sum() < 2:
                break
            centroid, carrier = _fit_carrier(points[inliers])
            inliers = _offsets(points, centroid, carrier) <= params.rho_resolution
        if inliers.sum() < params.min_support:
            continue

        members = np.flatnonzero(inliers)
        t = (points[members] - centroid) @ carrier
        accepted = False
        for run in _runs(t, params.max_gap):
            run_members = members[run]
            fresh = remaining[run_members].sum()
            if len(run_members) < params.min_support or fresh * 2 < len(run_members):
                continue
            run_t = t[run]
            a = centroid + carrier * run_t.min()
            b = centroid + carrier * run_t.max()
            if np.allclose(a, b):
                continue
            segments.append(Segment(
                endpoints=(grid.to_ego(a[0], a[1]), grid.to_ego(b[0], b[1])),
                support=int(len(run_members)),
            ))
            remaining[run_members] = False
            accepted = True
        if accepted:
            votes.clear()
        if remaining.sum() < params.min_support:
            break

    logger.debug(f"Hough extracted {len(segments)} segments from {len(points)} cells")
    return segments


# =============================================================================
# MERGING
# =============================================================================

@dataclass(frozen=True)
class MergeTolerance:
    """Merge tolerances; distances in meters."""
    angle_tol: float = math.radians(5.0)
    gap_tol: float = 0.15
    offset_tol: float = 0.1

    def clean(self):
        for name in ('angle_tol', 'gap_tol', 'offset_tol'):
            if getattr(self, name) < 0:
                raise ConfigurationError(name, 'must be >= 0')


def _projection_gap(a, b):
    """Gap between two segments measured along a's carrier (0 when overlapping)."""
    origin = np.asarray(a.endpoints[0])
    direction = np.asarray(a.direction)
    ta = sorted(float((np.asarray(p) - origin) @ direction) for p in a.endpoints)
    tb = sorted(float((np.asarray(p) - origin) @ direction) for p in b.endpoints)
    return max(0.0, max(ta[0], tb[0]) - min(ta[1], tb[1]))


def _merged(a, b, tol):
    """Merged segment or None if some source endpoint strays from the new carrier."""
    points = np.array(list(a.endpoints) + list(b.endpoints))
    weights = np.repeat([a.support, b.support], 2).astype(float)
    centroid = (points * weights[:, None]).sum(axis=0) / weights.sum()
    centered = (points - centroid) * np.sqrt(weights)[:, None]
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    direction = vt[0]
    if direction[0] < 0 or (direction[0] == 0 and direction[1] < 0):
        direction = -direction
    sources = a.sources + b.sources
    source_points = np.array(sources)
    if np.any(_offsets(source_points, centroid, direction) > tol.offset_tol):
        return None
    t = (points - centroid) @ direction
    start = centroid + direction * t.min()
    end = centroid + direction * t.max()
    return Segment(endpoints=(tuple(start), tuple(end)), support=a.support + b.support, sources=sources)


def merge_segments(segments, tol=None):
    """
    Join collinear, near-adjacent segments until no pair qualifies.

    Two segments merge when their angles differ by at most ``angle_tol``,
    every endpoint lies within ``offset_tol`` of the other's carrier, the
    gap between them is at most ``gap_tol``, and all original endpoints stay
    within ``offset_tol`` of the merged carrier.
    """
    tol = tol or MergeTolerance()
    tol.clean()
    items = list(segments)

    changed = True
    while changed:
        changed = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                a, b = items[i], items[j]
                if angle_difference(a.angle, b.angle) > tol.angle_tol:
                    continue
                if any(a.offset_of(p) > tol.offset_tol for p in b.endpoints):
                    continue
                if any(b.offset_of(p) > tol.offset_tol for p in a.endpoints):
                    continue
                if _projection_gap(a, b) > tol.gap_tol:
                    continue
                merged = _merged(a, b, tol)
                if merged is None:
                    continue
                items[i] = merged
                del items[j]
                changed = True
                break
            if changed:
                break
    return items
