"""
Obstacle avoidance by velocity shaping.

For the nearest obstacle inside the influence radius the command is
slowed down and turned away from the obstacle, or toward the detour side
when one is given. Its linear velocity is rotated until the component
toward the obstacle is at most the radial cap. The cap shrinks linearly with proximity and turns negative inside
``d_repel``, which pushes the robot away. It never asks for more retreat
than the input speed allows.
"""

from dataclasses import dataclass
import math

from field.geometry import normalize_angle
from simulation.state import VelocityCommand

from .params import BehaviorParams


@dataclass(frozen=True)
class AvoidanceReport:
    """What the avoidance step saw and applied; logged with every command."""
    distance: float = None
    bearing: float = None
    cap: float = None
    in_speed: float = 0.0
    axis_only: bool = False

    @property
    def active(self):
        return self.distance is not None


def nearest_obstacle(obstacles, params):
    """Nearest egocentric cluster within the influence radius, or None."""
    best = None
    for cluster in obstacles:
        position = getattr(cluster, 'position', cluster)
        d = math.hypot(position[0], position[1])
        if d <= params.influence_radius and (best is None or d < best[0]):
            best = (d, position)
    return best


def effective_cap(params, distance, bearing, in_speed, axis_only=False):
    """
    Radial cap actually enforced: the cap function, floored at the largest
    retreat reachable without exceeding ``in_speed``.
    """
    reachable = in_speed * (abs(math.cos(bearing)) if axis_only else 1.0)
    return max(params.cap(distance), -reachable)


def radial_component(vx, vy, bearing):
    return vx * math.cos(bearing) + vy * math.sin(bearing)


def _blocks(position, waypoint, clearance):
    """True when the straight walk to ``waypoint`` passes within ``clearance`` of ``position``."""
    length = math.hypot(waypoint[0], waypoint[1])
    if length < 1e-9 or math.hypot(waypoint[0] - position[0], waypoint[1] - position[1]) < clearance:
        return False
    ux, uy = waypoint[0] / length, waypoint[1] / length
    along = position[0] * ux + position[1] * uy
    across = -position[0] * uy + position[1] * ux
    return 0.0 < along < length + clearance and abs(across) < clearance


def detour_waypoint(waypoint, obstacles, params=None):
    """
    Reroute a forward walk around the nearest blocking obstacle.

    The detour aims at the tangent point of the clearance circle around the
    obstacle on the side of the original waypoint; from inside that circle
    it heads along the circle. Obstacles outside the influence radius never
    block.

    Returns:
        (waypoint, side): the original waypoint and None when nothing
        blocks, otherwise the detour point and +1 (pass on the left) or -1
    """
    params = params or BehaviorParams()
    blocking = None
    for cluster in obstacles:
        position = getattr(cluster, 'position', cluster)
        d = math.hypot(position[0], position[1])
        if d > params.influence_radius or not _blocks(position, waypoint, params.detour_clearance):
            continue
        if blocking is None or d < blocking[0]:
            blocking = (d, position)
    if blocking is None:
        return waypoint, None

    d, position = blocking
    bearing = math.atan2(position[1], position[0])
    offset = normalize_angle(math.atan2(waypoint[1], waypoint[0]) - bearing)
    if abs(offset) > 1e-9:
        side = 1.0 if offset > 0 else -1.0
    else:
        side = -1.0 if bearing > 0 else 1.0
    if d > params.detour_clearance:
        angle = math.asin(params.detour_clearance / d)
        reach = math.sqrt(d * d - params.detour_clearance ** 2)
    else:
        angle, reach = math.pi / 2, params.detour_clearance
    heading = bearing + side * angle
    return (reach * math.cos(heading), reach * math.sin(heading)), side


def avoid_obstacle(cmd, obstacles, params=None, axis_only=False, pass_side=None):
    """
    Shape ``cmd`` around the nearest obstacle.

    Args:
        cmd: VelocityCommand in the robot frame
        obstacles: egocentric ObstacleClusters (or bare points)
        params: BehaviorParams
        axis_only: only scale vx and keep vy untouched (far approach)
        pass_side: +1 or -1 turns toward that side instead of away from
            the obstacle

    Returns:
        (VelocityCommand, AvoidanceReport)
    """
    params = params or BehaviorParams()
    in_speed = cmd.speed
    nearest = nearest_obstacle(obstacles, params)
    if nearest is None:
        return cmd, AvoidanceReport(in_speed=in_speed, axis_only=axis_only)

    distance, position = nearest
    bearing = math.atan2(position[1], position[0])
    cap = effective_cap(params, distance, bearing, in_speed, axis_only)
    proximity = (params.influence_radius - distance) / params.influence_radius
    slowdown = max(params.min_slowdown, 1.0 - (1.0 - params.min_slowdown) * proximity)

    vx, vy = cmd.vx * slowdown, cmd.vy * slowdown
    if axis_only:
        c = math.cos(bearing)
        if abs(c) > 1e-9 and vx * c > cap:
            vx = cap / c
    else:
        speed = math.hypot(vx, vy)
        if cap < 0:
            speed = max(speed, -cap)
        radial = radial_component(vx, vy, bearing)
        if radial > cap or (cap < 0 and speed > math.hypot(vx, vy)):
            tangential = -vx * math.sin(bearing) + vy * math.cos(bearing)
            side = 1.0 if tangential > 0 else -1.0 if tangential < 0 else (-1.0 if bearing > 0 else 1.0)
            t = side * math.sqrt(max(0.0, speed * speed - cap * cap))
            vx = cap * math.cos(bearing) - t * math.sin(bearing)
            vy = cap * math.sin(bearing) + t * math.cos(bearing)

    away = pass_side if pass_side is not None else (-1.0 if bearing > 0 else 1.0)
    omega = cmd.omega + away * params.avoid_turn_gain * proximity
    omega = min(params.omega_max, max(-params.omega_max, omega))
    report = AvoidanceReport(distance, bearing, cap, in_speed, axis_only)
    return VelocityCommand(vx, vy, omega, cmd.trigger), report
