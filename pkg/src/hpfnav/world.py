"""Ground-truth world: obstacle geometry, the front ultrasonic beam and clearance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .vehicle import Pose, VehicleParams

S_MAX = 2.55
MIN_READING = 0.02

Circle = tuple[tuple[float, float], float]
Segment = tuple[tuple[float, float], tuple[float, float]]


@dataclass
class World:
    circles: list[Circle] = field(default_factory=list)
    segments: list[Segment] = field(default_factory=list)
    bounds: tuple[float, float, float, float] | None = None  # xmin, ymin, xmax, ymax
    solid_bounds: bool = True

    def __post_init__(self):
        self.circles = [((float(c[0][0]), float(c[0][1])), float(c[1])) for c in self.circles]
        self.segments = [((float(a[0]), float(a[1])), (float(b[0]), float(b[1])))
                         for a, b in self.segments]
        for _, r in self.circles:
            if not r > 0:
                raise ConfigurationError("circle radius must be positive")
        self._circ = np.array([[c[0], c[1], r] for c, r in self.circles], dtype=float).reshape(-1, 3)
        segs = list(self.segments)
        if self.bounds is not None and self.solid_bounds:
            x0, y0, x1, y1 = self.bounds
            segs += [((x0, y0), (x1, y0)), ((x1, y0), (x1, y1)),
                     ((x1, y1), (x0, y1)), ((x0, y1), (x0, y0))]
        self._segs = np.array([[a[0], a[1], b[0], b[1]] for a, b in segs], dtype=float).reshape(-1, 4)

    def geometry_within_bounds(self) -> bool:
        if self.bounds is None:
            return True
        x0, y0, x1, y1 = self.bounds
        ok = all(x0 <= c[0] - r and c[0] + r <= x1 and y0 <= c[1] - r and c[1] + r <= y1
                 for c, r in self.circles)
        pts = [p for s in self.segments for p in s]
        return ok and all(x0 <= p[0] <= x1 and y0 <= p[1] <= y1 for p in pts)


@dataclass(frozen=True)
class SensorModel:
    s_max: float = S_MAX
    sigma: float = 0.0
    p_drop: float = 0.0
    p_spur: float = 0.0
    omega_spur: float = 0.5
    spur_range: tuple[float, float] = (0.4, 1.5)

    def __post_init__(self):
        for name in ("p_drop", "p_spur"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {p!r}")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be non-negative")
        lo, hi = self.spur_range
        if not 0 < lo <= hi <= self.s_max:
            raise ConfigurationError("spur_range must satisfy 0 < lo <= hi <= s_max")


SENSOR_PRESETS = {
    "noiseless": SensorModel(),
    "paper-like": SensorModel(sigma=0.02, p_drop=0.5, p_spur=0.15, omega_spur=0.5),
}


@dataclass(frozen=True)
class SensorReading:
    value: float
    saturated: bool = False
    dropped: bool = False
    t: float = 0.0

    @property
    def live(self) -> bool:
        return not (self.dropped or self.saturated)


def _sensor_ray(pose: Pose, params: VehicleParams) -> tuple[float, float, float, float]:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return pose.x + params.body_radius * c, pose.y + params.body_radius * s, c, s


def ray_distance(world: World, ox: float, oy: float, dx: float, dy: float) -> float:
    """Distance along the unit ray to the nearest surface, ``inf`` if none."""
    best = math.inf
    for cx, cy, r in world._circ:
        fx, fy = ox - cx, oy - cy
        c = fx * fx + fy * fy - r * r
        if c <= 0:
            return 0.0
        b = fx * dx + fy * dy
        disc = b * b - c
        if disc < 0 or b >= 0:
            continue
        t = -b - math.sqrt(disc)
        if 0 < t < best:
            best = t
    for ax, ay, bx, by in world._segs:
        ex, ey = bx - ax, by - ay
        denom = dx * ey - dy * ex
        if denom == 0:
            continue
        wx, wy = ax - ox, ay - oy
        t = (wx * ey - wy * ex) / denom
        u = (wx * dy - wy * dx) / denom
        if t > 0 and 0 <= u <= 1 and t < best:
            best = t
    return best


def raycast_ultrasonic(world: World, true_pose: Pose, params: VehicleParams,
                       model: SensorModel = SENSOR_PRESETS["noiseless"]) -> float:
    """Ideal range from the front sensor; ``model.s_max`` when nothing is in range."""
    ox, oy, dx, dy = _sensor_ray(true_pose, params)
    return min(ray_distance(world, ox, oy, dx, dy), model.s_max)


def degrade(ideal: float, model: SensorModel, omega_true: float,
            rng: np.random.Generator, t: float = 0.0) -> SensorReading:
    """Apply dropout, turn-induced spurious echoes and Gaussian noise.

    Four draws are consumed on every call, in a fixed order, so the stream
    stays aligned regardless of which branch is taken.
    """
    u_drop, u_spur, u_val = rng.random(3)
    noise = rng.standard_normal()
    if u_drop < model.p_drop:
        return SensorReading(model.s_max, False, True, t)
    if abs(omega_true) > model.omega_spur and u_spur < model.p_spur:
        lo, hi = model.spur_range
        return SensorReading(lo + (hi - lo) * u_val, False, False, t)
    if ideal >= model.s_max:
        return SensorReading(model.s_max, True, False, t)
    value = ideal + model.sigma * noise
    if value >= model.s_max:
        return SensorReading(model.s_max, True, False, t)
    return SensorReading(max(value, MIN_READING), False, False, t)


class UltrasonicSensor:
    """Front ultrasonic sensor with its own seeded random stream."""

    def __init__(self, model: SensorModel, seed: int):
        self.model = model
        self.rng = np.random.default_rng(seed)

    def read(self, world: World, true_pose: Pose, params: VehicleParams,
             omega_true: float, t: float) -> tuple[float, SensorReading]:
        ideal = raycast_ultrasonic(world, true_pose, params, self.model)
        return ideal, degrade(ideal, self.model, omega_true, self.rng, t)


def min_clearance(world: World, true_pose: Pose, params: VehicleParams) -> float:
    """Gap between the robot body and the nearest surface; negative means overlap."""
    px, py = true_pose.x, true_pose.y
    best = math.inf
    if len(world._circ):
        c = world._circ
        best = float(np.min(np.hypot(c[:, 0] - px, c[:, 1] - py) - c[:, 2]))
    if len(world._segs):
        s = world._segs
        ax, ay = s[:, 0], s[:, 1]
        ex, ey = s[:, 2] - ax, s[:, 3] - ay
        ll = ex * ex + ey * ey
        u = np.clip(((px - ax) * ex + (py - ay) * ey) / np.where(ll > 0, ll, 1.0), 0.0, 1.0)
        d = np.hypot(ax + u * ex - px, ay + u * ey - py)
        best = min(best, float(d.min()))
    if world.bounds is not None and world.solid_bounds:
        x0, y0, x1, y1 = world.bounds
        inside = min(px - x0, x1 - px, py - y0, y1 - py)
        if inside < 0:
            return inside - params.body_radius
    return best - params.body_radius
