"""Planar kinematics for differential-drive and car-like robots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

from .errors import ConfigurationError


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.remainder(a, 2 * math.pi)
    if a <= -math.pi:
        a += 2 * math.pi
    return a


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class VehicleParams:
    kind: Literal["differential", "car"] = "differential"
    r: float = 0.085
    W: float = 0.35
    L: float = 0.30
    body_radius: float | None = 0.20
    phi_max: float = 0.6

    def __post_init__(self):
        if self.kind not in ("differential", "car"):
            raise ConfigurationError(f"unknown vehicle kind {self.kind!r}")
        if self.body_radius is None:
            object.__setattr__(self, "body_radius", self.W / 2)
        for name in ("r", "W", "L", "body_radius", "phi_max"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"vehicle parameter {name} must be positive")


@dataclass(frozen=True)
class WheelSpeeds:
    """Right/left wheel angular speeds of a differential drive, rad/s."""
    omega_R: float
    omega_L: float


@dataclass(frozen=True)
class SteeringCommand:
    """Drive-wheel speed (rad/s) and steering angle (rad) of a car-like robot."""
    omega_h: float
    phi: float


Actuation = Union[WheelSpeeds, SteeringCommand]


def body_twist(u: Actuation, p: VehicleParams) -> tuple[float, float]:
    """Wheel-space input -> (v, omega) body twist."""
    if isinstance(u, WheelSpeeds):
        return p.r * (u.omega_R + u.omega_L) / 2, p.r * (u.omega_R - u.omega_L) / p.W
    v = p.r * u.omega_h
    return v, math.tan(u.phi) * v / p.L


def step_kinematics(pose: Pose, v: float, omega: float, dt: float) -> Pose:
    """One explicit Euler step of the unicycle model."""
    return Pose(pose.x + dt * v * math.cos(pose.theta),
                pose.y + dt * v * math.sin(pose.theta),
                pose.theta + dt * omega)
