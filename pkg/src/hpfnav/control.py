"""Velocity-synchronisation controller.

Turns the guidance direction into a body twist: the angular command steers
the heading onto the guidance vector, and the tangential command is reduced
when the two disagree (zero when antipodal) and when the target is close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, SingularActuationError
from .guidance import GuidanceVector
from .vehicle import Pose, SteeringCommand, VehicleParams, WheelSpeeds, wrap_angle


@dataclass(frozen=True)
class ControllerParams:
    v_d: float = 0.4
    omega_d: float = 1.5
    R_c: float = 0.5

    def __post_init__(self):
        for name in ("v_d", "omega_d", "R_c"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"controller parameter {name} must be positive")


@dataclass(frozen=True)
class HeadingError:
    eta_d: float
    eta_c: float
    dst: float


@dataclass(frozen=True)
class ControlCommand:
    v_c: float
    omega_c: float


def heading_error(E: GuidanceVector, believed_pose: Pose, target: tuple[float, float]) -> HeadingError:
    # guidance angle minus heading: this sign makes omega_c = omega_d * sin(.) stabilising
    dtheta = wrap_angle(math.atan2(E.ey, E.ex) - believed_pose.theta)
    dst = math.hypot(target[0] - believed_pose.x, target[1] - believed_pose.y)
    return HeadingError(math.cos(dtheta), math.sin(dtheta), dst)


def angular_command(err: HeadingError, params: ControllerParams) -> float:
    if err.eta_d >= 0:
        return params.omega_d * err.eta_c
    return params.omega_d if err.eta_c >= 0 else -params.omega_d


def tangential_command(err: HeadingError, omega_c: float, params: ControllerParams,
                       modulated: bool = True) -> float:
    """Tangential speed; with ``modulated=False`` it is the constant ``v_d``."""
    if not modulated:
        return params.v_d
    if err.eta_d < 0:
        heading = (err.eta_d + 1) / 2
    else:
        heading = 1 - abs(omega_c / params.omega_d) / 2
    approach = min(1.0, err.dst / params.R_c)
    return params.v_d * heading * approach


def command(err: HeadingError, params: ControllerParams, modulated: bool = True) -> ControlCommand:
    w = angular_command(err, params)
    return ControlCommand(tangential_command(err, w, params, modulated), w)


def actuation(cmd: ControlCommand, model: VehicleParams) -> WheelSpeeds | SteeringCommand:
    """Invert the wheel-to-twist map for the configured vehicle."""
    r = model.r
    if model.kind == "differential":
        spin = model.W * cmd.omega_c / (2 * r)
        return WheelSpeeds(cmd.v_c / r + spin, cmd.v_c / r - spin)
    if cmd.v_c == 0:
        if cmd.omega_c != 0:
            raise SingularActuationError("car-like vehicle cannot turn in place")
        return SteeringCommand(0.0, 0.0)
    phi = math.atan(cmd.omega_c * model.L / cmd.v_c)
    phi = max(-model.phi_max, min(model.phi_max, phi))
    return SteeringCommand(cmd.v_c / r, phi)
