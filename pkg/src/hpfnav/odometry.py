"""Naive dead reckoning: integrate wheel-derived body twist, no filtering."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError
from .vehicle import Actuation, Pose, VehicleParams, body_twist, step_kinematics


@dataclass(frozen=True)
class OdometryState:
    believed_pose: Pose = Pose()
    dt_ctrl: float = 1 / 7

    def __post_init__(self):
        if not self.dt_ctrl > 0:
            raise ConfigurationError("dt_ctrl must be positive")


def update_odometry(state: OdometryState, measured_wheels: Actuation,
                    params: VehicleParams) -> OdometryState:
    v, omega = body_twist(measured_wheels, params)
    if v == 0.0 and omega == 0.0:
        return state
    return OdometryState(step_kinematics(state.believed_pose, v, omega, state.dt_ctrl),
                         state.dt_ctrl)
