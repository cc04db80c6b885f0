"""Closed-loop mission: sense, register, re-solve, guide, control, move.

The control loop runs at ``dt_ctrl`` over a faster physics loop that holds
wheel commands constant between ticks.  Each tick:

1. sample the front sensor at the true pose,
2. advance the dead-reckoned pose with the wheel speeds of the last interval,
3. register a live, unsaturated return and locally re-solve the potential,
4. evaluate guidance at the believed pose and compute the wheel commands,
5. integrate the true pose to the next tick.

A robot that stops short of the target triggers a full re-solve; if stalls
persist the beliefs are reset, and after that the mission is declared stuck.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .control import ControlCommand, ControllerParams, actuation, command, heading_error
from .errors import ConfigurationError, InvalidScenarioError, InvalidTargetError
from .grid import SafetyGrid, free_component, init_grid, is_connected, mark_cells, register_detection, reset_beliefs, world_to_cell
from .guidance import guidance_at
from .odometry import OdometryState, update_odometry
from .solver import DEFAULT_MARGIN, PotentialField, solve_full, update_local
from .vehicle import SteeringCommand, VehicleParams, WheelSpeeds, body_twist, step_kinematics
from .world import SENSOR_PRESETS, SensorModel, UltrasonicSensor, World, min_clearance

if TYPE_CHECKING:
    from .scenario import Scenario


class Status(str, enum.Enum):
    SUCCESS = "SUCCESS"
    TIMEOUT = "TIMEOUT"
    STUCK = "STUCK"
    COLLISION = "COLLISION"


@dataclass(frozen=True)
class MissionConfig:
    N: int = 129
    D: float = 8.0
    map_center: tuple[float, float] | None = None
    controller: ControllerParams = ControllerParams()
    vehicle: VehicleParams = VehicleParams()
    sensor: SensorModel = SENSOR_PRESETS["noiseless"]
    dt_phys: float = 0.01
    dt_ctrl: float = 1 / 7
    eps_goal: float | None = None
    v_stall: float = 0.02
    T_stall: float = 3.0
    max_full_recomputes: int = 2
    max_resets: int = 1
    t_max: float = 300.0
    modulation: bool = True
    sensing: bool = True
    inflation: int = 2
    delta_angle: float = 0.0
    apriori_margin: float | None = None
    wheel_noise: float = 0.0
    solver_tol: float = 1e-9
    omega_relax: float = 1.8
    window_margin: int = DEFAULT_MARGIN

    def __post_init__(self):
        if not 0 < self.dt_phys <= self.dt_ctrl:
            raise ConfigurationError("need 0 < dt_phys <= dt_ctrl")
        if self.eps_goal is not None and not self.eps_goal > 0:
            raise ConfigurationError("eps_goal must be positive")
        if self.inflation < 0:
            raise ConfigurationError("inflation must be non-negative")
        if self.t_max <= 0 or self.T_stall <= 0:
            raise ConfigurationError("t_max and T_stall must be positive")

    @property
    def delta(self) -> float:
        return self.D / self.N

    @property
    def goal_radius(self) -> float:
        return self.delta if self.eps_goal is None else self.eps_goal


@dataclass
class MissionResult:
    status: Status
    trip_time: float
    path_length: float
    K: float
    min_clearance: float
    hazard_cells: int
    sensor_availability: float
    full_recomputes: int
    resets: int
    final_true_dst: float = math.nan
    final_believed_dst: float = math.nan
    target_reachable: bool | None = None
    seed: int = 0
    scenario: str = ""

    def summary(self) -> dict[str, object]:
        out = asdict(self)
        out["status"] = self.status.value
        return out


@dataclass(frozen=True)
class TraceRecord:
    t: float
    true_x: float
    true_y: float
    true_theta: float
    bel_x: float
    bel_y: float
    bel_theta: float
    s_value: float
    s_saturated: bool
    s_dropped: bool
    eta_d: float
    eta_c: float
    dst: float
    v_c: float
    omega_c: float
    wheel_a: float
    wheel_b: float
    clearance: float
    field_update: str


TRACE_COLUMNS = [f.name for f in fields(TraceRecord)]


@dataclass
class MissionRun:
    result: MissionResult
    trace: list[TraceRecord]
    field: PotentialField
    grid: SafetyGrid
    world: World
    target: tuple[float, float]


def _wheel_pair(u) -> tuple[float, float]:
    if isinstance(u, WheelSpeeds):
        return u.omega_R, u.omega_L
    return u.omega_h, u.phi


def _zero_actuation(vehicle: VehicleParams):
    return WheelSpeeds(0.0, 0.0) if vehicle.kind == "differential" else SteeringCommand(0.0, 0.0)


def _noisy(u, sigma: float, rng: np.random.Generator):
    a, b = rng.standard_normal(2)
    if sigma == 0.0:
        return u
    if isinstance(u, WheelSpeeds):
        return WheelSpeeds(u.omega_R * (1 + sigma * a), u.omega_L * (1 + sigma * b))
    return SteeringCommand(u.omega_h * (1 + sigma * a), u.phi)


def rasterize_obstacles(grid: SafetyGrid, circles, segments, margin: float) -> np.ndarray:
    """Cells whose centre lies within ``margin`` of any given circle or segment."""
    n = grid.N
    idx = (np.arange(n) + 0.5) * grid.delta - grid.D / 2
    X = idx[:, None] + grid.center[0]
    Y = idx[None, :] + grid.center[1]
    mask = np.zeros((n, n), dtype=bool)
    for (cx, cy), r in circles:
        mask |= np.hypot(X - cx, Y - cy) <= r + margin
    for (ax, ay), (bx, by) in segments:
        ex, ey = bx - ax, by - ay
        ll = ex * ex + ey * ey
        u = np.clip(((X - ax) * ex + (Y - ay) * ey) / (ll if ll > 0 else 1.0), 0.0, 1.0)
        mask |= np.hypot(ax + u * ex - X, ay + u * ey - Y) <= margin
    return mask


def mission_grid(scenario: "Scenario", config: MissionConfig) -> SafetyGrid:
    """Initial belief grid, centred between start and target, with a-priori data."""
    if config.map_center is not None:
        center = config.map_center
    else:
        center = ((scenario.start.x + scenario.target[0]) / 2, (scenario.start.y + scenario.target[1]) / 2)
    grid = init_grid(config.N, config.D, center)
    _apply_apriori(grid, scenario, config)
    return grid


def _apply_apriori(grid: SafetyGrid, scenario: "Scenario", config: MissionConfig) -> None:
    if scenario.apriori_circles or scenario.apriori_segments:
        margin = config.vehicle.body_radius if config.apriori_margin is None else config.apriori_margin
        mask = rasterize_obstacles(grid, scenario.apriori_circles, scenario.apriori_segments, margin)
        mark_cells(grid, mask)


def mission_world(scenario: "Scenario", grid: SafetyGrid) -> World:
    h = grid.D / 2
    cx, cy = grid.center
    return World(list(scenario.circles), list(scenario.segments), (cx - h, cy - h, cx + h, cy + h))


def simulate(scenario: "Scenario", config: MissionConfig, seed: int | None = None) -> MissionRun:
    seed = scenario.seed if seed is None else int(seed)
    grid = mission_grid(scenario, config)
    world = mission_world(scenario, grid)
    target = (float(scenario.target[0]), float(scenario.target[1]))
    if not grid.contains(*target):
        raise InvalidScenarioError(f"target {target} lies outside the map square")
    target_cell = world_to_cell(grid, *target)
    start = scenario.start
    if min_clearance(world, start, config.vehicle) <= 0:
        raise InvalidScenarioError("start pose is in collision")
    try:
        fld = solve_full(grid, target_cell, config.solver_tol, config.omega_relax)
    except InvalidTargetError as exc:
        raise InvalidScenarioError(f"target cell blocked in the initial belief: {exc}") from exc

    sensor_seed, wheel_seed = np.random.SeedSequence(seed).spawn(2)
    sensor = UltrasonicSensor(config.sensor, sensor_seed)
    wheel_rng = np.random.default_rng(wheel_seed)
    vehicle, ctrl = config.vehicle, config.controller
    eps = config.goal_radius
    tol, omega_r = config.solver_tol, config.omega_relax

    n_sub = max(1, math.ceil(config.dt_ctrl / config.dt_phys - 1e-9))
    h = config.dt_ctrl / n_sub

    odo = OdometryState(start, config.dt_ctrl)
    true = start
    wheels = _zero_actuation(vehicle)
    trace: list[TraceRecord] = []
    path = 0.0
    lowest = min_clearance(world, true, vehicle)
    hazard = full = resets = live_ticks = ticks = 0
    stall_time = iso_time = 0.0
    reach = free_component(grid, target_cell)
    collided = False
    status: Status | None = None
    reachable: bool | None = None
    k = 0
    straight = math.hypot(target[0] - start.x, target[1] - start.y)

    def full_solve() -> PotentialField:
        return solve_full(grid, target_cell, tol, omega_r)

    while True:
        t = k * config.dt_ctrl
        ticks += 1
        v_true, w_true = body_twist(wheels, vehicle)
        _, reading = sensor.read(world, true, vehicle, w_true, t)
        if not reading.dropped:
            live_ticks += 1

        measured = _noisy(wheels, config.wheel_noise, wheel_rng)
        if k > 0:
            odo = update_odometry(odo, measured, vehicle)
        believed = odo.believed_pose
        v_bel = body_twist(measured, vehicle)[0]

        update = ""
        if config.sensing and reading.live:
            keep = (target_cell, world_to_cell(grid, believed.x, believed.y))
            patch = register_detection(grid, believed, reading.value, vehicle.W,
                                       config.inflation, config.delta_angle, keep_free=keep)
            if patch:
                hazard += len(patch)
                fld = update_local(fld, grid, patch, tol, config.window_margin)
                reach = free_component(grid, target_cell)
                update = "local"

        E = guidance_at(fld, grid, believed.x, believed.y)
        err = heading_error(E, believed, target)

        stall_time = stall_time + config.dt_ctrl if abs(v_bel) < config.v_stall and k > 0 else 0.0
        # a free believed cell outside the target's component sees a flat field
        here = world_to_cell(grid, believed.x, believed.y)
        iso_time = iso_time + config.dt_ctrl if grid.cells[here] == 0 and not reach[here] else 0.0
        isolated = iso_time >= config.T_stall
        if err.dst > eps and (stall_time >= config.T_stall or isolated):
            stall_time = iso_time = 0.0
            if full < config.max_full_recomputes and not isolated:
                fld = full_solve()
                full += 1
                update = "full"
            elif resets < config.max_resets:
                reset_beliefs(grid)
                _apply_apriori(grid, scenario, config)
                fld = full_solve()
                reach = free_component(grid, target_cell)
                resets += 1
                update = "reset"
            else:
                reachable = is_connected(grid, world_to_cell(grid, believed.x, believed.y), target_cell)
                status = Status.STUCK
            E = guidance_at(fld, grid, believed.x, believed.y)
            err = heading_error(E, believed, target)

        done = err.dst <= eps or status is not None
        cmd = ControlCommand(0.0, 0.0) if done else command(err, ctrl, config.modulation)
        if vehicle.kind == "car" and cmd.v_c == 0.0:
            cmd = ControlCommand(0.0, 0.0)
        wheels = actuation(cmd, vehicle)
        wa, wb = _wheel_pair(wheels)
        trace.append(TraceRecord(
            t, true.x, true.y, true.theta, believed.x, believed.y, believed.theta,
            reading.value, reading.saturated, reading.dropped,
            err.eta_d, err.eta_c, err.dst, cmd.v_c, cmd.omega_c, wa, wb,
            min_clearance(world, true, vehicle), update))
        if err.dst <= eps and status is None:
            status = Status.SUCCESS
        if status is not None:
            break
        if t >= config.t_max:
            status = Status.TIMEOUT
            break

        v, w = body_twist(wheels, vehicle)
        for _ in range(n_sub):
            nxt = step_kinematics(true, v, w, h)
            path += math.hypot(nxt.x - true.x, nxt.y - true.y)
            true = nxt
            c = min_clearance(world, true, vehicle)
            if c < lowest:
                lowest = c
            if c < 0:
                collided = True
        k += 1

    if collided:
        status = Status.COLLISION
    final_bel = trace[-1].dst
    result = MissionResult(
        status=status,
        trip_time=trace[-1].t,
        path_length=path,
        K=path / straight if straight > 0 else math.nan,
        min_clearance=lowest,
        hazard_cells=hazard,
        sensor_availability=live_ticks / ticks,
        full_recomputes=full,
        resets=resets,
        final_true_dst=math.hypot(target[0] - true.x, target[1] - true.y),
        final_believed_dst=final_bel,
        target_reachable=reachable,
        seed=seed,
        scenario=scenario.name,
    )
    return MissionRun(result, trace, fld, grid, world, target)


def run_mission(scenario: "Scenario", config: MissionConfig, seed: int | None = None
                ) -> tuple[MissionResult, list[TraceRecord]]:
    run = simulate(scenario, config, seed)
    return run.result, run.trace


VARIANTS = ("apriori", "sensor-only", "modulated", "constant")


def variant_inputs(scenario: "Scenario", config: MissionConfig, variant: str):
    """Scenario/config pair for one named comparison variant."""
    if variant == "apriori":
        sc = scenario if scenario.apriori_circles or scenario.apriori_segments else replace(
            scenario, apriori_circles=list(scenario.circles), apriori_segments=list(scenario.segments))
        return sc, replace(config, sensing=False)
    if variant == "sensor-only":
        return replace(scenario, apriori_circles=[], apriori_segments=[]), replace(config, sensing=True)
    if variant == "modulated":
        return scenario, replace(config, modulation=True)
    if variant == "constant":
        return scenario, replace(config, modulation=False)
    raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")


def run_ab_comparison(scenario: "Scenario", config: MissionConfig, seed: int | None,
                      variants: Sequence[str]) -> list[dict[str, object]]:
    """Run each variant on the same scenario and seed; one row per variant."""
    rows = []
    for name in variants:
        sc, cfg = variant_inputs(scenario, config, name)
        res, _ = run_mission(sc, cfg, seed)
        rows.append({"variant": name, "status": res.status.value, "trip_time": res.trip_time,
                     "K": res.K, "hazard_cells": res.hazard_cells,
                     "min_clearance": res.min_clearance})
    return rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trace_csv(trace: Iterable[TraceRecord], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for rec in trace:
            w.writerow([_fmt(getattr(rec, c)) for c in TRACE_COLUMNS])
    return path


def write_summary(result: MissionResult, path: str | Path) -> Path:
    path = Path(path)
    lines = [f"{k}={_fmt(v)}" for k, v in result.summary().items()]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path
