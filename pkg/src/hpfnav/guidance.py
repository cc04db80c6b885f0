"""Continuous guidance direction E(X) = -grad V / |grad V| from a grid potential."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .grid import SafetyGrid
from .solver import PotentialField

FLAT_FLOOR = 1e-30


@dataclass(frozen=True)
class GuidanceVector:
    ex: float
    ey: float
    flat: bool = False

    @property
    def angle(self) -> float:
        return math.atan2(self.ey, self.ex)


def _axis_derivative(V, blocked, i, j, di, dj, n, delta):
    """Derivative along one axis at cell (i, j); one-sided beside blocked cells."""
    me_blocked = blocked[i, j]
    ai, aj = i + di, j + dj
    bi, bj = i - di, j - dj
    fwd = 0 <= ai < n and 0 <= aj < n and (me_blocked or not blocked[ai, aj])
    back = 0 <= bi < n and 0 <= bj < n and (me_blocked or not blocked[bi, bj])
    if fwd and back:
        return (V[ai, aj] - V[bi, bj]) / (2 * delta)
    if fwd:
        return (V[ai, aj] - V[i, j]) / delta
    if back:
        return (V[i, j] - V[bi, bj]) / delta
    return 0.0


def cell_gradient(field: PotentialField, grid: SafetyGrid, i: int, j: int) -> tuple[float, float]:
    V = field.values
    blocked = grid.cells
    n, d = grid.N, grid.delta
    return (_axis_derivative(V, blocked, i, j, 1, 0, n, d),
            _axis_derivative(V, blocked, i, j, 0, 1, n, d))


def _center_coords(grid: SafetyGrid, x: float, y: float) -> tuple[int, int, float, float]:
    """Lower-left cell of the interpolation stencil and fractional offsets."""
    h = grid.D / 2
    x = min(max(x, grid.center[0] - h), grid.center[0] + h)
    y = min(max(y, grid.center[1] - h), grid.center[1] + h)
    u = (x - grid.center[0] + h) / grid.delta - 0.5
    w = (y - grid.center[1] + h) / grid.delta - 0.5
    i0 = min(max(math.floor(u), 0), grid.N - 2)
    j0 = min(max(math.floor(w), 0), grid.N - 2)
    fx = min(max(u - i0, 0.0), 1.0)
    fy = min(max(w - j0, 0.0), 1.0)
    return i0, j0, fx, fy


def raw_gradient(field: PotentialField, grid: SafetyGrid, x: float, y: float) -> tuple[float, float]:
    """Bilinear blend of the cell-centred gradients around ``(x, y)``."""
    i0, j0, fx, fy = _center_coords(grid, x, y)
    gx = gy = 0.0
    for di, wx in ((0, 1.0 - fx), (1, fx)):
        for dj, wy in ((0, 1.0 - fy), (1, fy)):
            w = wx * wy
            if w == 0.0:
                continue
            cx, cy = cell_gradient(field, grid, i0 + di, j0 + dj)
            gx += w * cx
            gy += w * cy
    return gx, gy


def interpolate_potential(field: PotentialField, grid: SafetyGrid, x: float, y: float) -> float:
    """Bilinear interpolation of V between cell centres."""
    i0, j0, fx, fy = _center_coords(grid, x, y)
    V = field.values
    return float((1 - fx) * (1 - fy) * V[i0, j0] + fx * (1 - fy) * V[i0 + 1, j0]
                 + (1 - fx) * fy * V[i0, j0 + 1] + fx * fy * V[i0 + 1, j0 + 1])


def guidance_at(field: PotentialField, grid: SafetyGrid, x: float, y: float) -> GuidanceVector:
    gx, gy = raw_gradient(field, grid, x, y)
    mag = math.hypot(gx, gy)
    if mag < FLAT_FLOOR:
        tx, ty = grid.cell_center(*field.target_cell)
        dx, dy = tx - x, ty - y
        dist = math.hypot(dx, dy)
        if dist == 0.0:
            return GuidanceVector(1.0, 0.0, True)
        return GuidanceVector(dx / dist, dy / dist, True)
    return GuidanceVector(-gx / mag, -gy / mag, False)


def sample_guidance(field: PotentialField, grid: SafetyGrid, stride: int = 4) -> list[tuple[float, float, float, float]]:
    """(x, y, ex, ey) at the centres of every ``stride``-th free cell."""
    rows = []
    for i in range(1, grid.N - 1, stride):
        for j in range(1, grid.N - 1, stride):
            if grid.cells[i, j]:
                continue
            x, y = grid.cell_center(i, j)
            g = guidance_at(field, grid, x, y)
            rows.append((x, y, g.ex, g.ey))
    return rows


def write_guidance_csv(field: PotentialField, grid: SafetyGrid, path: str | Path,
                       stride: int = 4) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "ex", "ey"])
        for row in sample_guidance(field, grid, stride):
            w.writerow([repr(float(v)) for v in row])
    return path
