"""Binary safety grid: the robot's on-demand belief about unsafe space.

Cell ``(i, j)`` covers the world square
``[cx - D/2 + i*delta, cx - D/2 + (i+1)*delta) x [cy - D/2 + j*delta, ...)``,
so the first index runs along world x and the second along world y.  A value
of 1 means "believed unsafe", 0 means "believed usable".  The outer ring of
cells is always 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import ConfigurationError

Cell = tuple[int, int]

DEFAULT_N = 129
MIN_N = 3


@dataclass
class SafetyGrid:
    N: int
    D: float
    cells: np.ndarray
    center: tuple[float, float] = (0.0, 0.0)

    @property
    def delta(self) -> float:
        return self.D / self.N

    @property
    def hazard_count(self) -> int:
        return int(self.cells.sum())

    def copy(self) -> "SafetyGrid":
        return SafetyGrid(self.N, self.D, self.cells.copy(), self.center)

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        d = self.delta
        return (self.center[0] - self.D / 2 + (i + 0.5) * d,
                self.center[1] - self.D / 2 + (j + 0.5) * d)

    def contains(self, x: float, y: float) -> bool:
        h = self.D / 2
        return abs(x - self.center[0]) < h and abs(y - self.center[1]) < h

    def interior_mask(self) -> np.ndarray:
        m = np.zeros((self.N, self.N), dtype=bool)
        m[1:-1, 1:-1] = True
        return m


def init_grid(N: int = DEFAULT_N, D: float = 6.0,
              center: tuple[float, float] = (0.0, 0.0)) -> SafetyGrid:
    """Fresh grid: perimeter ring blocked, interior free."""
    if not isinstance(N, (int, np.integer)) or N < MIN_N:
        raise ConfigurationError(f"grid size N must be an integer >= {MIN_N}, got {N!r}")
    if not (D > 0 and math.isfinite(D)):
        raise ConfigurationError(f"domain width D must be positive, got {D!r}")
    cells = np.zeros((N, N), dtype=np.uint8)
    _block_perimeter(cells)
    return SafetyGrid(int(N), float(D), cells, (float(center[0]), float(center[1])))


def _block_perimeter(cells: np.ndarray) -> None:
    cells[0, :] = 1
    cells[-1, :] = 1
    cells[:, 0] = 1
    cells[:, -1] = 1


def world_to_cell(grid: SafetyGrid, x: float, y: float) -> Cell:
    """Index of the cell containing ``(x, y)``; outside points clamp to the ring."""
    d = grid.delta
    i = math.floor((x - grid.center[0] + grid.D / 2) / d)
    j = math.floor((y - grid.center[1] + grid.D / 2) / d)
    n = grid.N - 1
    return min(max(i, 0), n), min(max(j, 0), n)


def register_detection(grid: SafetyGrid, believed_pose, S: float, W: float,
                       I_m: int = 2, delta_angle: float = 0.0,
                       keep_free: Iterable[Cell] = ()) -> list[Cell]:
    """Mark the inflated neighbourhood of a range return as unsafe.

    The return is placed ``S + W/2`` ahead of the robot centre along
    ``theta + delta_angle``.  Cells in the ``(2*I_m+1)^2`` square around it
    are flipped to 1 (the perimeter is already 1).  Cells in ``keep_free``
    are never flipped.  Returns the cells that actually changed.
    """
    reach = S + W / 2
    ang = believed_pose.theta + delta_angle
    ox = believed_pose.x + reach * math.cos(ang)
    oy = believed_pose.y + reach * math.sin(ang)
    io, jo = world_to_cell(grid, ox, oy)
    lo_i, hi_i = max(io - I_m, 1), min(io + I_m, grid.N - 2)
    lo_j, hi_j = max(jo - I_m, 1), min(jo + I_m, grid.N - 2)
    protected = set(keep_free)
    patch: list[Cell] = []
    cells = grid.cells
    for i in range(lo_i, hi_i + 1):
        for j in range(lo_j, hi_j + 1):
            if cells[i, j] == 0 and (i, j) not in protected:
                cells[i, j] = 1
                patch.append((i, j))
    return patch


def is_connected(grid: SafetyGrid, a: Cell, b: Cell) -> bool:
    """True iff a 4-connected path of free cells joins ``a`` and ``b``."""
    cells = grid.cells
    if cells[a] or cells[b]:
        return False
    if a == b:
        return True
    return bool(free_component(grid, a)[b])


def free_component(grid: SafetyGrid, seed: Cell) -> np.ndarray:
    """Boolean mask of the 4-connected free region containing ``seed``."""
    return _kernels.flood_fill(grid.cells, int(seed[0]), int(seed[1]))


def reset_beliefs(grid: SafetyGrid) -> SafetyGrid:
    grid.cells[...] = 0
    _block_perimeter(grid.cells)
    return grid


def mark_cells(grid: SafetyGrid, mask: np.ndarray) -> list[Cell]:
    """Flip every free cell selected by ``mask`` to 1; returns the changed cells."""
    new = mask & (grid.cells == 0)
    idx = np.argwhere(new)
    grid.cells[new] = 1
    return [(int(i), int(j)) for i, j in idx]


def write_pgm(grid: SafetyGrid, path: str | Path) -> Path:
    """8-bit binary PGM; 0 = free, 255 = unsafe.  Row r of the image is grid row j = N-1-r."""
    path = Path(path)
    img = (grid.cells.T[::-1, :] * 255).astype(np.uint8)
    header = f"P5\n{grid.N} {grid.N}\n255\n".encode("ascii")
    path.write_bytes(header + img.tobytes())
    return path
