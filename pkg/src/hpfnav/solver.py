"""Harmonic potential on the safety grid.

The potential is the solution of the discrete Laplace equation (5-point
stencil) on the free cells, with V = 1 on every blocked cell and V = 0 at the
target cell.  Relaxation is symmetric SOR with a fixed, deterministic sweep
order: row-major forward, then reversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ConfigurationError, InvalidTargetError, NonConvergenceError
from .grid import Cell, SafetyGrid

DEFAULT_TOL = 1e-12
DEFAULT_OMEGA = 1.8
DEFAULT_MAX_SWEEPS = 200_000
DEFAULT_MARGIN = 16

# Updates this small are at the rounding floor of values in [0, 1].
_FLOOR = 4 * np.finfo(float).eps
_RATE_WINDOW = 5


@dataclass(frozen=True)
class PotentialField:
    values: np.ndarray
    target_cell: Cell
    tol: float
    last_residual: float
    iterations: int
    work: int = 0
    omega: float = DEFAULT_OMEGA

    def __post_init__(self):
        self.values.setflags(write=False)


def relaxable_mask(grid: SafetyGrid, target_cell: Cell) -> np.ndarray:
    mask = grid.cells == 0
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = False
    mask[target_cell] = False
    return mask


def boundary_values(grid: SafetyGrid, target_cell: Cell, fill: float = 0.5) -> np.ndarray:
    V = np.where(grid.cells == 1, 1.0, fill)
    V[target_cell] = 0.0
    return V


def _check_params(tol: float, omega_relax: float) -> None:
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol!r}")
    if not 1.0 <= omega_relax < 2.0:
        raise ConfigurationError(f"omega_relax must lie in [1, 2), got {omega_relax!r}")


def _check_target(grid: SafetyGrid, target_cell: Cell) -> None:
    i, j = target_cell
    if not (0 <= i < grid.N and 0 <= j < grid.N) or grid.cells[i, j] != 0:
        raise InvalidTargetError(f"target cell {target_cell} is not a free cell")


def _relax(V: np.ndarray, relax: np.ndarray, box: tuple[int, int, int, int],
           tol: float, omega: float, max_sweeps: int) -> tuple[float, int, int]:
    """SOR on ``box`` until both the residual and the estimated error are below tol.

    The error estimate extrapolates the geometric decay of the per-pair
    maximum update, so the returned field is within roughly ``tol`` of the
    exact discrete solution, not merely residual-small.
    Returns ``(residual, sweeps, cell_updates)``.
    """
    i0, i1, j0, j1 = box
    n_cells = _kernels.count_relaxable(relax, i0, i1, j0, j1)
    if n_cells == 0:
        return 0.0, 0, 0
    history: list[float] = []
    sweeps = 0
    res = math.inf
    while sweeps < max_sweeps:
        d = _kernels.sor_sweep_pair(V, relax, i0, i1, j0, j1, omega)
        sweeps += 2
        history.append(d)
        if d <= _FLOOR:
            err = 0.0
        elif len(history) > _RATE_WINDOW and history[-1 - _RATE_WINDOW] > 0:
            rate = (d / history[-1 - _RATE_WINDOW]) ** (1.0 / _RATE_WINDOW)
            err = d * rate / (1.0 - rate) if rate < 1.0 else math.inf
        else:
            err = math.inf
        if err <= 0.5 * tol:
            # over-relaxation can overshoot the [0, 1] range by a few ulps
            np.clip(V, 0.0, 1.0, out=V)
            res = _kernels.max_residual(V, relax, i0, i1, j0, j1)
            if res <= tol:
                return res, sweeps, sweeps * n_cells
    res = _kernels.max_residual(V, relax, i0, i1, j0, j1)
    raise NonConvergenceError(
        f"no convergence after {sweeps} sweeps (residual {res:.3e} > tol {tol:.1e})",
        last_residual=res, iterations=sweeps)


def solve_full(grid: SafetyGrid, target_cell: Cell, tol: float = DEFAULT_TOL,
               omega_relax: float = DEFAULT_OMEGA,
               max_sweeps: int = DEFAULT_MAX_SWEEPS) -> PotentialField:
    """Solve the Laplace-Dirichlet problem from scratch (interior initialised to 0.5)."""
    _check_params(tol, omega_relax)
    target_cell = (int(target_cell[0]), int(target_cell[1]))
    _check_target(grid, target_cell)
    V = boundary_values(grid, target_cell)
    relax = relaxable_mask(grid, target_cell)
    n = grid.N
    res, sweeps, work = _relax(V, relax, (1, n - 2, 1, n - 2), tol, omega_relax, max_sweeps)
    return PotentialField(V, target_cell, tol, res, sweeps, work, omega_relax)


def update_local(field: PotentialField, grid: SafetyGrid, patch: Sequence[Cell],
                 tol: float | None = None, margin: int = DEFAULT_MARGIN,
                 max_sweeps: int = DEFAULT_MAX_SWEEPS) -> PotentialField:
    """Re-solve after ``patch`` cells became blocked, relaxing only near the patch.

    The window (patch bounding box grown by ``margin``) is relaxed with its
    edge held fixed.  If any cell just outside the relaxed region is then
    out of tolerance the margin doubles, until the window spans the grid.
    Starts from the previous field, so small changes converge quickly.
    """
    if not patch:
        return field
    tol = field.tol if tol is None else tol
    _check_params(tol, field.omega)
    if margin < 1:
        raise ConfigurationError(f"margin must be >= 1, got {margin!r}")
    target = field.target_cell
    _check_target(grid, target)
    V = field.values.copy()
    for c in patch:
        V[c] = 1.0
    # cells blocked outside this patch (e.g. a-priori data) must also be pinned
    V[grid.cells == 1] = 1.0
    relax = relaxable_mask(grid, target)
    n = grid.N
    pi = [c[0] for c in patch]
    pj = [c[1] for c in patch]
    lo_i, hi_i, lo_j, hi_j = min(pi), max(pi), min(pj), max(pj)
    sweeps = work = 0
    res = 0.0
    while True:
        box = (max(lo_i - margin, 1), min(hi_i + margin, n - 2),
               max(lo_j - margin, 1), min(hi_j + margin, n - 2))
        res, s, w = _relax(V, relax, box, tol, field.omega, max_sweeps - sweeps)
        sweeps += s
        work += w
        whole = box == (1, n - 2, 1, n - 2)
        if whole:
            break
        ring = (max(box[0] - 1, 1), min(box[1] + 1, n - 2),
                max(box[2] - 1, 1), min(box[3] + 1, n - 2))
        if _kernels.max_residual(V, relax, *ring) <= tol:
            break
        margin *= 2
    return PotentialField(V, target, tol, res, sweeps, work, field.omega)


def residual(field: PotentialField, grid: SafetyGrid) -> float:
    """Largest |V - mean of 4 neighbours| over free, non-target interior cells."""
    relax = relaxable_mask(grid, field.target_cell)
    n = grid.N
    return float(_kernels.max_residual(np.asarray(field.values, dtype=float), relax,
                                       1, n - 2, 1, n - 2))


def dirichlet_energy(field: PotentialField, grid: SafetyGrid) -> float:
    """Sum of squared differences over 4-adjacent pairs touching a free cell."""
    V = field.values
    free = grid.cells == 0
    dx = np.diff(V, axis=0) ** 2
    dy = np.diff(V, axis=1) ** 2
    mx = free[1:, :] | free[:-1, :]
    my = free[:, 1:] | free[:, :-1]
    return float(dx[mx].sum() + dy[my].sum())


def with_values(field: PotentialField, values: np.ndarray) -> PotentialField:
    """Copy of ``field`` carrying different values (diagnostics and tests)."""
    return replace(field, values=np.array(values, dtype=float))


def write_field_csv(field: PotentialField, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="ascii") as fh:
        for row in field.values:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
    return path


def write_field_pgm(field: PotentialField, path: str | Path) -> Path:
    """16-bit big-endian PGM, V=0 -> 0 and V=1 -> 65535, same orientation as the grid PGM."""
    path = Path(path)
    n = field.values.shape[0]
    scaled = np.rint(np.clip(field.values, 0.0, 1.0) * 65535).astype(">u2")
    img = scaled.T[::-1, :]
    path.write_bytes(f"P5\n{n} {n}\n65535\n".encode("ascii") + img.tobytes())
    return path
