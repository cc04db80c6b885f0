"""Shared oracles and grid builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from hpfnav.grid import SafetyGrid, init_grid


def dense_laplace(cells: np.ndarray, target: tuple[int, int]) -> np.ndarray:
    """Direct solve of the 5-point Laplace system (V=1 on blocked, 0 at target)."""
    n = cells.shape[0]
    free = cells == 0
    free[target] = False
    idx = -np.ones(cells.shape, dtype=int)
    unknowns = np.argwhere(free)
    idx[free] = np.arange(len(unknowns))
    A = np.zeros((len(unknowns), len(unknowns)))
    b = np.zeros(len(unknowns))
    for k, (i, j) in enumerate(unknowns):
        A[k, k] = 4.0
        for ni, nj in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if idx[ni, nj] >= 0:
                A[k, idx[ni, nj]] -= 1.0
            elif cells[ni, nj] == 1:
                b[k] += 1.0
    V = np.where(cells == 1, 1.0, 0.0)
    if len(unknowns):
        V[free] = np.linalg.solve(A, b)
    return V


def random_grid(rng: np.random.Generator, n: int, density: float) -> tuple[SafetyGrid, tuple[int, int]]:
    """Random interior obstacles plus a free target cell."""
    grid = init_grid(n, float(n))
    interior = rng.random((n - 2, n - 2)) < density
    grid.cells[1:-1, 1:-1] = interior.astype(np.uint8)
    free = np.argwhere(grid.cells == 0)
    if len(free) == 0:
        grid.cells[n // 2, n // 2] = 0
        free = np.array([[n // 2, n // 2]])
    target = tuple(int(v) for v in free[rng.integers(len(free))])
    return grid, target


def patch_grid(rng: np.random.Generator, n: int, n_patches: int, target: tuple[int, int]) -> SafetyGrid:
    """Grid with square obstacle patches that never cover ``target``."""
    grid = init_grid(n, 6.0)
    for _ in range(n_patches):
        i, j = rng.integers(2, n - 2, size=2)
        h = int(rng.integers(1, 6))
        grid.cells[max(i - h, 1):min(i + h + 1, n - 1), max(j - h, 1):min(j + h + 1, n - 1)] = 1
    grid.cells[target] = 0
    return grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
