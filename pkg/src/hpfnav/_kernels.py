"""Compiled inner loops for the Laplace relaxation and free-space flood fill."""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def sor_sweep_pair(V, relax, i0, i1, j0, j1, omega):
    """One forward and one backward SOR sweep over ``[i0, i1] x [j0, j1]``.

    Only cells with ``relax`` set are updated; everything else acts as a
    fixed Dirichlet value.  Returns the largest absolute update.
    """
    biggest = 0.0
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            if relax[i, j]:
                avg = 0.25 * (V[i - 1, j] + V[i + 1, j] + V[i, j - 1] + V[i, j + 1])
                step = omega * (avg - V[i, j])
                V[i, j] += step
                if abs(step) > biggest:
                    biggest = abs(step)
    for i in range(i1, i0 - 1, -1):
        for j in range(j1, j0 - 1, -1):
            if relax[i, j]:
                avg = 0.25 * (V[i - 1, j] + V[i + 1, j] + V[i, j - 1] + V[i, j + 1])
                step = omega * (avg - V[i, j])
                V[i, j] += step
                if abs(step) > biggest:
                    biggest = abs(step)
    return biggest


@nb.njit(cache=True)
def max_residual(V, relax, i0, i1, j0, j1):
    worst = 0.0
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            if relax[i, j]:
                r = abs(V[i, j] - 0.25 * (V[i - 1, j] + V[i + 1, j] + V[i, j - 1] + V[i, j + 1]))
                if r > worst:
                    worst = r
    return worst


@nb.njit(cache=True)
def count_relaxable(relax, i0, i1, j0, j1):
    n = 0
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            if relax[i, j]:
                n += 1
    return n


@nb.njit(cache=True)
def flood_fill(cells, si, sj):
    """4-connected component of zero cells containing ``(si, sj)``."""
    n0, n1 = cells.shape
    seen = np.zeros((n0, n1), dtype=np.bool_)
    if cells[si, sj] != 0:
        return seen
    stack = np.empty((n0 * n1, 2), dtype=np.int64)
    stack[0, 0] = si
    stack[0, 1] = sj
    seen[si, sj] = True
    top = 1
    while top > 0:
        top -= 1
        i = stack[top, 0]
        j = stack[top, 1]
        for k in range(4):
            ni = i + (1 if k == 0 else -1 if k == 1 else 0)
            nj = j + (1 if k == 2 else -1 if k == 3 else 0)
            if 0 <= ni < n0 and 0 <= nj < n1 and not seen[ni, nj] and cells[ni, nj] == 0:
                seen[ni, nj] = True
                stack[top, 0] = ni
                stack[top, 1] = nj
                top += 1
    return seen


def warmup() -> None:
    V = np.full((4, 4), 0.5)
    relax = np.zeros((4, 4), dtype=np.bool_)
    relax[1:3, 1:3] = True
    sor_sweep_pair(V, relax, 1, 2, 1, 2, 1.5)
    max_residual(V, relax, 1, 2, 1, 2)
    count_relaxable(relax, 1, 2, 1, 2)
    flood_fill(np.zeros((3, 3), dtype=np.uint8), 1, 1)
