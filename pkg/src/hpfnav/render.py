"""Post-hoc mission artifacts: CSV/PGM dumps, an SVG overlay and a summary record."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .grid import SafetyGrid, write_pgm
from .mission import MissionResult, TraceRecord, write_summary, write_trace_csv
from .solver import PotentialField, write_field_csv, write_field_pgm
from .world import World

ARTIFACT_NAMES = ("trace.csv", "field.csv", "field.pgm", "grid.pgm", "overlay.svg", "summary.txt")


def _points(xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{x:.5f},{y:.5f}" for x, y in zip(xs, ys))


def overlay_svg(trace: Sequence[TraceRecord], grid: SafetyGrid, world: World | None = None,
                target: tuple[float, float] | None = None) -> str:
    """SVG 1.1 drawing in world metres (y up) of belief, geometry and both trajectories."""
    h = grid.D / 2
    x0, y0 = grid.center[0] - h, grid.center[1] - h
    d = grid.delta
    sw = grid.D / 400
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="800" '
        f'viewBox="{x0:.5f} {-(y0 + grid.D):.5f} {grid.D:.5f} {grid.D:.5f}">',
        '<g transform="scale(1,-1)">',
        f'<rect x="{x0:.5f}" y="{y0:.5f}" width="{grid.D:.5f}" height="{grid.D:.5f}" '
        f'fill="white" stroke="black" stroke-width="{sw:.5f}"/>',
        '<g id="hazards" fill="#d62728" fill-opacity="0.5">',
    ]
    for i, j in np.argwhere(grid.cells[1:-1, 1:-1] == 1) + 1:
        out.append(f'<rect x="{x0 + i * d:.5f}" y="{y0 + j * d:.5f}" width="{d:.5f}" height="{d:.5f}"/>')
    out.append("</g>")
    if world is not None:
        out.append(f'<g id="world" fill="none" stroke="#333333" stroke-width="{2 * sw:.5f}">')
        for (cx, cy), r in world.circles:
            out.append(f'<circle cx="{cx:.5f}" cy="{cy:.5f}" r="{r:.5f}"/>')
        for (ax, ay), (bx, by) in world.segments:
            out.append(f'<line x1="{ax:.5f}" y1="{ay:.5f}" x2="{bx:.5f}" y2="{by:.5f}"/>')
        out.append("</g>")
    if trace:
        out.append(f'<polyline id="true-path" fill="none" stroke="black" stroke-width="{2 * sw:.5f}" '
                   f'points="{_points([r.true_x for r in trace], [r.true_y for r in trace])}"/>')
        out.append(f'<polyline id="believed-path" fill="none" stroke="#9467bd" stroke-dasharray="{4 * sw:.5f}" '
                   f'stroke-width="{2 * sw:.5f}" points="{_points([r.bel_x for r in trace], [r.bel_y for r in trace])}"/>')
        out.append(f'<circle id="start" cx="{trace[0].true_x:.5f}" cy="{trace[0].true_y:.5f}" '
                   f'r="{3 * d:.5f}" fill="#1f77b4"/>')
    if target is not None:
        out.append(f'<circle id="target" cx="{target[0]:.5f}" cy="{target[1]:.5f}" r="{3 * d:.5f}" fill="#2ca02c"/>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def render_artifacts(result: MissionResult, trace: Sequence[TraceRecord], field: PotentialField,
                     grid: SafetyGrid, out_dir: str | Path, world: World | None = None,
                     target: tuple[float, float] | None = None) -> dict[str, Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "trace.csv": write_trace_csv(trace, out / "trace.csv"),
            "field.csv": write_field_csv(field, out / "field.csv"),
            "field.pgm": write_field_pgm(field, out / "field.pgm"),
            "grid.pgm": write_pgm(grid, out / "grid.pgm"),
            "summary.txt": write_summary(result, out / "summary.txt"),
        }
        svg = out / "overlay.svg"
        svg.write_text(overlay_svg(trace, grid, world, target), encoding="utf-8")
        files["overlay.svg"] = svg
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write artifacts to {out}: {exc.strerror}", exc.filename) from exc
    return files
