"""Command-line entry point: ``hpfnav run|compare|solve|validate|list``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import HPFNavError
from .grid import world_to_cell, write_pgm
from .guidance import write_guidance_csv
from .mission import VARIANTS, Status, mission_grid, run_ab_comparison, simulate
from .render import render_artifacts
from .scenario import bundled_names, load_scenario, tomllib, validate_scenario
from .solver import solve_full, write_field_csv, write_field_pgm

log = logging.getLogger("hpfnav")

OUT_ENV = "HPFNAV_OUT"


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"override must look like key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key.strip(), value


def _out_dir(args, scenario_name: str) -> Path:
    base = args.out or os.environ.get(OUT_ENV) or "hpfnav_out"
    return Path(base) if args.out else Path(base) / scenario_name


def _load(args):
    sc = load_scenario(args.scenario)
    cfg = sc.mission_config(dict(args.override or []))
    seed = getattr(args, "seed", None)
    seed = sc.seed if seed is None else seed
    return sc, cfg, seed


def cmd_run(args) -> int:
    sc, cfg, seed = _load(args)
    run = simulate(sc, cfg, seed)
    out = _out_dir(args, sc.name)
    render_artifacts(run.result, run.trace, run.field, run.grid, out, run.world, run.target)
    for k, v in run.result.summary().items():
        print(f"{k}={v}")
    print(f"artifacts={out}")
    return 0 if run.result.status is Status.SUCCESS else 1


def cmd_compare(args) -> int:
    sc, cfg, seed = _load(args)
    rows = run_ab_comparison(sc, cfg, seed, args.variants)
    cols = ["variant", "status", "trip_time", "K", "hazard_cells", "min_clearance"]
    print("\t".join(cols))
    for row in rows:
        print("\t".join(f"{row[c]:.3f}" if isinstance(row[c], float) else str(row[c]) for c in cols))
    return 0 if all(r["status"] == Status.SUCCESS.value for r in rows) else 1


def cmd_solve(args) -> int:
    sc, cfg, _ = _load(args)
    grid = mission_grid(sc, cfg)
    field = solve_full(grid, world_to_cell(grid, *sc.target), cfg.solver_tol, cfg.omega_relax)
    out = _out_dir(args, sc.name)
    out.mkdir(parents=True, exist_ok=True)
    write_field_csv(field, out / "field.csv")
    write_field_pgm(field, out / "field.pgm")
    write_pgm(grid, out / "grid.pgm")
    write_guidance_csv(field, grid, out / "guidance.csv")
    print(f"iterations={field.iterations}")
    print(f"residual={field.last_residual!r}")
    print(f"artifacts={out}")
    return 0


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    cfg = validate_scenario(sc)
    sc.mission_config(dict(args.override or []))
    print(f"{sc.name}: ok (N={cfg.N}, D={cfg.D}, {len(sc.circles)} circles, {len(sc.segments)} segments)")
    return 0


def cmd_list(args) -> int:
    for name in bundled_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hpfnav", description="Harmonic-potential navigation simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, out=True):
        sp.add_argument("scenario", help="scenario file or bundled scenario name")
        if seed:
            sp.add_argument("--seed", type=int, default=None)
        if out:
            sp.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV}/<name>)")
        sp.add_argument("--override", action="append", type=_parse_override, metavar="KEY=VAL",
                        help="config override, e.g. D=9 or sensor.p_drop=0")

    common(sub.add_parser("run", help="run one mission and write artifacts"))
    sp = sub.add_parser("compare", help="run variants of a scenario side by side")
    common(sp, out=False)
    sp.add_argument("--variants", nargs="+", choices=VARIANTS, default=["modulated", "constant"])
    common(sub.add_parser("solve", help="solve the initial potential only"), seed=False)
    common(sub.add_parser("validate", help="check a scenario file"), seed=False, out=False)
    sub.add_parser("list", help="list bundled scenarios")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "compare": cmd_compare, "solve": cmd_solve,
               "validate": cmd_validate, "list": cmd_list}[args.command]
    try:
        return handler(args)
    except (HPFNavError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
