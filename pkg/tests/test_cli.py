import math
import re
import xml.etree.ElementTree as ET

import pytest

from hpfnav.cli import _parse_override, main
from hpfnav.render import ARTIFACT_NAMES

SVG = "{http://www.w3.org/2000/svg}"


def pgm_header(data: bytes):
    m = re.match(rb"P5\n(\d+) (\d+)\n(\d+)\n", data)
    assert m, data[:20]
    w, h, maxval = (int(v) for v in m.groups())
    return w, h, maxval, len(data) - m.end()


@pytest.fixture(scope="module")
def straight_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    code = main(["run", "straight_line", "--out", str(out)])
    return code, out


def test_run_writes_all_artifacts(straight_run, capsys):
    code, out = straight_run
    assert code == 0
    for name in ARTIFACT_NAMES:
        assert (out / name).is_file()


def test_pgm_headers(straight_run):
    _, out = straight_run
    w, h, maxval, nbytes = pgm_header((out / "grid.pgm").read_bytes())
    assert (w, h, maxval, nbytes) == (129, 129, 255, 129 * 129)
    w, h, maxval, nbytes = pgm_header((out / "field.pgm").read_bytes())
    assert (w, h, maxval, nbytes) == (129, 129, 65535, 2 * 129 * 129)


def test_svg_path_is_straight(straight_run):
    _, out = straight_run
    root = ET.parse(out / "overlay.svg").getroot()
    assert root.get("version") == "1.1"
    poly = root.find(f".//{SVG}polyline[@id='true-path']")
    pts = [tuple(map(float, p.split(","))) for p in poly.get("points").split()]
    (x0, y0), (x1, y1) = pts[0], pts[-1]
    chord = math.hypot(x1 - x0, y1 - y0)
    dev = max(abs((x1 - x0) * (y0 - y) - (x0 - x) * (y1 - y0)) / chord for x, y in pts)
    assert dev <= 0.05 * chord
    for marker in ("start", "target", "believed-path", "hazards", "world"):
        assert root.find(f".//*[@id='{marker}']") is not None


def test_rerun_byte_identical(straight_run, tmp_path):
    _, out = straight_run
    assert main(["run", "straight_line", "--out", str(tmp_path)]) == 0
    for name in ("trace.csv", "field.csv", "summary.txt"):
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes()


def test_summary_is_key_value(straight_run):
    _, out = straight_run
    kv = dict(line.split("=", 1) for line in (out / "summary.txt").read_text().splitlines())
    assert kv["status"] == "SUCCESS" and kv["hazard_cells"] == "0"


def test_exit_code_nonzero_without_success(tmp_path, capsys):
    code = main(["run", "straight_line", "--out", str(tmp_path), "--override", "t_max=1.0"])
    assert code == 1
    assert "status=TIMEOUT" in capsys.readouterr().out


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("HPFNAV_OUT", str(tmp_path))
    assert main(["run", "straight_line", "--seed", "3"]) == 0
    assert (tmp_path / "straight_line" / "trace.csv").is_file()
    assert "seed=3" in (tmp_path / "straight_line" / "summary.txt").read_text()


def test_bad_scenario_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('schema = "hpfnav-scenario/1"\nname = "b"\ntarget = [20.0, 0.0]\n')
    assert main(["validate", str(bad)]) == 2
    assert "xmax" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.toml"), "--out", str(tmp_path)]) == 2


def test_validate_list_solve(tmp_path, capsys):
    assert main(["validate", "trap_90"]) == 0
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "trap_90: ok" in out and "single_drum_constant" in out
    assert main(["solve", "trap_0", "--out", str(tmp_path)]) == 0
    assert pgm_header((tmp_path / "field.pgm").read_bytes())[:3] == (129, 129, 65535)
    assert (tmp_path / "guidance.csv").read_text().startswith("x,y,ex,ey")


def test_compare_prints_table(capsys):
    code = main(["compare", "straight_line", "--variants", "modulated", "constant"])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert lines[0].split("\t")[:2] == ["variant", "status"]
    assert [ln.split("\t")[0] for ln in lines[1:]] == ["modulated", "constant"]


def test_override_parsing():
    assert _parse_override("D=9") == ("D", 9)
    assert _parse_override("sensor.p_drop=0.25") == ("sensor.p_drop", 0.25)
    assert _parse_override("modulation=false") == ("modulation", False)
    assert _parse_override("vehicle.kind=car") == ("vehicle.kind", "car")
