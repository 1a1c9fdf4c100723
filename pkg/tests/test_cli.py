import csv
import json

import numpy as np
import pytest

from gl_lab.cli import main
from gl_lab.config import validate_config
from gl_lab.diagnostics import CSV_COLUMNS
from gl_lab.grid import build_grid
from gl_lab.runner import read_field, report, run, write_field

SMALL = """\
domain: {kind: UnitDisk, resolution: 16}
boundary: {type: cos, amplitude: 0.5}
problem: Single
epsilons: [0.4, 0.2, 0.1]
"""


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def _csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_constant_boundary_gives_zero_csv(tmp_path):
    cfg = _write(tmp_path, SMALL.replace("{type: cos, amplitude: 0.5}", "{type: constant}"))
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    rows = _csv(out / "sweep.csv")
    assert len(rows) == 3
    for row in rows:
        for key, value in row.items():
            if key != "epsilon" and value != "":
                assert float(value) == 0.0, key


def test_degree_one_exits_65(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL.replace("{type: cos, amplitude: 0.5}", "{type: winding, degree: 1}"))
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 65
    assert "hypothesis violated: deg(g) must be 0" in capsys.readouterr().err


def test_invalid_config_exits_64(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL.replace("[0.4, 0.2, 0.1]", "[0.1, 0.2]"))
    assert main(["validate", str(cfg)]) == 64
    err = capsys.readouterr().err
    assert "line 4" in err and "strictly decreasing" in err
    assert main(["run", str(cfg)]) == 64


def test_validate_prints_defaults(tmp_path, capsys):
    assert main(["validate", str(_write(tmp_path, SMALL))]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["solver"]["tau"] == pytest.approx(0.25 * 0.1**2)


def test_solver_failure_exits_1(tmp_path):
    text = SMALL + "solver: {max_steps: 1, newton: false}\n"
    out = tmp_path / "out"
    assert main(["run", str(_write(tmp_path, text)), "--out", str(out)]) == 1
    rows = _csv(out / "sweep.csv")
    assert len(rows) == 3  # failure markers keep their rows
    rec = json.loads((out / "records" / "level_00.json").read_text())
    assert rec["report"]["failed"] is True


def test_run_artifacts_and_report(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL.replace("epsilons", "output: {dump_fields: true}\nepsilons"))
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    for name in ("config.json", "references.json", "sweep.csv", "verdicts.json", "run_meta.json"):
        assert (out / name).exists()
    with open(out / "sweep.csv") as fh:
        assert next(csv.reader(fh)) == list(CSV_COLUMNS)
    assert sorted(p.name for p in (out / "fields").iterdir()) == ["u_00.csv", "u_01.csv", "u_02.csv"]
    code, verdicts = report(out)
    stored = json.loads((out / "verdicts.json").read_text())
    assert code == 0
    assert {k: v["verdict"] for k, v in verdicts.items()} == {k: v["verdict"] for k, v in stored.items()}
    assert main(["report", str(out)]) == 0
    assert "potential_h1_equivalence" in capsys.readouterr().out


def test_field_dump_roundtrip_and_initial_field(tmp_path):
    grid = build_grid("UnitDisk", 16)
    rng = np.random.default_rng(3)
    f = rng.standard_normal(grid.n_nodes) + 1j * rng.standard_normal(grid.n_nodes)
    path = tmp_path / "f.csv"
    write_field(path, grid, f, field="u")
    assert np.array_equal(read_field(path, grid), f)
    # a user-supplied start field reaches the same branch here
    text = SMALL + "initial: {u: f.csv}\n"
    write_field(path, grid, np.full(grid.n_nodes, 0.9 + 0j))
    res = run(validate_config(text, base_dir=tmp_path), tmp_path / "out")
    assert res.exit_code == 0
    with pytest.raises(Exception):
        read_field(path, build_grid("UnitDisk", 17))


def test_parallel_levels_match_serial(tmp_path):
    base = SMALL + "solver: {continuation: false}\n"
    serial = run(validate_config(base), tmp_path / "serial")
    parallel = run(validate_config(base + "parallel: true\n"), tmp_path / "parallel")
    assert serial.exit_code == parallel.exit_code == 0
    assert (tmp_path / "serial" / "sweep.csv").read_bytes() == (tmp_path / "parallel" / "sweep.csv").read_bytes()


def test_beta_and_harmonic_problems(tmp_path):
    text = """\
domain: {kind: UnitSquare, resolution: 12}
boundary:
  - {type: cos, amplitude: 0.5}
  - {type: constant}
problem: BetaMinimizer
output: {dump_fields: true}
"""
    res = run(validate_config(text), tmp_path / "beta")
    assert res.exit_code == 0
    refs = json.loads((tmp_path / "beta" / "references.json").read_text())
    assert refs["beta"] <= refs["alpha"] + 1e-6
    assert refs["beta_constraint_violation"] <= 1e-8
    assert (tmp_path / "beta" / "fields" / "u_star.csv").exists()
    res = run(validate_config(text.replace("BetaMinimizer", "HarmonicOnly")), tmp_path / "harm")
    assert res.exit_code == 0
    refs = json.loads((tmp_path / "harm" / "references.json").read_text())
    assert refs["dirichlet_v0"] == 0.0


def test_two_levels_is_inconclusive_not_an_error(tmp_path):
    res = run(validate_config(SMALL.replace("[0.4, 0.2, 0.1]", "[0.4, 0.2]")), tmp_path / "o")
    assert res.exit_code == 0
    assert "insufficient data" in res.verdicts["status"]["note"]
