"""Execute a RunConfig: build the problem, sweep epsilon, write artifacts.

Output directory layout::

    config.json        canonical validated config
    references.json    harmonic energies, alpha, beta (as applicable)
    sweep.csv          one row per epsilon, fixed columns (see CSV_COLUMNS)
    verdicts.json      sweep checks with margins
    records/level_KK.json   per-solve record with histories
    fields/*.csv       optional field dumps (JSON header line + index,x,y,re,im)
    run_meta.json      wall-clock data; the only non-deterministic file
"""

from __future__ import annotations

import csv
import json
import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .boundary import BoundaryData, make_boundary
from .config import Problem, RunConfig
from .diagnostics import (
    CONSISTENT,
    CSV_COLUMNS,
    INCONSISTENT,
    EnergyReport,
    SweepReport,
    classify_sweep,
    energy_report,
    reports_from_rows,
)
from .errors import (
    ConfigurationError,
    GLLabError,
    HypothesisError,
    InsufficientData,
    ShapeError,
    SolverError,
    UnderResolvedBoundary,
)
from .grid import Grid, build_grid
from .pair import Variant, solve_pair
from .reference import alpha_value, harmonic_from_boundary, minimize_beta
from .solver import solve_gl

log = logging.getLogger("gl_lab")

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_INCONSISTENT = 2
EXIT_CONFIG = 64
EXIT_HYPOTHESIS = 65

PAIR_VARIANTS = {Problem.SYMMETRIC_PAIR: Variant.SYMMETRIC, Problem.NON_SYMMETRIC_PAIR: Variant.NON_SYMMETRIC}


@dataclass
class RunResult:
    exit_code: int
    out_dir: Path | None
    messages: list[str] = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    reports: list[EnergyReport] = field(default_factory=list)


# ------------------------------------------------------------ serialisation


def _clean(x: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "nan"
    return str(v)


def write_sweep_csv(path: Path, reports: list[EnergyReport]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in reports:
            row = r.csv_row()
            w.writerow([_cell(row[c]) for c in CSV_COLUMNS])


def read_sweep_csv(path: Path) -> list[dict]:
    rows = []
    with path.open(newline="") as fh:
        for raw in csv.DictReader(fh):
            row: dict[str, Any] = {}
            for k, v in raw.items():
                if v == "":
                    row[k] = None
                elif k == "steps":
                    row[k] = int(v)
                else:
                    row[k] = float(v)
            rows.append(row)
    return rows


def write_field(path: Path, grid: Grid, values: np.ndarray, **meta) -> None:
    """Field dump: one JSON header line, then CSV rows index,x,y,re,im."""
    values = np.asarray(grid.check(values))
    header = {"kind": grid.kind.value, "resolution": grid.resolution, "n_nodes": grid.n_nodes, **meta}
    with path.open("w", newline="") as fh:
        fh.write(json.dumps(_clean(header), sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "x", "y", "re", "im"])
        re, im = np.real(values), np.imag(values)
        for i in range(grid.n_nodes):
            w.writerow([i, repr(float(grid.x[i])), repr(float(grid.y[i])), repr(float(re[i])), repr(float(im[i]))])


def read_field(path: Path, grid: Grid) -> np.ndarray:
    """Load a field dump written by ``write_field`` for the same grid."""
    with Path(path).open() as fh:
        header = json.loads(fh.readline())
        if header.get("kind") != grid.kind.value or header.get("resolution") != grid.resolution:
            raise ShapeError(
                f"field dump is for {header.get('kind')} n={header.get('resolution')}, "
                f"grid is {grid.kind.value} n={grid.resolution}"
            )
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] != grid.n_nodes:
        raise ShapeError(f"field dump has {data.shape[0]} rows, grid has {grid.n_nodes} nodes")
    out = np.empty(grid.n_nodes, dtype=complex)
    out[data[:, 0].astype(int)] = data[:, 3] + 1j * data[:, 4]
    return out


# ------------------------------------------------------------ solves


def _solve_level(grid: Grid, cfg: RunConfig, bounds, refs, eps: float, initial):
    settings = cfg.solver.at(eps)
    if cfg.problem is Problem.SINGLE:
        sol = solve_gl(bounds[0], grid, settings, initial=initial, reference=refs[0])
        return sol, energy_report(sol, refs[0])
    sol = solve_pair(bounds[0], bounds[1], grid, settings, PAIR_VARIANTS[cfg.problem], initial=initial, references=refs)
    return sol, energy_report(sol, refs)


def _solution_fields(sol) -> tuple:
    return (sol.u,) if not hasattr(sol, "v") else (sol.u, sol.v)


def _record(rep: EnergyReport, sol, level: int) -> dict:
    rec = {"level": level, "report": rep.record()}
    if sol is not None:
        rec["energy_history"] = sol.energy_history
        rec["residual_history"] = sol.residual_history
        hist = np.asarray(sol.energy_history)
        rec["max_energy_increase"] = float(np.max(np.diff(hist), initial=0.0)) if hist.size > 1 else 0.0
        if hasattr(sol, "bound_report"):
            rec["bounds"] = sol.bound_report()
            rec["residuals"] = list(sol.residuals)
    return rec


def _independent_level(args):
    """Process-pool worker for a single level (continuation off)."""
    cfg, level, eps, initial = args
    grid = build_grid(cfg.kind, cfg.resolution)
    bounds = _boundaries(cfg, grid)
    refs = tuple(harmonic_from_boundary(b, grid, name=f"g{i + 1}") for i, b in enumerate(bounds))
    try:
        sol, rep = _solve_level(grid, cfg, bounds, refs, eps, initial)
        return level, _solution_fields(sol), rep, _record(rep, sol, level), None
    except SolverError as exc:
        return level, None, EnergyReport.failure(eps, str(exc)), None, str(exc)


def _boundaries(cfg: RunConfig, grid: Grid) -> list[BoundaryData]:
    out = []
    for i, spec in enumerate(cfg.boundary):
        spec = dict(spec)
        if spec.get("type") == "table":
            spec["path"] = str(cfg.resolve(spec["path"]))
        out.append(make_boundary(spec, grid, label=f"g{i + 1}" if len(cfg.boundary) > 1 else "g"))
    return out


def _initial_fields(cfg: RunConfig, grid: Grid, refs) -> tuple | np.ndarray | None:
    if not cfg.initial:
        return None
    fields = []
    names = ("u", "v") if cfg.problem.is_pair else ("u",)
    for name, ref in zip(names, refs):
        path = cfg.initial.get(name)
        fields.append(read_field(cfg.resolve(path), grid) if path else ref.u0.copy())
    return tuple(fields) if cfg.problem.is_pair else fields[0]


def _sweep(cfg: RunConfig, grid: Grid, bounds, refs, out: Path, result: RunResult) -> list[EnergyReport]:
    reports: list[EnergyReport] = []
    records: list[dict | None] = []
    fields: list[tuple | None] = []
    initial = _initial_fields(cfg, grid, refs)
    eps_list = list(cfg.epsilons)

    if not cfg.solver.continuation and cfg.parallel and len(eps_list) > 1:
        jobs = [(cfg, k, e, initial) for k, e in enumerate(eps_list)]
        with ProcessPoolExecutor() as pool:
            done = sorted(pool.map(_independent_level, jobs), key=lambda t: t[0])
        for level, flds, rep, rec, err in done:
            reports.append(rep)
            records.append(rec or _record(rep, None, level))
            fields.append(flds)
            if err:
                result.messages.append(f"eps={eps_list[level]:g}: {err}")
    else:
        warm = initial
        for k, eps in enumerate(eps_list):
            t0 = time.perf_counter()
            try:
                sol, rep = _solve_level(grid, cfg, bounds, refs, eps, warm)
            except SolverError as exc:
                log.error("eps=%g failed: %s", eps, exc)
                result.messages.append(f"eps={eps:g}: {exc}")
                reports.append(EnergyReport.failure(eps, str(exc)))
                records.append(_record(reports[-1], None, k))
                fields.append(None)
                continue
            log.info(
                "eps=%g residual=%.2e steps=%d+%d (%.1fs)",
                eps, rep.residual, sol.steps_taken, sol.newton_steps, time.perf_counter() - t0,
            )
            reports.append(rep)
            records.append(_record(rep, sol, k))
            fields.append(_solution_fields(sol))
            if cfg.solver.continuation:
                warm = fields[-1] if cfg.problem.is_pair else fields[-1][0]

    rec_dir = out / "records"
    rec_dir.mkdir(exist_ok=True)
    for k, rec in enumerate(records):
        write_json(rec_dir / f"level_{k:02d}.json", rec)
    if cfg.dump_fields:
        fdir = out / "fields"
        fdir.mkdir(exist_ok=True)
        for k, (eps, flds) in enumerate(zip(eps_list, fields)):
            if flds is None:
                continue
            for name, f in zip(("u", "v"), flds):
                write_field(fdir / f"{name}_{k:02d}.csv", grid, f, field=name, epsilon=eps, level=k)
    write_sweep_csv(out / "sweep.csv", reports)
    return reports


def _references(cfg: RunConfig, grid: Grid, bounds, refs) -> dict:
    data: dict[str, Any] = {"h": grid.h, "domain": grid.describe(), "boundary": []}
    for b, ref in zip(bounds, refs):
        data["boundary"].append(
            {
                "label": b.label,
                "degree": b.degree,
                "smoothness_verified": b.smooth_verified,
                "phase_energy": ref.energy,
                "map_energy": ref.map_energy,
                "laplacian_residual": ref.residual,
                "cg_iterations": ref.iterations,
            }
        )
    data["dirichlet_u0"] = refs[0].map_energy
    if len(refs) == 2:
        data["dirichlet_v0"] = refs[1].map_energy
        data["alpha"] = alpha_value(refs[0], refs[1])
    return data


def _beta(cfg: RunConfig, grid: Grid, bounds, refs, data: dict) -> Any:
    pair = minimize_beta(bounds[0], bounds[1], grid, cfg.beta, initial=(refs[0].u0, refs[1].u0))
    data["beta"] = pair.beta_value
    data["beta_constraint_violation"] = pair.constraint_violation
    data["beta_steps"] = pair.steps
    data["beta_label"] = pair.label
    # alpha is the phase energy; the constrained flow starts from the map energy
    data["alpha_minus_beta"] = data["alpha"] - pair.beta_value
    return pair


def _summary_exit(verdicts: dict) -> int:
    if any(isinstance(v, dict) and v.get("verdict") == INCONSISTENT for v in verdicts.values()):
        return EXIT_INCONSISTENT
    return EXIT_OK


def classify_stored(problem: Problem, reports: list[EnergyReport], references: dict, thresholds: dict) -> dict:
    """Verdicts for a problem's reports; insufficient data is recorded, not raised."""
    sweep = SweepReport(problem.value, reports, references, references["h"])
    try:
        return classify_sweep(sweep, thresholds)
    except InsufficientData as exc:
        return {"status": {"verdict": "inconclusive", "note": f"insufficient data: {exc}"}}


def run(cfg: RunConfig, out_dir: str | Path | None = None) -> RunResult:
    """Run a validated configuration; never raises for expected failures."""
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    out = Path(out_dir) if out_dir is not None else Path(cfg.output)
    result = RunResult(EXIT_OK, out)
    try:
        grid = build_grid(cfg.kind, cfg.resolution)
        bounds = _boundaries(cfg, grid)
        for i, b in enumerate(bounds):
            if b.degree != 0:
                name = "g" if len(bounds) == 1 else f"g{i + 1}"
                raise HypothesisError(f"hypothesis violated: deg({name}) must be 0 (got {b.degree})")
        refs = tuple(harmonic_from_boundary(b, grid, name=f"g{i + 1}") for i, b in enumerate(bounds))
    except HypothesisError as exc:
        result.exit_code = EXIT_HYPOTHESIS
        result.messages.append(str(exc))
        return result
    except (ConfigurationError, UnderResolvedBoundary, ShapeError, OSError) as exc:
        result.exit_code = EXIT_CONFIG
        result.messages.append(str(exc))
        return result
    except SolverError as exc:
        result.exit_code = EXIT_SOLVER
        result.messages.append(str(exc))
        return result

    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", cfg.as_dict())
    data = _references(cfg, grid, bounds, refs)
    verdicts: dict = {}

    try:
        if cfg.problem is Problem.HARMONIC_ONLY:
            if cfg.dump_fields:
                (out / "fields").mkdir(exist_ok=True)
                for name, ref in zip(("u0", "v0"), refs):
                    write_field(out / "fields" / f"{name}.csv", grid, ref.u0, field=name)
        elif cfg.problem is Problem.BETA_MINIMIZER:
            pair = _beta(cfg, grid, bounds, refs, data)
            ok = pair.beta_value <= data["alpha"] + 1e-6
            verdicts["alpha_ge_beta"] = {
                "check": "alpha >= beta",
                "verdict": CONSISTENT if ok else INCONSISTENT,
                "margins": {"alpha": data["alpha"], "beta": pair.beta_value, "alpha_minus_beta": data["alpha_minus_beta"]},
                "label": "a minimizer candidate",
            }
            if cfg.dump_fields:
                (out / "fields").mkdir(exist_ok=True)
                write_field(out / "fields" / "u_star.csv", grid, pair.u_star, field="u_star")
                write_field(out / "fields" / "v_star.csv", grid, pair.v_star, field="v_star")
        else:
            if cfg.problem is Problem.SYMMETRIC_PAIR:
                _beta(cfg, grid, bounds, refs, data)
            reports = _sweep(cfg, grid, bounds, refs, out, result)
            result.reports = reports
            if any(r.failed for r in reports):
                result.exit_code = EXIT_SOLVER
                verdicts = {"status": {"verdict": "inconclusive", "note": "solver failure at " + ", ".join(
                    f"eps={r.epsilon:g}" for r in reports if r.failed)}}
            else:
                verdicts = classify_stored(cfg.problem, reports, data, cfg.thresholds)
    except SolverError as exc:
        result.exit_code = EXIT_SOLVER
        result.messages.append(str(exc))
    except GLLabError as exc:
        result.exit_code = EXIT_SOLVER
        result.messages.append(f"{type(exc).__name__}: {exc}")

    write_json(out / "references.json", data)
    write_json(out / "verdicts.json", verdicts)
    result.verdicts = verdicts
    if result.exit_code == EXIT_OK:
        result.exit_code = _summary_exit(verdicts)
    write_json(
        out / "run_meta.json",
        {
            "started_utc": started.isoformat(),
            "wall_seconds": time.perf_counter() - t0,
            "exit_code": result.exit_code,
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "messages": result.messages,
        },
    )
    return result


def report(run_dir: str | Path) -> tuple[int, dict]:
    """Re-derive verdicts from a finished run's stored CSV, references and records."""
    run_dir = Path(run_dir)
    try:
        cfg = json.loads((run_dir / "config.json").read_text())
        refs = json.loads((run_dir / "references.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"not a run directory: {run_dir} ({exc})") from None
    problem = Problem(cfg["problem"])
    if problem in (Problem.HARMONIC_ONLY, Problem.BETA_MINIMIZER):
        stored = json.loads((run_dir / "verdicts.json").read_text())
        return _summary_exit(stored), stored
    rows = read_sweep_csv(run_dir / "sweep.csv")
    for k, row in enumerate(rows):
        rec_path = run_dir / "records" / f"level_{k:02d}.json"
        if rec_path.exists():
            stored = json.loads(rec_path.read_text())["report"]
            for key in ("max_modulus_u", "max_modulus_v", "max_sum_sq", "failed", "message", "g_energy"):
                if key in stored:
                    row[key] = stored[key]
    reports = reports_from_rows(rows)
    for r in reports:
        if r.failed is None:
            r.failed = False
    if any(r.failed for r in reports):
        return EXIT_SOLVER, {"status": {"verdict": "inconclusive", "note": "run contains failed levels"}}
    verdicts = classify_stored(problem, reports, refs, cfg.get("thresholds") or {})
    return _summary_exit(verdicts), _clean(verdicts)
