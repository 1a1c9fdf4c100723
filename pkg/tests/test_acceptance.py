"""The eleven acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import json
import math
import time

import numpy as np
from conftest import ACCEPTANCE_LINES

from gl_lab.boundary import make_boundary
from gl_lab.config import validate_config
from gl_lab.grid import build_grid, integrate
from gl_lab.pair import Variant, pair_energy, pair_gradient
from gl_lab.reference import alpha_value, harmonic_from_boundary, minimize_beta, solve_harmonic
from gl_lab.runner import run
from gl_lab.solver import energy_gradient, gl_energy


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} | {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def _reports(run_fixture):
    _, result = run_fixture
    assert result.exit_code == 0, result.messages
    return result.reports


def _h(cfg):
    return build_grid(cfg.kind, cfg.resolution).h


def test_01_harmonic_oracle():
    errs, energy, times = [], None, []
    for n in (64, 128):
        g = build_grid("UnitDisk", n)
        t0 = time.perf_counter()
        h = solve_harmonic(0.5 * np.cos(g.theta[g.boundary]), g)
        times.append(time.perf_counter() - t0)
        errs.append(np.max(np.abs(h.phi - 0.5 * g.x)))
        if n == 64:
            energy = h.energy
    rel = abs(energy - math.pi / 8) / (math.pi / 8)
    ratio = errs[0] / errs[1]
    ok = rel <= 0.02 and 3 <= ratio <= 5 and max(times) < 10
    record(1, "harmonic oracle", ok,
           f"energy rel err {rel:.2e}, error ratio 64->128 {ratio:.3f}, slowest solve {max(times):.2f}s")


def _fd_ratio(energy, grad_pairs, grid, rng, t=1e-5, n_dirs=20):
    worst = 0.0
    I = grid.interior
    for _ in range(n_dirs):
        ws = []
        for _g in grad_pairs:
            w = np.zeros(grid.n_nodes, dtype=complex)
            w[I] = rng.standard_normal(I.size) + 1j * rng.standard_normal(I.size)
            ws.append(w)
        analytic = sum(integrate(grid, np.real(np.conj(g) * w)) for g, w in zip(grad_pairs, ws))
        fd = (energy(+t, ws) - energy(-t, ws)) / (2 * t)
        worst = max(worst, abs(analytic - fd) / (abs(analytic) + 1e-12))
    return worst


def test_02_gradient_correctness():
    grid = build_grid("UnitSquare", 16)
    rng = np.random.default_rng(2)
    I = grid.interior
    u = harmonic_from_boundary(make_boundary({"type": "cos", "amplitude": 0.6}, grid), grid).u0.copy()
    v = harmonic_from_boundary(make_boundary({"type": "sin", "amplitude": 0.6}, grid), grid).u0.copy()
    u[I] *= 0.6 + 0.4 * rng.random(I.size)
    v[I] *= 0.8 + 0.5 * rng.random(I.size)
    worst = {}
    for eps in (1.0, 0.1):
        worst[f"G eps={eps}"] = _fd_ratio(
            lambda s, ws: gl_energy(grid, u + s * ws[0], eps), [energy_gradient(grid, u, eps)], grid, rng
        )
        for variant in Variant:
            gu, gv = pair_gradient(grid, u, v, eps, variant)
            worst[f"F {variant.value} eps={eps}"] = _fd_ratio(
                lambda s, ws: pair_energy(grid, u + s * ws[0], v + s * ws[1], eps, variant), [gu, gv], grid, rng
            )
    top = max(worst.values())
    record(2, "gradient correctness", top <= 1e-5, f"worst relative error {top:.2e} over {len(worst)} cases x 20 directions")


def test_03_maximum_principle(standard_run):
    cfg, _ = standard_run
    reports = _reports(standard_run)
    bound = 1 + 10 * _h(cfg) ** 2
    worst = max(r.max_modulus_u for r in reports)
    violations = sum(r.max_modulus_u > bound for r in reports)
    record(3, "maximum principle", violations == 0, f"max |u| = {worst:.16f}, bound {bound:.6f}, violations {violations}")


def test_04_co_decay(standard_run):
    cfg, result = standard_run
    reports = _reports(standard_run)
    pot = [r.potential_u for r in reports]
    h1 = [r.h1_dist_u for r in reports]

    def monotone(q):
        return all(b <= 1.05 * a for a, b in zip(q, q[1:]))

    wall = float(json.loads((result.out_dir / "run_meta.json").read_text())["wall_seconds"])
    ok = monotone(pot) and monotone(h1) and pot[0] / pot[-1] >= 5 and h1[0] / h1[-1] >= 5 and wall < 300
    record(4, "potential / H1 co-decay", ok,
           f"potential fell {pot[0] / pot[-1]:.1f}x, H1 distance fell {h1[0] / h1[-1]:.1f}x, sweep {wall:.1f}s")


def test_05_energy_threshold(standard_run):
    _, result = standard_run
    reports = _reports(standard_run)
    e0 = result.verdicts["energy_lower_bound"]["margins"]["reference"]
    tol = 0.05 * (1 + e0)
    last = abs(reports[-1].dirichlet_u - e0)
    low = min(r.dirichlet_u for r in reports)
    ok = last <= tol and low >= e0 - tol
    record(5, "energy threshold", ok,
           f"|D(eps_min) - D(u0)| = {last:.2e}, sweep min {low:.5f} vs D(u0) {e0:.5f}, tol {tol:.4f}")


def test_06_pohozaev_boundedness(standard_run):
    reports = _reports(standard_run)
    pot = [r.potential_u for r in reports]
    ok = max(pot) <= 1.2 * pot[0]
    record(6, "bounded potential", ok, f"sweep max / largest-eps value = {max(pot) / pot[0]:.3f}")


def test_07_pair_bounds(symmetric_run, nonsymmetric_run):
    cfg, _ = symmetric_run
    slack = 10 * _h(cfg) ** 2
    sym = _reports(symmetric_run)
    non = _reports(nonsymmetric_run)
    sum_sq = max(r.max_sum_sq for r in sym)
    u_sq = max(r.max_modulus_u for r in non) ** 2
    v_sq = max(r.max_modulus_v for r in non) ** 2
    violations = sum(r.max_sum_sq > 2 + slack for r in sym)
    violations += sum(r.max_modulus_u**2 > 1.5 + slack or r.max_modulus_v**2 > 2 + slack for r in non)
    record(7, "pair pointwise bounds", violations == 0,
           f"sym max(|u|^2+|v|^2) {sum_sq:.12f}; non-sym max|u|^2 {u_sq:.12f}, max|v|^2 {v_sq:.12f}; violations {violations}")


def _gauss_seidel_beta(grid, g1, g2, sweeps=20000, tol=1e-15):
    n = grid.n_nodes
    nbrs = [[] for _ in range(n)]
    for (a, b), w in zip(grid.edges, grid.weights):
        nbrs[a].append((b, w))
        nbrs[b].append((a, w))
    U = np.zeros((n, 4))
    U[:, 0] = U[:, 2] = 1.0
    U[grid.boundary] = np.column_stack([g1.samples.real, g1.samples.imag, g2.samples.real, g2.samples.imag])

    def energy():
        d = U[grid.edges[:, 0]] - U[grid.edges[:, 1]]
        return 0.5 * float(np.sum(grid.weights * np.sum(d * d, axis=1)))

    prev = energy()
    for _ in range(sweeps):
        for i in grid.interior:
            S = sum(w * U[j] for j, w in nbrs[i])
            U[i] = math.sqrt(2) * S / np.linalg.norm(S)
        cur = energy()
        if prev - cur < tol:
            return cur
        prev = cur
    return cur


CATALOG = [
    ({"type": "cos", "amplitude": 0.5}, {"type": "constant"}),
    ({"type": "cos", "amplitude": 0.4}, {"type": "sin", "amplitude": 0.4}),
    ({"type": "sin_arclength", "amplitude": 0.6}, {"type": "cos", "amplitude": 0.3, "mode": 2}),
    ({"type": "cos", "amplitude": 0.8, "mode": 2}, {"type": "sin_arclength", "amplitude": 0.5, "mode": 1}),
    ({"type": "constant", "value": 1.0}, {"type": "sin", "amplitude": 0.7, "mode": 3}),
]


def test_08_alpha_ge_beta():
    grid = build_grid("UnitDisk", 24)
    gaps = []
    for s1, s2 in CATALOG:
        g1, g2 = make_boundary(s1, grid), make_boundary(s2, grid)
        alpha = alpha_value(harmonic_from_boundary(g1, grid), harmonic_from_boundary(g2, grid))
        gaps.append(alpha - minimize_beta(g1, g2, grid).beta_value)
    small = build_grid("UnitSquare", 8)
    g1, g2 = make_boundary(CATALOG[0][0], small), make_boundary(CATALOG[0][1], small)
    oracle = _gauss_seidel_beta(small, g1, g2)
    rel = abs(minimize_beta(g1, g2, small).beta_value - oracle) / oracle
    ok = min(gaps) >= -1e-6 and rel <= 1e-3
    record(8, "alpha >= beta", ok,
           f"min(alpha - beta) over {len(gaps)} pairs {min(gaps):.3e}, largest gap {max(gaps):.3e}; 8x8 oracle rel err {rel:.1e}")


def test_09_lifted_system_residuals(standard_run, symmetric_run, nonsymmetric_run):
    worst_ratio, checked = 0.0, 0
    for fixture in (standard_run, symmetric_run, nonsymmetric_run):
        cfg, _ = fixture
        reports = _reports(fixture)
        scale = 1 + max(r.g_energy for r in reports)
        bound = 50 * (_h(cfg) + cfg.solver.residual_tol) * scale
        for r in reports:
            for value in (r.div_residual_u, r.div_residual_v, r.identity_1_7):
                if value is not None:
                    worst_ratio = max(worst_ratio, value / bound)
                    checked += 1
    record(9, "lifted-system residuals", checked > 0 and worst_ratio <= 1,
           f"{checked} residuals checked, worst residual / bound = {worst_ratio:.2e}")


def test_10_nonsymmetric_component_potentials(nonsymmetric_run):
    reports = _reports(nonsymmetric_run)
    pu = [r.potential_u for r in reports]
    pv = [r.potential_v for r in reports]
    ru, rv = max(pu) / pu[0], max(pv) / pv[0]
    record(10, "non-symmetric component potentials", ru <= 1.2 and rv <= 1.2,
           f"sweep max / largest-eps value: u {ru:.3f}, v {rv:.3f}")


DETERMINISM = """
domain: {kind: UnitDisk, resolution: 24}
boundary:
  - {type: cos, amplitude: 0.4}
  - {type: sin, amplitude: 0.4}
problem: SymmetricPair
epsilons: [0.4, 0.2, 0.1]
output: {dump_fields: true}
"""


def test_11_determinism(tmp_path):
    cfg = validate_config(DETERMINISM)
    a, b = tmp_path / "a", tmp_path / "b"
    codes = (run(cfg, a).exit_code, run(cfg, b).exit_code)
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file() and p.name != "run_meta.json")
    differing = [str(p) for p in files if (a / p).read_bytes() != (b / p).read_bytes()]
    ok = codes == (0, 0) and not differing and len(files) > 5
    record(11, "determinism", ok, f"{len(files)} data artifacts compared, {len(differing)} differ, exit codes {codes}")
