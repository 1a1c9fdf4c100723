"""Energy quantities, modulus-phase checks, and sweep verdicts.

Every verdict here is evidence from a finite epsilon sweep, not a proof: a
"decays" trend means the quantity fell by a clear factor with a positive
least-squares slope in log(eps).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order

from .errors import InsufficientData, LiftingUnavailable, ShapeError
from .grid import Grid, dirichlet_energy, integrate
from .pair import PairSolution, Variant, combined_potential
from .reference import HarmonicLifting
from .solver import GLSolution, modulus_identity_residual, potential_integral

DELTAS = (0.25, 0.1)
CSV_COLUMNS = (
    "epsilon",
    "dirichlet_u",
    "dirichlet_v",
    "potential_combined",
    "potential_u",
    "potential_v",
    "sup_dev_u",
    "sup_dev_v",
    "h1_dist_u",
    "h1_dist_v",
    "residual",
    "steps",
    "identity_1_7",
    "div_residual_u",
    "div_residual_v",
    "omega_set_area_d025",
    "omega_set_area_d010",
)

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"


# ------------------------------------------------------------ field metrics


def h1_distance(grid: Grid, a: np.ndarray, b: np.ndarray) -> float:
    """Discrete H^1 norm of a - b (L2 part plus stencil-consistent gradient part)."""
    d = grid.check(a) - grid.check(b)
    return math.sqrt(integrate(grid, np.abs(d) ** 2) + 2.0 * dirichlet_energy(grid, d))


def sup_deviation(u: np.ndarray) -> float:
    return float(np.max(np.abs(1.0 - np.abs(u))))


def omega_set_area(grid: Grid, defect: np.ndarray, delta: float) -> float:
    """Area of {x : 1 - |u|^2 > delta} for the given defect field 1 - |u|^2."""
    return float(np.sum(grid.area[defect > delta]))


def component_potential(grid: Grid, u: np.ndarray, epsilon: float) -> float:
    return potential_integral(grid, u, epsilon)


# ------------------------------------------------------------ modulus / phase


@dataclass(frozen=True, eq=False)
class ModulusPhase:
    """u = rho exp(i zeta) with zeta = phi0 on the boundary; eta = zeta - phi."""

    rho: np.ndarray
    zeta: np.ndarray
    eta: np.ndarray
    div_residual: float


def _bfs_tree(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Breadth-first order from a virtual root joined to every boundary node."""
    n = grid.n_nodes
    e = grid.edges
    root = n
    rows = np.concatenate([e[:, 0], e[:, 1], np.full(grid.boundary.size, root), grid.boundary])
    cols = np.concatenate([e[:, 1], e[:, 0], grid.boundary, np.full(grid.boundary.size, root)])
    adj = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n + 1, n + 1))
    order, pred = breadth_first_order(adj, root, directed=False, return_predecessors=True)
    return order, pred


def unwrap_phase(grid: Grid, u: np.ndarray, phi0: np.ndarray) -> np.ndarray:
    """Continuous phase of u by path integration of principal increments.

    Seeds are the boundary lifting phi0; every interior node inherits the phase
    of its breadth-first parent plus the principal angle between the two.
    """
    order, pred = _bfs_tree(grid)
    zeta = np.empty(grid.n_nodes)
    zeta[grid.boundary] = phi0
    is_bnd = grid.is_boundary
    for node in order[1:]:
        if is_bnd[node]:
            continue
        p = pred[node]
        zeta[node] = zeta[p] + np.angle(u[node] * np.conj(u[p]))
    return zeta


def divergence_residual(grid: Grid, rho: np.ndarray, zeta: np.ndarray) -> float:
    """Max-norm at interior nodes of div(rho^2 grad zeta), edge rho^2 = rho_a rho_b.

    With rho = 1 this is exactly the discrete Laplacian of zeta.  For discrete
    solutions it is O(h): the exactly conserved current is rho_a rho_b
    sin(zeta_b - zeta_a), which differs from the linear flux at third order.
    """
    a, b = grid.edges[:, 0], grid.edges[:, 1]
    flux = grid.weights * rho[a] * rho[b] * (zeta[b] - zeta[a])
    n = grid.n_nodes
    div = (np.bincount(a, weights=flux, minlength=n) - np.bincount(b, weights=flux, minlength=n)) / grid.area
    return float(np.max(np.abs(div[grid.interior]), initial=0.0))


def decompose(grid: Grid, u: np.ndarray, reference: HarmonicLifting) -> ModulusPhase:
    """Modulus-phase split of u relative to the harmonic lifting phi.

    Raises LiftingUnavailable if |u| < 1/2 anywhere.
    """
    u = grid.check(u)
    rho = np.abs(u)
    if rho.min() < 0.5:
        raise LiftingUnavailable(f"lifting unavailable: min |u| = {rho.min():.3e} < 1/2")
    zeta = unwrap_phase(grid, u, reference.phi[grid.boundary])
    return ModulusPhase(rho, zeta, zeta - reference.phi, divergence_residual(grid, rho, zeta))


# ------------------------------------------------------------ energy reports


@dataclass
class EnergyReport:
    epsilon: float
    dirichlet_u: float
    potential_combined: float
    potential_u: float
    sup_dev_u: float
    h1_dist_u: float
    residual: float
    steps: int
    g_energy: float
    omega_set_area_d025: float
    omega_set_area_d010: float
    dirichlet_v: float | None = None
    potential_v: float | None = None
    sup_dev_v: float | None = None
    h1_dist_v: float | None = None
    identity_1_7: float | None = None
    div_residual_u: float | None = None
    div_residual_v: float | None = None
    # not in the sweep CSV; kept in per-solve records
    max_modulus_u: float | None = None
    max_modulus_v: float | None = None
    max_sum_sq: float | None = None
    grad_defect: float | None = None
    interior_dev: float | None = None
    newton_steps: int = 0
    failed: bool = False
    message: str = ""

    @property
    def dirichlet_total(self) -> float:
        return self.dirichlet_u + (self.dirichlet_v or 0.0)

    def csv_row(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in CSV_COLUMNS}

    def record(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def failure(cls, epsilon: float, message: str) -> "EnergyReport":
        nan = float("nan")
        return cls(epsilon, nan, nan, nan, nan, nan, nan, 0, nan, nan, nan, failed=True, message=message)


def _omega_areas(grid: Grid, defect: np.ndarray) -> tuple[float, float]:
    return tuple(omega_set_area(grid, defect, d) for d in DELTAS)  # type: ignore[return-value]


def _single_report(sol: GLSolution, ref: HarmonicLifting) -> EnergyReport:
    grid, u, eps = sol.grid, sol.u, sol.epsilon
    defect = 1.0 - np.abs(u) ** 2
    pot = potential_integral(grid, u, eps)
    dirichlet = dirichlet_energy(grid, u)
    try:
        div = decompose(grid, u, ref).div_residual
    except LiftingUnavailable:
        div = None
    a025, a010 = _omega_areas(grid, defect)
    return EnergyReport(
        epsilon=eps,
        dirichlet_u=dirichlet,
        potential_combined=pot,
        potential_u=pot,
        sup_dev_u=sup_deviation(u),
        h1_dist_u=h1_distance(grid, u, ref.u0),
        residual=sol.residual,
        steps=sol.steps_taken + sol.newton_steps,
        g_energy=dirichlet + 0.25 * pot,
        omega_set_area_d025=a025,
        omega_set_area_d010=a010,
        identity_1_7=modulus_identity_residual(grid, u, eps),
        div_residual_u=div,
        max_modulus_u=float(np.max(np.abs(u))),
        grad_defect=2.0 * dirichlet_energy(grid, defect),
        interior_dev=float(np.max(np.abs(u - ref.u0)[grid.inner_half])),
        newton_steps=sol.newton_steps,
    )


def _pair_report(sol: PairSolution, refs: tuple[HarmonicLifting, HarmonicLifting]) -> EnergyReport:
    grid, u, v, eps = sol.grid, sol.u, sol.v, sol.epsilon
    ru, rv = refs
    du = 1.0 - np.abs(u) ** 2
    dv = 1.0 - np.abs(v) ** 2
    comb = combined_potential(grid, u, v, eps, sol.variant)
    divs = []
    for f, ref in ((u, ru), (v, rv)):
        try:
            divs.append(decompose(grid, f, ref).div_residual)
        except LiftingUnavailable:
            divs.append(None)
    a025, a010 = _omega_areas(grid, np.maximum(du, dv))
    d_u, d_v = dirichlet_energy(grid, u), dirichlet_energy(grid, v)
    inner = grid.inner_half
    return EnergyReport(
        epsilon=eps,
        dirichlet_u=d_u,
        dirichlet_v=d_v,
        potential_combined=comb,
        potential_u=potential_integral(grid, u, eps),
        potential_v=potential_integral(grid, v, eps),
        sup_dev_u=sup_deviation(u),
        sup_dev_v=sup_deviation(v),
        h1_dist_u=h1_distance(grid, u, ru.u0),
        h1_dist_v=h1_distance(grid, v, rv.u0),
        residual=sol.scaled_residual,
        steps=sol.steps_taken + sol.newton_steps,
        g_energy=d_u + d_v + 0.25 * comb,
        omega_set_area_d025=a025,
        omega_set_area_d010=a010,
        div_residual_u=divs[0],
        div_residual_v=divs[1],
        max_modulus_u=float(np.max(np.abs(u))),
        max_modulus_v=float(np.max(np.abs(v))),
        max_sum_sq=float(np.max(np.abs(u) ** 2 + np.abs(v) ** 2)),
        grad_defect=2.0 * (dirichlet_energy(grid, du) + dirichlet_energy(grid, dv)),
        interior_dev=float(max(np.max(np.abs(u - ru.u0)[inner]), np.max(np.abs(v - rv.u0)[inner]))),
        newton_steps=sol.newton_steps,
    )


def energy_report(solution: GLSolution | PairSolution, reference) -> EnergyReport:
    """Package every diagnostic quantity for one converged solution.

    ``reference`` is the HarmonicLifting of g (single field) or the pair of
    liftings of (g1, g2).
    """
    if isinstance(solution, PairSolution):
        refs = tuple(reference)
        if len(refs) != 2:
            raise ShapeError("pair reports need two harmonic liftings")
        return _pair_report(solution, refs)  # type: ignore[arg-type]
    return _single_report(solution, reference)


# ------------------------------------------------------------ sweeps


@dataclass
class SweepReport:
    """Per-epsilon reports plus the reference energies they are judged against.

    ``references`` keys: ``dirichlet_u0`` (and ``dirichlet_v0``) are the
    discrete energies 1/2 int |grad u0|^2; ``alpha``, ``beta`` for pairs.
    """

    problem: str
    rows: list[EnergyReport]
    references: dict[str, float]
    h: float
    domain: dict = field(default_factory=dict)

    def __post_init__(self):
        eps = [r.epsilon for r in self.rows]
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilon values must be strictly decreasing")

    @property
    def is_pair(self) -> bool:
        return self.problem != "Single"

    @property
    def reference_energy(self) -> float:
        return self.references["dirichlet_u0"] + self.references.get("dirichlet_v0", 0.0)

    def observed_gamma(self) -> dict[str, float | None]:
        """Suprema over the sweep of the potential integrals (observed values, not a priori constants)."""
        ok = [r for r in self.rows if not r.failed]

        def sup(values):
            vals = [x for x in values if x is not None]
            return max(vals) if vals else None

        out: dict[str, float | None] = {"gamma0": None, "gamma1": None, "gamma2": None, "gamma3": None, "gamma4": None}
        if self.problem == "Single":
            out["gamma0"] = sup(r.potential_u for r in ok)
        else:
            key = "gamma1" if self.problem == "SymmetricPair" else "gamma2"
            out[key] = sup(r.potential_combined for r in ok)
            out["gamma3"] = sup(r.potential_u for r in ok)
            out["gamma4"] = sup(r.potential_v for r in ok)
        return out


@dataclass
class Trend:
    first: float
    last: float
    ratio: float  # first / last
    slope: float  # least-squares d log(q) / d log(eps)
    monotone: bool  # every level <= 1.05 x previous
    trivial: bool  # identically ~0

    @property
    def decays(self) -> bool:
        return self.trivial or (self.ratio >= 10.0 and self.slope > 0.5)

    @property
    def persists(self) -> bool:
        return not self.trivial and self.ratio <= 1.5

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(decays=self.decays, persists=self.persists)
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


ZERO_FLOOR = 1e-12


def trend(eps: Sequence[float], values: Sequence[float]) -> Trend:
    q = np.asarray(values, dtype=float)
    e = np.asarray(eps, dtype=float)
    if np.all(np.abs(q) <= ZERO_FLOOR):
        return Trend(float(q[0]), float(q[-1]), float("inf"), float("inf"), True, True)
    qq = np.maximum(q, ZERO_FLOOR)
    slope = float(np.polyfit(np.log(e), np.log(qq), 1)[0])
    ratio = float(qq[0] / qq[-1])
    monotone = bool(np.all(q[1:] <= 1.05 * q[:-1] + ZERO_FLOOR))
    return Trend(float(q[0]), float(q[-1]), ratio, slope, monotone, False)


def _verdict(name: str, branch: str, verdict: str, **extra) -> dict:
    out = {"check": name, "branch": branch, "verdict": verdict, "label": "trend-based"}
    out.update(extra)
    return out


def energy_tolerance(reference_energy: float) -> float:
    return 0.05 * (1.0 + reference_energy)


def _dichotomy(
    name: str,
    dirichlet: list[float],
    ref: float,
    c_upper: float,
    c_lower: float | None,
    below_trends: Mapping[str, Trend],
    above_trend: tuple[str, Trend, str],
) -> dict:
    """Shared logic of the (i)/(ii) energy dichotomy.

    Branch (i): max D <= C <= ref.  Conclusion: C = ref, and every trend in
    ``below_trends`` decays.  Branch (ii): min D >= C' > ref.  Conclusion: the
    ``above_trend`` quantity does not decay.
    """
    tol = energy_tolerance(ref)
    d_max, d_min = max(dirichlet), min(dirichlet)
    c_lower = d_min if c_lower is None else c_lower
    margins = {"dirichlet_max": d_max, "dirichlet_min": d_min, "reference": ref, "tolerance": tol}
    if d_max <= c_upper + tol and c_upper <= ref + tol:
        margins.update(C=c_upper, C_minus_reference=c_upper - ref)
        trends = {k: t.as_dict() for k, t in below_trends.items()}
        if c_upper < ref - tol:
            return _verdict(name, "(i)", INCONSISTENT, margins=margins, trends=trends,
                            note="energy bounded strictly below the harmonic-map energy")
        if all(t.decays for t in below_trends.values()):
            return _verdict(name, "(i)", CONSISTENT, margins=margins, trends=trends)
        if any(t.persists for t in below_trends.values()):
            return _verdict(name, "(i)", INCONSISTENT, margins=margins, trends=trends,
                            note="H1 distance to the reference does not decay")
        return _verdict(name, "(i)", INCONCLUSIVE, margins=margins, trends=trends)
    if d_min >= c_lower and c_lower > ref + tol:
        label, t, what = above_trend
        margins.update(C=c_lower, C_minus_reference=c_lower - ref)
        trends = {label: t.as_dict()}
        if t.decays:
            return _verdict(name, "(ii)", INCONSISTENT, margins=margins, trends=trends, note=f"{what} decays")
        if t.persists:
            return _verdict(name, "(ii)", CONSISTENT, margins=margins, trends=trends)
        return _verdict(name, "(ii)", INCONCLUSIVE, margins=margins, trends=trends)
    return _verdict(name, "none", INCONCLUSIVE, margins=margins, note="neither energy hypothesis holds")


def classify_sweep(report: SweepReport, thresholds: Mapping[str, float] | None = None) -> dict[str, dict]:
    """Verdicts for every applicable check on a converged sweep.

    Thresholds C1..C6 default to the reference energies (the tight case);
    C2, C4, C6 default to the sweep minimum of the Dirichlet energy.
    """
    th = dict(thresholds or {})
    rows = report.rows
    if len(rows) < 3:
        raise InsufficientData(f"need at least 3 epsilon levels, got {len(rows)}")
    failed = [r.epsilon for r in rows if r.failed]
    if failed:
        raise InsufficientData(f"unconverged levels: {failed}")
    eps = [r.epsilon for r in rows]
    dir_total = [r.dirichlet_total for r in rows]
    ref = report.reference_energy
    tol = energy_tolerance(ref)
    slack = 10 * report.h**2
    verdicts: dict[str, dict] = {}
    gam = report.observed_gamma()

    if report.problem == "Single":
        h1 = trend(eps, [r.h1_dist_u for r in rows])
        pot = trend(eps, [r.potential_u for r in rows])
        sup = trend(eps, [r.sup_dev_u for r in rows])
        verdicts["energy_dichotomy"] = _dichotomy(
            "energy dichotomy", dir_total, ref, th.get("C1", ref), th.get("C2"), {"h1_dist_u": h1}, ("sup_dev_u", sup, "sup |1-|u||")
        )
        if pot.decays and h1.decays:
            v12 = CONSISTENT
        elif (pot.decays and h1.persists) or (h1.decays and pot.persists):
            v12 = INCONSISTENT
        else:
            v12 = INCONCLUSIVE
        verdicts["potential_h1_equivalence"] = _verdict(
            "potential / H1 co-decay", "equivalence", v12, trends={"potential_u": pot.as_dict(), "h1_dist_u": h1.as_dict()}
        )
        verdicts["energy_lower_bound"] = _verdict(
            "liminf of Dirichlet energy",
            "liminf",
            CONSISTENT if min(dir_total) >= ref - tol else INCONSISTENT,
            margins={"dirichlet_min": min(dir_total), "reference": ref, "tolerance": tol},
        )
        mods = [r.max_modulus_u for r in rows if r.max_modulus_u is not None]
        if mods:
            verdicts["maximum_principle"] = _verdict(
                "max principle",
                "|u| <= 1",
                CONSISTENT if max(mods) <= 1.0 + slack else INCONSISTENT,
                margins={"max_modulus": max(mods), "bound": 1.0 + slack},
            )
        verdicts["potential_bound"] = _pohozaev("gamma0", [r.potential_u for r in rows])
    else:
        hu = trend(eps, [r.h1_dist_u for r in rows])
        hv = trend(eps, [r.h1_dist_v for r in rows])
        comb = trend(eps, [r.potential_combined for r in rows])
        sym = report.problem == "SymmetricPair"
        verdicts["pair_bounds"] = _pair_bounds(rows, sym, slack)
        if not sym:
            verdicts["nonsymmetric_dichotomy"] = _dichotomy(
                "non-symmetric energy dichotomy", dir_total, ref, th.get("C3", ref), th.get("C4"),
                {"h1_dist_u": hu, "h1_dist_v": hv}, ("potential_combined", comb, "combined potential"),
            )
            verdicts["potential_bound"] = _pohozaev("gamma2", [r.potential_combined for r in rows])
            verdicts["component_potentials"] = _finite_components(rows)
        else:
            verdicts["potential_bound"] = _pohozaev("gamma1", [r.potential_combined for r in rows])
            verdicts["symmetric_dichotomy"] = _symmetric_dichotomy(report, th, eps, dir_total, comb, hu, hv, gam)
    for v in verdicts.values():
        v.setdefault("observed_gamma", gam)
    return verdicts


def _pohozaev(key: str, values: list[float]) -> dict:
    first = values[0]
    peak = max(values)
    bounded = peak <= 1.2 * first or peak <= ZERO_FLOOR
    return _verdict(
        f"bounded potential ({key})",
        "bounded",
        CONSISTENT if bounded else INCONCLUSIVE,
        margins={"largest_eps_value": first, "sweep_max": peak, "ratio": (peak / first) if first > 0 else None},
        label="observed supremum",
    )


def _finite_components(rows: list[EnergyReport]) -> dict:
    pu = [r.potential_u for r in rows]
    pv = [r.potential_v for r in rows]
    ok = max(pu) <= 1.2 * pu[0] + ZERO_FLOOR and max(pv) <= 1.2 * pv[0] + ZERO_FLOOR
    return _verdict(
        "component potentials",
        "bounded",
        CONSISTENT if ok else INCONCLUSIVE,
        margins={"potential_u_max": max(pu), "potential_u_first": pu[0], "potential_v_max": max(pv), "potential_v_first": pv[0]},
        label="observed supremum",
    )


def _pair_bounds(rows: list[EnergyReport], symmetric: bool, slack: float) -> dict:
    sum_sq = max(r.max_sum_sq for r in rows if r.max_sum_sq is not None) if rows[0].max_sum_sq is not None else None
    mu = max((r.max_modulus_u or 0.0) for r in rows) ** 2
    mv = max((r.max_modulus_v or 0.0) for r in rows) ** 2
    if symmetric:
        ok = sum_sq is not None and sum_sq <= 2.0 + slack
        margins = {"max_sum_sq": sum_sq, "bound": 2.0 + slack}
    else:
        ok = mu <= 1.5 + slack and mv <= 2.0 + slack
        margins = {"max_u_sq": mu, "max_v_sq": mv, "bounds": [1.5 + slack, 2.0 + slack]}
    either = all(
        (r.max_modulus_u or 0.0) ** 2 <= 1.0 + slack or (r.max_modulus_v or 0.0) ** 2 <= 1.0 + slack for r in rows
    )
    margins["either_modulus_le_one"] = either
    return _verdict("pointwise pair bounds", "symmetric" if symmetric else "non-symmetric", CONSISTENT if ok else INCONSISTENT,
                    margins=margins, label="pointwise")


def _symmetric_dichotomy(report, th, eps, dir_total, comb, hu, hv, gam) -> dict:
    refs = report.references
    alpha, beta = refs.get("alpha"), refs.get("beta")
    if beta is None or alpha is None:
        return _verdict("symmetric energy dichotomy", "none", INCONCLUSIVE, note="beta reference not computed")
    tol = energy_tolerance(beta)
    gap = alpha - beta
    equal = abs(gap) <= 1e-3
    d_max, d_min = max(dir_total), min(dir_total)
    margins = {"alpha": alpha, "beta": beta, "alpha_minus_beta": gap, "dirichlet_max": d_max,
               "dirichlet_min": d_min, "tolerance": tol}
    c5 = th.get("C5", beta)
    if d_max <= c5 + tol and c5 <= beta + tol:
        trends = {"potential_combined": comb.as_dict()}
        wanted = [comb]
        if equal:
            trends.update(h1_dist_u=hu.as_dict(), h1_dist_v=hv.as_dict())
            wanted += [hu, hv]
        if all(t.decays for t in wanted):
            verdict = CONSISTENT
        elif any(t.persists for t in wanted):
            verdict = INCONSISTENT
        else:
            verdict = INCONCLUSIVE
        return _verdict("symmetric energy dichotomy", "(i)", verdict, margins=margins, trends=trends)
    g1, g3, g4 = gam.get("gamma1"), gam.get("gamma3"), gam.get("gamma4")
    surrogate = report.reference_energy + math.sqrt(g1 * g3) + math.sqrt(g1 * g4)
    c6 = th.get("C6", d_min)
    margins.update(C6=c6, threshold_with_observed_gammas=surrogate)
    if equal and d_min >= c6 and c6 > surrogate:
        su = trend(eps, [r.sup_dev_u for r in report.rows])
        sv = trend(eps, [r.sup_dev_v for r in report.rows])
        trends = {"sup_dev_u": su.as_dict(), "sup_dev_v": sv.as_dict()}
        if su.decays and sv.decays:
            verdict = INCONSISTENT
        elif su.persists or sv.persists:
            verdict = CONSISTENT
        else:
            verdict = INCONCLUSIVE
        return _verdict("symmetric energy dichotomy", "(ii)", verdict, margins=margins, trends=trends, label="observed-constant surrogate")
    note = "neither energy hypothesis holds"
    if gap > 1e-3:
        note += "; alpha > beta regime (component potentials may diverge)"
    return _verdict("symmetric energy dichotomy", "none", INCONCLUSIVE, margins=margins, note=note)


def verdict_summary(verdicts: Mapping[str, Mapping]) -> str:
    if any(v["verdict"] == INCONSISTENT for v in verdicts.values()):
        return INCONSISTENT
    return CONSISTENT


def reports_from_rows(rows: Iterable[Mapping[str, Any]]) -> list[EnergyReport]:
    """Rebuild EnergyReports from stored CSV rows and/or per-solve records."""
    out = []
    names = EnergyReport.__dataclass_fields__
    for row in rows:
        kwargs = {k: row[k] for k in names if k in row}
        kwargs.setdefault("g_energy", float("nan"))
        out.append(EnergyReport(**kwargs))
    return out
