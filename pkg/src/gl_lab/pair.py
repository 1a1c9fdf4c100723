"""Two-component systems with the symmetric and non-symmetric potentials."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import flow
from .boundary import BoundaryData, require_degree_zero
from .errors import ShapeError
from .grid import Grid, dirichlet_energy, integrate
from .reference import HarmonicLifting, solve_harmonic
from .solver import SolverConfig


class Variant(str, enum.Enum):
    SYMMETRIC = "Symmetric"
    NON_SYMMETRIC = "NonSymmetric"

    @property
    def potential(self) -> flow.Potential:
        return _POTENTIALS[self]


_POTENTIALS = {Variant.SYMMETRIC: flow.SymmetricPair(), Variant.NON_SYMMETRIC: flow.NonSymmetricPair()}


@dataclass(frozen=True, eq=False)
class PairSolution:
    grid: Grid
    u: np.ndarray
    v: np.ndarray
    epsilon: float
    residuals: tuple[float, float]  # unscaled max-norm of each equation
    variant: Variant
    steps_taken: int = 0
    newton_steps: int = 0
    scaled_residual: float = 0.0
    energy_history: list[float] = field(default_factory=list)
    residual_history: list[float] = field(default_factory=list)

    def bound_report(self) -> dict:
        """Pointwise maxima entering the L-infinity bounds for solution pairs."""
        mu = np.abs(self.u) ** 2
        mv = np.abs(self.v) ** 2
        return {
            "max_sum_sq": float(np.max(mu + mv)),
            "max_u_sq": float(np.max(mu)),
            "max_v_sq": float(np.max(mv)),
            "either_modulus_le_one": bool(np.max(mu) <= 1.0 + 10 * self.grid.h**2 or np.max(mv) <= 1.0 + 10 * self.grid.h**2),
        }

    def bounds_hold(self) -> bool:
        slack = 10 * self.grid.h**2
        b = self.bound_report()
        if self.variant is Variant.SYMMETRIC:
            return b["max_sum_sq"] <= 2.0 + slack
        return b["max_u_sq"] <= 1.5 + slack and b["max_v_sq"] <= 2.0 + slack


def _stack(u, v):
    return np.vstack([u.real, u.imag, v.real, v.imag])


def _unstack(X):
    return X[0] + 1j * X[1], X[2] + 1j * X[3]


def combined_potential(grid: Grid, u: np.ndarray, v: np.ndarray, epsilon: float, variant: Variant) -> float:
    """(1/eps^2) * integral V(|u|^2, |v|^2) for the variant's V."""
    return integrate(grid, variant.potential.density(_stack(u, v))) / epsilon**2


def pair_energy(grid: Grid, u: np.ndarray, v: np.ndarray, epsilon: float, variant: Variant | str) -> float:
    """F_eps(u, v) = 1/2 int(|grad u|^2 + |grad v|^2) + 1/(4 eps^2) int V."""
    variant = Variant(variant)
    grid.check(u)
    grid.check(v)
    return dirichlet_energy(grid, u) + dirichlet_energy(grid, v) + 0.25 * combined_potential(grid, u, v, epsilon, variant)


def pair_gradient(
    grid: Grid, u: np.ndarray, v: np.ndarray, epsilon: float, variant: Variant | str
) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise L2 gradient of F_eps; zero on boundary nodes."""
    variant = Variant(variant)
    X = _stack(grid.check(u), grid.check(v))
    return _unstack(flow.l2_gradient(grid, X, variant.potential, epsilon))


def solve_pair(
    g1: BoundaryData,
    g2: BoundaryData,
    grid: Grid,
    config: SolverConfig,
    variant: Variant | str,
    initial: tuple[np.ndarray, np.ndarray] | None = None,
    references: tuple[HarmonicLifting, HarmonicLifting] | None = None,
) -> PairSolution:
    """Coupled semi-implicit flow (plus optional Newton) from (u0, v0)."""
    variant = Variant(variant)
    phi0 = require_degree_zero(g1, "g1")
    psi0 = require_degree_zero(g2, "g2")
    if g1.samples.size != grid.boundary.size or g2.samples.size != grid.boundary.size:
        raise ShapeError("boundary data was sampled on a different grid")
    if initial is None:
        if references is None:
            references = (solve_harmonic(phi0, grid), solve_harmonic(psi0, grid))
        u, v = references[0].u0.copy(), references[1].u0.copy()
    else:
        u, v = (np.array(grid.check(f), dtype=complex) for f in initial)
    u[grid.boundary] = g1.samples
    v[grid.boundary] = g2.samples
    eps = config.epsilon
    pot = variant.potential
    out = flow.solve_kernel(
        grid,
        _stack(u, v),
        pot,
        eps,
        config.step,
        config.max_steps,
        config.residual_tol,
        config.newton,
        config.newton_switch,
        config.newton_max_iter,
    )
    u, v = _unstack(out.X)
    u[grid.boundary] = g1.samples
    v[grid.boundary] = g2.samples
    res = flow.component_residuals(grid, out.X, pot, eps)
    return PairSolution(
        grid,
        u,
        v,
        eps,
        (float(res[0]), float(res[1])),
        variant,
        out.flow_steps,
        out.newton_steps,
        out.residual,
        out.energy_history,
        out.residual_history,
    )
