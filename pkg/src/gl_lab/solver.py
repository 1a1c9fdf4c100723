"""Single-component Ginzburg-Landau solves on a fixed grid."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import flow
from .boundary import BoundaryData, require_degree_zero
from .errors import ConfigurationError, ShapeError
from .grid import Grid, dirichlet_energy, grad_sq, integrate, laplacian
from .reference import HarmonicLifting, solve_harmonic

SINGLE = flow.SingleWell()


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float
    tau: float | None = None  # None: 0.25 * epsilon^2
    max_steps: int = 20000
    residual_tol: float = 1e-9
    newton: bool = True
    continuation: bool = True
    newton_switch: float = 1e-4
    newton_max_iter: int = 30

    def __post_init__(self):
        problems = []
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            problems.append(f"epsilon must be a positive finite number, got {self.epsilon!r}")
        elif self.tau is not None and not (0 < self.tau <= 0.25 * self.epsilon**2 * (1 + 1e-12)):
            problems.append(f"tau must lie in (0, 0.25*epsilon^2] = (0, {0.25 * self.epsilon**2:g}], got {self.tau!r}")
        if not self.residual_tol > 0:
            problems.append("residual_tol must be positive")
        if self.max_steps < 0:
            problems.append("max_steps must be non-negative")
        if problems:
            raise ConfigurationError("; ".join(problems), problems)

    @property
    def step(self) -> float:
        return self.tau if self.tau is not None else 0.25 * self.epsilon**2

    def at(self, epsilon: float) -> "SolverConfig":
        """Same knobs at another epsilon (an explicit tau is capped at 0.25 eps^2)."""
        tau = None if self.tau is None else min(self.tau, 0.25 * epsilon**2)
        return replace(self, epsilon=epsilon, tau=tau)


@dataclass(frozen=True, eq=False)
class GLSolution:
    grid: Grid
    u: np.ndarray
    epsilon: float
    residual: float
    steps_taken: int
    newton_steps: int = 0
    energy_history: list[float] = field(default_factory=list)
    residual_history: list[float] = field(default_factory=list)

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.u)))

    @property
    def energy(self) -> float:
        return gl_energy(self.grid, self.u, self.epsilon)


def to_stack(u: np.ndarray) -> np.ndarray:
    return np.vstack([u.real, u.imag])


def from_stack(X: np.ndarray) -> np.ndarray:
    return X[0] + 1j * X[1]


def potential_integral(grid: Grid, u: np.ndarray, epsilon: float) -> float:
    """(1/eps^2) * integral (1 - |u|^2)^2."""
    return integrate(grid, (1.0 - np.abs(u) ** 2) ** 2) / epsilon**2


def gl_energy(grid: Grid, u: np.ndarray, epsilon: float) -> float:
    return dirichlet_energy(grid, u) + 0.25 * potential_integral(grid, u, epsilon)


def energy_gradient(grid: Grid, u: np.ndarray, epsilon: float) -> np.ndarray:
    """L2 gradient -lap u - u (1 - |u|^2) / eps^2, zero on boundary nodes."""
    u = grid.check(u)
    return from_stack(flow.l2_gradient(grid, to_stack(u), SINGLE, epsilon))


def pde_residual(grid: Grid, u: np.ndarray, epsilon: float) -> float:
    """Unscaled max-norm of the discrete equation at interior nodes."""
    return float(flow.component_residuals(grid, to_stack(u), SINGLE, epsilon)[0])


def solve_gl(
    g: BoundaryData,
    grid: Grid,
    config: SolverConfig,
    initial: np.ndarray | None = None,
    reference: HarmonicLifting | None = None,
) -> GLSolution:
    """Degree-zero solution of -lap u = u (1 - |u|^2) / eps^2 with u = g on the boundary.

    Starts from the harmonic map u0 = exp(i phi) unless ``initial`` is given
    (continuation or a user-supplied field); boundary values are always reset
    to g.
    """
    phi0 = require_degree_zero(g)
    if g.samples.size != grid.boundary.size:
        raise ShapeError("boundary data was sampled on a different grid")
    if initial is None:
        if reference is None:
            reference = solve_harmonic(phi0, grid)
        u_init = reference.u0.copy()
    else:
        u_init = np.array(grid.check(initial), dtype=complex)
    u_init[grid.boundary] = g.samples
    eps = config.epsilon
    out = flow.solve_kernel(
        grid,
        to_stack(u_init),
        SINGLE,
        eps,
        config.step,
        config.max_steps,
        config.residual_tol,
        config.newton,
        config.newton_switch,
        config.newton_max_iter,
    )
    u = from_stack(out.X)
    u[grid.boundary] = g.samples
    return GLSolution(
        grid, u, eps, out.residual, out.flow_steps, out.newton_steps, out.energy_history, out.residual_history
    )


def modulus_identity_residual(grid: Grid, u: np.ndarray, epsilon: float) -> float:
    """Max-norm over interior nodes of

        -lap(1 - |u|^2) + (2/eps^2) |u|^2 (1 - |u|^2) - 2 |grad u|^2,

    with |grad u|^2 the stencil-consistent node density.  Vanishes up to
    2 |u| times the equation residual for discrete solutions.
    """
    u = grid.check(u)
    w = 1.0 - np.abs(u) ** 2
    expr = -laplacian(grid, w) + (2.0 / epsilon**2) * np.abs(u) ** 2 * w - 2.0 * grad_sq(grid, u)
    return float(np.max(np.abs(expr[grid.interior]), initial=0.0))
