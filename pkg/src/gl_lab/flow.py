"""Shared nonlinear kernel: semi-implicit gradient flow and damped Newton.

Fields are handled as real component stacks ``X`` of shape (m, N): m = 2 for
one complex field (Re u, Im u), m = 4 for a pair (Re u, Im u, Re v, Im v).
A potential model supplies V(X), the force f = -1/4 grad V and its Jacobian;
the energy is

    E(X) = 1/2 sum_c X_c^T K X_c + 1/(4 eps^2) integral V(X)

and its L2 gradient at interior nodes is  -lap X - f(X) / eps^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError
from .grid import Grid, apply_stiffness, integrate


class Potential:
    """Base potential; subclasses define the density and its derivatives."""

    name = "potential"
    n_comp = 2

    def density(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def force(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def force_jacobian(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _outer(X: np.ndarray) -> np.ndarray:
    return np.einsum("an,bn->abn", X, X)


class SingleWell(Potential):
    """(1 - |u|^2)^2."""

    name = "single"
    n_comp = 2

    def density(self, X):
        return (1.0 - np.sum(X * X, axis=0)) ** 2

    def force(self, X):
        return X * (1.0 - np.sum(X * X, axis=0))

    def force_jacobian(self, X):
        s = 1.0 - np.sum(X * X, axis=0)
        return np.eye(2)[:, :, None] * s - 2.0 * _outer(X)


class SymmetricPair(Potential):
    """V_s = (2 - |u|^2 - |v|^2)^2."""

    name = "symmetric"
    n_comp = 4

    @staticmethod
    def _slack(X):
        # grouped as |u|^2 + |v|^2 so swapping u and v is bit-exact
        return 2.0 - ((X[0] * X[0] + X[1] * X[1]) + (X[2] * X[2] + X[3] * X[3]))

    def density(self, X):
        return self._slack(X) ** 2

    def force(self, X):
        return X * self._slack(X)

    def force_jacobian(self, X):
        s = self._slack(X)
        return np.eye(4)[:, :, None] * s - 2.0 * _outer(X)


class NonSymmetricPair(SymmetricPair):
    """V_n = (2 - |u|^2 - |v|^2)^2 + (1 - |u|^2)^2; the extra term acts on u only."""

    name = "nonsymmetric"

    def density(self, X):
        return super().density(X) + (1.0 - np.sum(X[:2] ** 2, axis=0)) ** 2

    def force(self, X):
        f = super().force(X)
        f[:2] += X[:2] * (1.0 - np.sum(X[:2] ** 2, axis=0))
        return f

    def force_jacobian(self, X):
        J = super().force_jacobian(X)
        s = 1.0 - np.sum(X[:2] ** 2, axis=0)
        J[:2, :2] += np.eye(2)[:, :, None] * s - 2.0 * _outer(X[:2])
        return J


# ------------------------------------------------------------ energy & gradient


def dirichlet_part(grid: Grid, X: np.ndarray) -> float:
    a, b = grid.edges[:, 0], grid.edges[:, 1]
    return 0.5 * float(np.sum(grid.weights * (X[:, a] - X[:, b]) ** 2))


def total_energy(grid: Grid, X: np.ndarray, pot: Potential, eps: float) -> float:
    return dirichlet_part(grid, X) + integrate(grid, pot.density(X)) / (4 * eps * eps)


def l2_gradient(grid: Grid, X: np.ndarray, pot: Potential, eps: float) -> np.ndarray:
    """L2 gradient of the energy; zero on boundary nodes."""
    g = apply_stiffness(grid, X) / grid.area - pot.force(X) / (eps * eps)
    g[:, grid.boundary] = 0.0
    return g


def component_residuals(grid: Grid, X: np.ndarray, pot: Potential, eps: float) -> np.ndarray:
    """Max-norm over interior nodes of each complex equation's residual."""
    g = l2_gradient(grid, X, pot, eps)[:, grid.interior]
    mod = np.sqrt(g[0::2] ** 2 + g[1::2] ** 2)
    return np.max(mod, axis=1, initial=0.0)


def scaled_residual(grid: Grid, X: np.ndarray, pot: Potential, eps: float) -> float:
    return float(np.max(component_residuals(grid, X, pot, eps))) / (1.0 + 1.0 / (eps * eps))


# ---------------------------------------------------------------- solvers


@dataclass
class KernelResult:
    X: np.ndarray
    residual: float  # scaled max-norm
    flow_steps: int
    newton_steps: int
    energy_history: list[float] = field(default_factory=list)
    residual_history: list[float] = field(default_factory=list)


def semi_implicit_flow(
    grid: Grid,
    X0: np.ndarray,
    pot: Potential,
    eps: float,
    tau: float,
    max_steps: int,
    stop_residual: float,
    energy_history: list[float],
    residual_history: list[float],
) -> tuple[np.ndarray, int]:
    """Iterate (I - tau lap) X_new = X + tau f(X)/eps^2 with fixed boundary data.

    Returns the last iterate and the number of steps taken; stops early when
    the scaled residual is at most ``stop_residual``.
    """
    I, B = grid.interior, grid.boundary
    area = grid.area[I]
    lu = spla.splu((sp.diags(area) + tau * grid.stiffness_ii).tocsc())
    bterm = tau * (grid.stiffness_ib @ X0[:, B].T)
    X = X0.copy()
    inv_eps2 = 1.0 / (eps * eps)
    res = scaled_residual(grid, X, pot, eps)
    energy_history.append(total_energy(grid, X, pot, eps))
    residual_history.append(res)
    steps = 0
    while res > stop_residual and steps < max_steps:
        rhs = area[:, None] * (X[:, I] + tau * inv_eps2 * pot.force(X[:, I])).T - bterm
        X[:, I] = lu.solve(rhs).T
        steps += 1
        res = scaled_residual(grid, X, pot, eps)
        energy_history.append(total_energy(grid, X, pot, eps))
        residual_history.append(res)
    return X, steps


def _jacobian(grid: Grid, X: np.ndarray, pot: Potential, eps: float) -> sp.csc_matrix:
    I = grid.interior
    m = X.shape[0]
    D = pot.force_jacobian(X[:, I]) * (grid.area[I] / (eps * eps))
    blocks = [[None] * m for _ in range(m)]
    for a in range(m):
        for b in range(m):
            blk = sp.diags(-D[a, b])
            if a == b:
                blk = grid.stiffness_ii + blk
            blocks[a][b] = blk
    J = sp.bmat(blocks, format="csr")
    # node-major unknown ordering keeps each node's m x m block together
    perm = _node_major(I.size, m)
    return J[perm][:, perm].tocsc()


def _node_major(n: int, m: int) -> np.ndarray:
    return (np.arange(n)[:, None] + n * np.arange(m)[None, :]).ravel()


def newton_refine(
    grid: Grid,
    X0: np.ndarray,
    pot: Potential,
    eps: float,
    tol: float,
    max_iter: int,
    energy_history: list[float],
    residual_history: list[float],
) -> tuple[np.ndarray, int]:
    """Damped Newton on the discrete residual with residual backtracking."""
    I = grid.interior
    area = grid.area[I]
    X = X0.copy()
    res = scaled_residual(grid, X, pot, eps)
    for it in range(1, max_iter + 1):
        if res <= tol:
            return X, it - 1
        F = l2_gradient(grid, X, pot, eps)[:, I] * area
        perm = _node_major(I.size, X.shape[0])
        lu = spla.splu(_jacobian(grid, X, pot, eps), permc_spec="MMD_AT_PLUS_A")
        flat = np.empty(F.size)
        flat[perm] = lu.solve(-F.ravel()[perm])
        delta = flat.reshape(F.shape)
        lam = 1.0
        while True:
            trial = X.copy()
            trial[:, I] += lam * delta
            new_res = scaled_residual(grid, trial, pot, eps)
            if np.isfinite(new_res) and new_res < (1.0 - 1e-4 * lam) * res:
                break
            lam *= 0.5
            if lam < 1.0 / 256:
                raise SolverError(
                    f"Newton line search failed at residual {res:.3e} (eps={eps:g})", residual_history
                )
        X, res = trial, new_res
        energy_history.append(total_energy(grid, X, pot, eps))
        residual_history.append(res)
    if res <= tol:
        return X, max_iter
    raise SolverError(f"Newton did not reach tol={tol:g} in {max_iter} iterations (eps={eps:g})", residual_history)


def solve_kernel(
    grid: Grid,
    X0: np.ndarray,
    pot: Potential,
    eps: float,
    tau: float,
    max_steps: int,
    residual_tol: float,
    newton: bool,
    newton_switch: float,
    newton_max_iter: int = 30,
) -> KernelResult:
    energy_history: list[float] = []
    residual_history: list[float] = []
    stop = max(newton_switch, residual_tol) if newton else residual_tol
    X, steps = semi_implicit_flow(grid, X0, pot, eps, tau, max_steps, stop, energy_history, residual_history)
    newton_steps = 0
    if newton and residual_history[-1] > residual_tol:
        X, newton_steps = newton_refine(
            grid, X, pot, eps, residual_tol, newton_max_iter, energy_history, residual_history
        )
    res = scaled_residual(grid, X, pot, eps)
    if res > residual_tol:
        raise SolverError(
            f"flow reached the step cap ({max_steps}) at scaled residual {res:.3e} > {residual_tol:g} (eps={eps:g})",
            residual_history,
        )
    return KernelResult(X, res, steps, newton_steps, energy_history, residual_history)
