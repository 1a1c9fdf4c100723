"""Harmonic liftings u0 = exp(i phi), the value alpha, and the constrained
minimiser realising beta over pairs with |u|^2 + |v|^2 = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .boundary import BoundaryData, require_degree_zero
from .errors import ProjectionSingularity, ShapeError, SolverError
from .grid import Grid, dirichlet_energy, laplacian

RADIUS_SQ = 2.0


@dataclass(frozen=True, eq=False)
class HarmonicLifting:
    grid: Grid
    phi: np.ndarray
    u0: np.ndarray
    energy: float
    residual: float
    iterations: int
    residual_history: list[float] = field(default_factory=list)

    @property
    def map_energy(self) -> float:
        """Discrete Dirichlet energy of u0 itself (<= ``energy`` on this mesh)."""
        return dirichlet_energy(self.grid, self.u0)


def solve_harmonic(
    phi0: np.ndarray,
    grid: Grid,
    tol: float | None = None,
    method: str = "cg",
    maxiter: int = 20000,
) -> HarmonicLifting:
    """Discrete Laplace problem with Dirichlet data ``phi0`` on the boundary.

    ``tol`` bounds the max-norm of the discrete Laplacian of the result at
    interior nodes; the default 1e-8 * (1 + max|phi0|) sits just above the
    rounding floor of the polar axis cells at resolution 128.  ``method`` is ``"cg"`` (Jacobi-preconditioned conjugate
    gradients) or ``"direct"`` (sparse LU).
    """
    phi0 = np.asarray(phi0, dtype=float)
    if phi0.shape != grid.boundary.shape:
        raise ShapeError(f"boundary lifting has {phi0.size} values, grid has {grid.boundary.size} boundary nodes")
    if tol is None:
        tol = 1e-8 * (1.0 + float(np.max(np.abs(phi0), initial=0.0)))
    if tol <= 0:
        raise ValueError("tol must be positive")
    kii = grid.stiffness_ii
    rhs = -(grid.stiffness_ib @ phi0)
    phi = np.zeros(grid.n_nodes)
    phi[grid.boundary] = phi0
    history: list[float] = []

    if method == "direct":
        phi[grid.interior] = spla.spsolve(kii, rhs)
        iterations = 1
    elif method == "cg":
        precond = sp.diags(1.0 / kii.diagonal())
        interior_area = grid.area[grid.interior]
        sol = np.zeros(rhs.size)
        iterations = 0

        def scaled(res):
            return float(np.max(np.abs(res) / interior_area, initial=0.0))

        def count(_xk):
            nonlocal iterations
            iterations += 1

        # restarted on the correction: the max-norm Laplacian residual divides
        # by tiny axis cells, so one CG run can stall just above tol
        for _ in range(8):
            res = rhs - kii @ sol
            history.append(scaled(res))
            if history[-1] <= tol / 4 or iterations >= maxiter:
                break
            corr, _info = spla.cg(
                kii, res, rtol=1e-14, atol=0.0, maxiter=maxiter - iterations, M=precond, callback=count
            )
            sol = sol + corr
        phi[grid.interior] = sol
    else:
        raise ValueError(f"unknown method {method!r}")

    residual = float(np.max(np.abs(laplacian(grid, phi)[grid.interior]), initial=0.0))
    if residual > tol:
        raise SolverError(
            f"harmonic solve did not reach tol={tol:g} (residual {residual:.3e} after {iterations} iterations)",
            history,
        )
    u0 = np.exp(1j * phi)
    energy = dirichlet_energy(grid, phi)
    return HarmonicLifting(grid, phi, u0, energy, residual, iterations, history)


def harmonic_from_boundary(b: BoundaryData, grid: Grid, tol: float | None = None, name: str = "g") -> HarmonicLifting:
    return solve_harmonic(require_degree_zero(b, name), grid, tol=tol)


def alpha_value(h1: HarmonicLifting, h2: HarmonicLifting) -> float:
    """alpha(g1, g2) = J(u0) + J(v0) from the two harmonic phase energies."""
    if h1.grid is not h2.grid:
        raise ShapeError("liftings were solved on different grids")
    return h1.energy + h2.energy


# ------------------------------------------------------------------ beta


@dataclass
class BetaFlowConfig:
    scheme: str = "tangent"  # "tangent" (implicit tangent-plane step) or "explicit"
    tau: float | None = None  # None: 1.0 for tangent, stability bound for explicit
    tol: float = 1e-12  # energy decrease per step
    grad_tol: float = 1e-7  # max-norm of the tangential L2 gradient
    max_steps: int = 20000


@dataclass(frozen=True, eq=False)
class ConstrainedPair:
    u_star: np.ndarray
    v_star: np.ndarray
    beta_value: float
    constraint_violation: float
    steps: int
    history: list[float]
    label: str = "a minimizer candidate"


def pair_dirichlet(grid: Grid, u: np.ndarray, v: np.ndarray) -> float:
    return dirichlet_energy(grid, u) + dirichlet_energy(grid, v)


def _stack(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.vstack([u.real, u.imag, v.real, v.imag])


def _unstack(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return X[0] + 1j * X[1], X[2] + 1j * X[3]


def _tangent_basis(X: np.ndarray) -> np.ndarray:
    """Orthonormal basis (3, 4, N) of the tangent space of the 3-sphere at X/|X|.

    Left multiplication of the unit quaternion q by i, j, k.
    """
    q = X / np.linalg.norm(X, axis=0)
    a, b, c, d = q
    return np.array([[-b, a, -d, c], [-c, d, a, -b], [-d, -c, b, a]])


def _project(X: np.ndarray, interior: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(X[:, interior], axis=0)
    if norm.size and norm.min() < 1e-6:
        raise ProjectionSingularity(f"projection singularity: pointwise modulus {norm.min():.3e} < 1e-6")
    out = X.copy()
    out[:, interior] *= math.sqrt(RADIUS_SQ) / norm
    return out


def constraint_violation(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.max(np.abs(np.abs(u) ** 2 + np.abs(v) ** 2 - RADIUS_SQ)))


def minimize_beta(
    g1: BoundaryData,
    g2: BoundaryData,
    grid: Grid,
    config: BetaFlowConfig | None = None,
    initial: tuple[np.ndarray, np.ndarray] | None = None,
) -> ConstrainedPair:
    """Projected gradient flow for I(u, v) = J(u) + J(v) under |u|^2 + |v|^2 = 2.

    Each step moves along the tangent space of the pointwise constraint sphere
    and retracts by radial rescaling.  A tangent move never lowers the
    pointwise norm below sqrt(2), and radial retraction from outside a ball is
    1-Lipschitz, so with positive edge weights the energy never increases.

    The flow starts from the harmonic-map pair (u0, v0), which is feasible.
    """
    cfg = config or BetaFlowConfig()
    if initial is None:
        h1 = harmonic_from_boundary(g1, grid, name="g1")
        h2 = harmonic_from_boundary(g2, grid, name="g2")
        u, v = h1.u0, h2.u0
    else:
        require_degree_zero(g1, "g1")
        require_degree_zero(g2, "g2")
        u, v = (np.asarray(f, dtype=complex).copy() for f in initial)
        u[grid.boundary] = g1.samples
        v[grid.boundary] = g2.samples
    X = _stack(u, v)
    X = _project(X, grid.interior)
    I = grid.interior
    K = grid.stiffness
    area = grid.area[I]

    if cfg.scheme == "explicit":
        kdiag = grid.stiffness.diagonal()[I]
        tau = cfg.tau if cfg.tau is not None else 1.0 / float(np.max(2 * kdiag / area))
    elif cfg.scheme == "tangent":
        tau = cfg.tau if cfg.tau is not None else 1.0
        nI = I.size
        k4 = sp.block_diag([grid.stiffness_ii] * 4, format="csr")
        m4 = sp.diags(np.tile(area, 4))
        system_base = (k4 + m4 / tau).tocsr()
    else:
        raise ValueError(f"unknown beta scheme {cfg.scheme!r}")

    energy = 0.5 * float(np.sum(X * (K @ X.T).T))
    history = [energy]
    for step in range(1, cfg.max_steps + 1):
        KX = (K @ X.T).T[:, I]
        grad = KX / area
        basis = _tangent_basis(X[:, I])
        # tangential component of the L2 gradient, (3, N) coefficients
        coef = np.einsum("tcn,cn->tn", basis, grad)
        gtan = np.max(np.linalg.norm(coef, axis=0), initial=0.0)
        if cfg.scheme == "explicit":
            move = -tau * np.einsum("tcn,tn->cn", basis, coef)
        else:
            rows = (np.arange(4)[:, None, None] * nI + np.arange(nI)[None, None, :]).repeat(3, axis=1)
            cols = (np.arange(3)[None, :, None] * nI + np.arange(nI)[None, None, :]).repeat(4, axis=0)
            vals = np.transpose(basis, (1, 0, 2))
            B = sp.csr_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=(4 * nI, 3 * nI))
            lhs = (B.T @ system_base @ B).tocsc()
            z = spla.spsolve(lhs, -(B.T @ KX.ravel()))
            move = (B @ z).reshape(4, nI)
        Xn = X.copy()
        Xn[:, I] += move
        Xn = _project(Xn, I)
        new_energy = 0.5 * float(np.sum(Xn * (K @ Xn.T).T))
        decrease = energy - new_energy
        X, energy = Xn, new_energy
        history.append(energy)
        if decrease < cfg.tol and gtan <= cfg.grad_tol:
            break
    else:
        raise SolverError(f"beta flow did not converge in {cfg.max_steps} steps", history)

    u, v = _unstack(X)
    u[grid.boundary] = g1.samples
    v[grid.boundary] = g2.samples
    viol = constraint_violation(u[I], v[I])
    return ConstrainedPair(u, v, pair_dirichlet(grid, u, v), viol, step, history)
