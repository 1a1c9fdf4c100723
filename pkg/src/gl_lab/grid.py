"""Discrete star-shaped domains and the operators every solver shares.

Both domain kinds are described the same way: a flat node numbering, a cell
area per node, and a list of weighted edges.  The discrete Dirichlet energy is

    1/2 * sum_edges w_e |f(a) - f(b)|^2

and the discrete Laplacian is its area-normalised first variation,

    (lap f)_i = (1/A_i) * sum_j w_ij (f_j - f_i)     (interior i only).

On the unit square this is the 5-point stencil; on the unit disk it is the
finite-volume polar stencil whose origin node averages the innermost ring.
Because the energy and the Laplacian come from the same edge list, the
summation-by-parts identity holds exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ShapeError

MIN_RESOLUTION = 8


class DomainKind(str, enum.Enum):
    UNIT_SQUARE = "UnitSquare"
    UNIT_DISK = "UnitDisk"

    @classmethod
    def parse(cls, value: "DomainKind | str") -> "DomainKind":
        if isinstance(value, cls):
            return value
        key = str(value).replace("_", "").replace("-", "").lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ConfigurationError(f"unknown domain kind {value!r} (expected UnitSquare or UnitDisk)")


@dataclass(frozen=True, eq=False)
class Grid:
    """Immutable node/edge description of a discretised domain.

    Attributes
    ----------
    kind, resolution
        What was asked for.  For the square, ``resolution`` interior points
        per axis; for the disk, ``resolution`` radial intervals and
        ``4 * resolution`` angular sectors.
    x, y : (N,) arrays
        Node coordinates.
    area : (N,) array
        Dual-cell area of every node; sums to |Omega| exactly.
    interior, boundary : integer arrays
        Disjoint index sets covering all nodes.  ``boundary`` is ordered
        counterclockwise and visits the boundary exactly once.
    edges : (E, 2) integer array, weights : (E,) array
        Conductances of the discrete Dirichlet form.
    h : float
        Mesh size (lattice spacing on the square, radial spacing on the disk).
    """

    kind: DomainKind
    resolution: int
    x: np.ndarray
    y: np.ndarray
    area: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    h: float
    n_theta: int = 0

    def __post_init__(self):
        for arr in (self.x, self.y, self.area, self.interior, self.boundary, self.edges, self.weights):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.x.size

    @property
    def domain_area(self) -> float:
        return math.pi if self.kind is DomainKind.UNIT_DISK else 1.0

    @cached_property
    def is_boundary(self) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.boundary] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def theta(self) -> np.ndarray:
        """Polar angle about the domain centre (the star centre)."""
        cx, cy = self.center
        return np.arctan2(self.y - cy, self.x - cx)

    @property
    def center(self) -> tuple[float, float]:
        return (0.0, 0.0) if self.kind is DomainKind.UNIT_DISK else (0.5, 0.5)

    @cached_property
    def radius(self) -> np.ndarray:
        cx, cy = self.center
        return np.hypot(self.x - cx, self.y - cy)

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Symmetric graph Laplacian K with 1/2 f^T K f the Dirichlet energy."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.weights
        n = self.n_nodes
        off = sp.coo_matrix((np.concatenate([-w, -w]), (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n))
        diag = np.bincount(i, weights=w, minlength=n) + np.bincount(j, weights=w, minlength=n)
        return (off + sp.diags(diag)).tocsr()

    @cached_property
    def stiffness_ii(self) -> sp.csc_matrix:
        return self.stiffness[self.interior][:, self.interior].tocsc()

    @cached_property
    def stiffness_ib(self) -> sp.csr_matrix:
        return self.stiffness[self.interior][:, self.boundary].tocsr()

    @cached_property
    def inner_half(self) -> np.ndarray:
        """Nodes of the concentric half-size subdomain (interior proxy region)."""
        if self.kind is DomainKind.UNIT_DISK:
            return np.flatnonzero(self.radius <= 0.5 + 1e-12)
        cx, cy = self.center
        return np.flatnonzero((np.abs(self.x - cx) <= 0.25 + 1e-12) & (np.abs(self.y - cy) <= 0.25 + 1e-12))

    def check(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        if values.shape[-1] != self.n_nodes:
            raise ShapeError(f"field has {values.shape[-1]} nodes, grid has {self.n_nodes}")
        return values

    def describe(self) -> dict:
        return {"kind": self.kind.value, "resolution": self.resolution, "node_count": int(self.n_nodes)}


def build_grid(kind: DomainKind | str, resolution: int) -> Grid:
    """Build a unit square or unit disk grid.

    >>> g = build_grid("UnitSquare", 8)
    >>> len(g.interior), len(g.boundary)
    (64, 36)
    """
    kind = DomainKind.parse(kind)
    if isinstance(resolution, bool) or not isinstance(resolution, (int, np.integer)):
        raise ConfigurationError(f"resolution must be an integer, got {resolution!r}")
    if resolution < MIN_RESOLUTION:
        raise ConfigurationError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    if kind is DomainKind.UNIT_SQUARE:
        return _square(int(resolution))
    return _disk(int(resolution))


def _square(n: int) -> Grid:
    m = n + 2
    h = 1.0 / (n + 1)
    # node id = row * m + col, x = col*h, y = row*h
    rows, cols = np.divmod(np.arange(m * m), m)
    x = cols * h
    y = rows * h
    on_edge_x = (cols == 0) | (cols == m - 1)
    on_edge_y = (rows == 0) | (rows == m - 1)
    area = np.full(m * m, h * h)
    area[on_edge_x ^ on_edge_y] = h * h / 2
    area[on_edge_x & on_edge_y] = h * h / 4

    bnd_mask = on_edge_x | on_edge_y
    interior = np.flatnonzero(~bnd_mask)

    def nid(r, c):
        return r * m + c

    # counterclockwise from the origin corner
    ring = [nid(0, c) for c in range(m - 1)]
    ring += [nid(r, m - 1) for r in range(m - 1)]
    ring += [nid(m - 1, c) for c in range(m - 1, 0, -1)]
    ring += [nid(r, 0) for r in range(m - 1, 0, -1)]
    boundary = np.array(ring, dtype=np.int64)

    idx = np.arange(m * m).reshape(m, m)
    horiz = np.column_stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()])
    vert = np.column_stack([idx[:-1, :].ravel(), idx[1:, :].ravel()])
    edges = np.vstack([horiz, vert])
    # edges running along the boundary bound only half a dual cell
    both = bnd_mask[edges[:, 0]] & bnd_mask[edges[:, 1]]
    weights = np.where(both, 0.5, 1.0)
    return Grid(DomainKind.UNIT_SQUARE, n, x, y, area, interior, boundary, edges, weights, h)


def _disk(n: int) -> Grid:
    nr, nt = n, 4 * n
    dr = 1.0 / nr
    dt = 2.0 * math.pi / nt
    # node 0 = origin; ring j (1..nr), sector k -> 1 + (j-1)*nt + k
    j = np.repeat(np.arange(1, nr + 1), nt)
    k = np.tile(np.arange(nt), nr)
    r = j * dr
    th = k * dt
    x = np.concatenate([[0.0], r * np.cos(th)])
    y = np.concatenate([[0.0], r * np.sin(th)])

    area = np.empty(1 + nr * nt)
    area[0] = math.pi * dr * dr / 4
    area[1:] = r * dr * dt
    outer = j == nr
    area[1:][outer] = 0.5 * (1.0 - (1.0 - dr / 2) ** 2) * dt

    def nid(jj, kk):
        return 1 + (jj - 1) * nt + (kk % nt)

    ks = np.arange(nt)
    e_center = np.column_stack([np.zeros(nt, dtype=np.int64), nid(1, ks)])
    w_center = np.full(nt, dt / 2)
    jr = np.repeat(np.arange(1, nr), nt)
    kr = np.tile(ks, nr - 1)
    e_rad = np.column_stack([nid(jr, kr), nid(jr + 1, kr)])
    w_rad = (jr + 0.5) * dr * dt / dr
    ja = np.repeat(np.arange(1, nr + 1), nt)
    ka = np.tile(ks, nr)
    e_ang = np.column_stack([nid(ja, ka), nid(ja, ka + 1)])
    w_ang = dr / (ja * dr * dt)
    w_ang = np.where(ja == nr, w_ang / 2, w_ang)

    edges = np.vstack([e_center, e_rad, e_ang]).astype(np.int64)
    weights = np.concatenate([w_center, w_rad, w_ang])
    boundary = nid(nr, ks).astype(np.int64)
    interior = np.setdiff1d(np.arange(1 + nr * nt), boundary)
    return Grid(DomainKind.UNIT_DISK, n, x, y, area, interior, boundary, edges, weights, dr, n_theta=nt)


# ---------------------------------------------------------------- operators


def apply_stiffness(grid: Grid, f: np.ndarray) -> np.ndarray:
    """K f accumulated from edge differences, so constants map to exact zeros.

    Works on real or complex arrays, and on stacks whose last axis is nodes.
    """
    f = grid.check(f)
    if np.iscomplexobj(f):
        return apply_stiffness(grid, f.real) + 1j * apply_stiffness(grid, f.imag)
    n = grid.n_nodes
    a, b = grid.edges[:, 0], grid.edges[:, 1]
    rows = f.reshape(-1, n)
    out = np.empty(rows.shape)
    for k, row in enumerate(rows):
        flux = grid.weights * (row[a] - row[b])
        out[k] = np.bincount(a, flux, n) - np.bincount(b, flux, n)
    return out.reshape(f.shape)


def laplacian(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Discrete Laplacian at interior nodes; boundary entries are zero.

    Works on real or complex arrays, and on stacks whose last axis is nodes.
    """
    out = -apply_stiffness(grid, f) / grid.area
    out[..., grid.boundary] = 0
    return out


def integrate(grid: Grid, f: np.ndarray) -> float:
    """Area-weighted quadrature of a scalar grid function."""
    f = grid.check(f)
    return float(f @ grid.area)


def edge_differences(grid: Grid, f: np.ndarray) -> np.ndarray:
    f = grid.check(f)
    return f[..., grid.edges[:, 1]] - f[..., grid.edges[:, 0]]


def grad_dot(grid: Grid, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Node density of Re(grad a . conj grad b), consistent with the stiffness.

    Integrating it reproduces sum_e w_e Re(da conj(db)) exactly.
    """
    da = edge_differences(grid, a)
    db = edge_differences(grid, b)
    prod = np.real(da * np.conj(db)) * grid.weights
    n = grid.n_nodes
    dens = np.bincount(grid.edges[:, 0], weights=prod, minlength=n)
    dens += np.bincount(grid.edges[:, 1], weights=prod, minlength=n)
    return dens / (2 * grid.area)


def grad_sq(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Node density of |grad f|^2."""
    return grad_dot(grid, f, f)


def dirichlet_energy(grid: Grid, u: np.ndarray) -> float:
    """1/2 * integral |grad u|^2 for a real or complex field."""
    d = edge_differences(grid, u)
    return 0.5 * float(np.sum(grid.weights * np.abs(d) ** 2))
