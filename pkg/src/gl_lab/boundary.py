"""S^1-valued boundary maps: generation, winding degree, phase lifting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import ConfigurationError, HypothesisError, UnderResolvedBoundary
from .grid import Grid

GENERATOR_TYPES = ("constant", "cos", "sin", "sin_arclength", "table", "winding")


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Unit-modulus samples of g on the grid's boundary nodes (in boundary order)."""

    samples: np.ndarray
    degree: int
    lifting: np.ndarray | None
    label: str = ""
    smooth_verified: bool = True
    spec: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.samples.setflags(write=False)
        if self.lifting is not None:
            self.lifting.setflags(write=False)


def boundary_arclength(grid: Grid) -> np.ndarray:
    """Normalised arclength in [0, 1) of each boundary node, starting at node 0."""
    b = grid.boundary
    px, py = grid.x[b], grid.y[b]
    seg = np.hypot(np.diff(px, append=px[0]), np.diff(py, append=py[0]))
    s = np.concatenate([[0.0], np.cumsum(seg)[:-1]])
    return s / seg.sum()


def _finite(spec: Mapping[str, Any], key: str, default: float) -> float:
    value = spec.get(key, default)
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"boundary parameter {key!r} must be a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigurationError(f"boundary parameter {key!r} must be finite, got {value!r}")
    return out


def _integer(spec: Mapping[str, Any], key: str, default: int) -> int:
    value = spec.get(key, default)
    if isinstance(value, bool) or not float(value).is_integer():
        raise ConfigurationError(f"boundary parameter {key!r} must be an integer, got {value!r}")
    return int(value)


def load_phase_table(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``s, phase`` table (s = normalised arclength in [0, 1)).

    A single-column file is read as phases at equispaced s.
    """
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] == 1:
        phase = data[:, 0]
        s = np.arange(phase.size) / phase.size
    else:
        s, phase = data[:, 0], data[:, 1]
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(phase))):
        raise ConfigurationError(f"phase table {path} contains non-finite values")
    if np.any(np.diff(s) <= 0) or s[0] < 0 or s[-1] >= 1:
        raise ConfigurationError(f"phase table {path}: s must increase strictly within [0, 1)")
    return s, phase


def make_boundary(spec: Mapping[str, Any], grid: Grid, label: str | None = None) -> BoundaryData:
    """Sample a boundary map from a generator spec.

    Generators (``spec["type"]``):

    constant       g = exp(i * value)
    cos / sin      g = exp(i * amplitude * cos(mode * theta))  (resp. sin)
    sin_arclength  g = exp(i * amplitude * sin(2 pi mode s)), s = boundary arclength
    table          g = exp(i * phase(s)), periodic linear interpolation of a file
    winding        g = exp(i * degree * theta), sampled directly (no lifting)

    theta is the polar angle about the domain centre.
    """
    kind = spec.get("type")
    if kind not in GENERATOR_TYPES:
        raise ConfigurationError(f"unknown boundary type {kind!r}; expected one of {', '.join(GENERATOR_TYPES)}")
    theta = grid.theta[grid.boundary]
    smooth = True
    if kind == "constant":
        phase = np.full(theta.size, _finite(spec, "value", 0.0))
    elif kind in ("cos", "sin"):
        amp = _finite(spec, "amplitude", 0.0)
        mode = _integer(spec, "mode", 1)
        trig = np.cos if kind == "cos" else np.sin
        phase = amp * trig(mode * theta)
    elif kind == "sin_arclength":
        amp = _finite(spec, "amplitude", 0.0)
        mode = _integer(spec, "mode", 1)
        phase = amp * np.sin(2 * math.pi * mode * boundary_arclength(grid))
    elif kind == "table":
        if "path" not in spec:
            raise ConfigurationError("table boundary requires a 'path'")
        s_tab, p_tab = load_phase_table(spec["path"])
        phase = np.interp(boundary_arclength(grid), s_tab, p_tab, period=1.0)
        smooth = False
    else:
        d = _integer(spec, "degree", 1)
        phase = d * theta
    samples = np.exp(1j * phase)
    return boundary_from_samples(samples, label=label or _label(spec), smooth_verified=smooth, spec=dict(spec))


def _label(spec: Mapping[str, Any]) -> str:
    parts = [str(spec.get("type"))]
    for key in ("value", "amplitude", "mode", "degree", "path"):
        if key in spec:
            parts.append(f"{key}={spec[key]}")
    return " ".join(parts)


def boundary_from_samples(
    samples: np.ndarray, label: str = "", smooth_verified: bool = True, spec: Mapping[str, Any] | None = None
) -> BoundaryData:
    samples = np.asarray(samples, dtype=complex)
    if not np.all(np.isfinite(samples)):
        raise ConfigurationError("boundary samples must be finite")
    dev = np.max(np.abs(np.abs(samples) - 1.0))
    if dev > 1e-12:
        raise ConfigurationError(f"boundary samples must have unit modulus (max deviation {dev:.3e})")
    deg = _winding(samples)
    lifting = _unwrap(samples) if deg == 0 else None
    return BoundaryData(samples.copy(), deg, lifting, label, smooth_verified, dict(spec or {}))


def _increments(samples: np.ndarray) -> np.ndarray:
    nxt = np.roll(samples, -1)
    inc = np.angle(nxt * np.conj(samples))
    worst = np.max(np.abs(inc)) if inc.size else 0.0
    if worst >= math.pi / 2:
        k = int(np.argmax(np.abs(inc)))
        raise UnderResolvedBoundary(
            f"phase jumps by {worst:.3f} rad between boundary nodes {k} and {(k + 1) % samples.size}; refine the grid"
        )
    return inc


def _winding(samples: np.ndarray) -> int:
    return int(round(float(np.sum(_increments(samples))) / (2 * math.pi)))


def _unwrap(samples: np.ndarray) -> np.ndarray:
    inc = _increments(samples)
    start = float(np.angle(samples[0]))
    if start == -math.pi:
        start = math.pi
    return start + np.concatenate([[0.0], np.cumsum(inc[:-1])])


def boundary_degree(b: BoundaryData | np.ndarray) -> int:
    """Winding number of the boundary samples (counterclockwise order)."""
    samples = b.samples if isinstance(b, BoundaryData) else np.asarray(b, dtype=complex)
    return _winding(samples)


def lift_boundary(b: BoundaryData | np.ndarray) -> np.ndarray:
    """Real phase phi0 with exp(i phi0) = g, anchored in (-pi, pi] at node 0.

    Raises HypothesisError when the degree is nonzero.
    """
    samples = b.samples if isinstance(b, BoundaryData) else np.asarray(b, dtype=complex)
    deg = _winding(samples)
    if deg != 0:
        raise HypothesisError(f"no global lifting exists: deg(g) = {deg}, must be 0")
    return _unwrap(samples)


def require_degree_zero(b: BoundaryData, name: str = "g") -> np.ndarray:
    if b.degree != 0 or b.lifting is None:
        raise HypothesisError(f"hypothesis violated: deg({name}) must be 0 (got {b.degree})")
    return b.lifting
