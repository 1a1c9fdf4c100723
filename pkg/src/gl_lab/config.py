"""Run configuration: a YAML document validated into a fully defaulted RunConfig.

Minimal document::

    domain: {kind: UnitDisk, resolution: 64}
    boundary: {type: cos, amplitude: 0.5}
    problem: Single
    epsilons: [0.4, 0.2, 0.1, 0.05]

Every violation found is reported at once, each prefixed with the line of the
offending key.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .boundary import GENERATOR_TYPES
from .errors import ConfigurationError
from .grid import MIN_RESOLUTION, DomainKind
from .reference import BetaFlowConfig
from .solver import SolverConfig


class Problem(str, enum.Enum):
    SINGLE = "Single"
    SYMMETRIC_PAIR = "SymmetricPair"
    NON_SYMMETRIC_PAIR = "NonSymmetricPair"
    BETA_MINIMIZER = "BetaMinimizer"
    HARMONIC_ONLY = "HarmonicOnly"

    @property
    def boundary_count(self) -> int:
        """Required number of boundary specs; 0 means one or two."""
        if self is Problem.SINGLE:
            return 1
        return 0 if self is Problem.HARMONIC_ONLY else 2

    @property
    def is_pair(self) -> bool:
        return self in (Problem.SYMMETRIC_PAIR, Problem.NON_SYMMETRIC_PAIR)


SOLVER_KEYS = ("tau", "max_steps", "residual_tol", "newton", "continuation", "newton_switch", "newton_max_iter")
THRESHOLD_KEYS = ("C1", "C2", "C3", "C4", "C5", "C6")
BETA_KEYS = ("scheme", "tau", "tol", "grad_tol", "max_steps")
TOP_KEYS = ("domain", "boundary", "problem", "epsilons", "solver", "thresholds", "output", "initial", "beta", "parallel")


@dataclass(frozen=True)
class SolverSettings:
    tau: float
    max_steps: int = 20000
    residual_tol: float = 1e-9
    newton: bool = True
    continuation: bool = True
    newton_switch: float = 1e-4
    newton_max_iter: int = 30

    def at(self, epsilon: float) -> SolverConfig:
        return SolverConfig(
            epsilon=epsilon,
            tau=min(self.tau, 0.25 * epsilon**2),
            max_steps=self.max_steps,
            residual_tol=self.residual_tol,
            newton=self.newton,
            continuation=self.continuation,
            newton_switch=self.newton_switch,
            newton_max_iter=self.newton_max_iter,
        )


@dataclass(frozen=True)
class RunConfig:
    kind: DomainKind
    resolution: int
    boundary: tuple[dict, ...]
    problem: Problem
    epsilons: tuple[float, ...]
    solver: SolverSettings
    thresholds: dict = field(default_factory=dict)
    output: str = "runs/out"
    dump_fields: bool = False
    initial: dict = field(default_factory=dict)  # {"u": path, "v": path} field dumps
    beta: BetaFlowConfig = field(default_factory=BetaFlowConfig)
    parallel: bool = False  # across levels; only used with continuation off
    base_dir: str = "."

    def as_dict(self) -> dict:
        """Canonical, JSON-serialisable form (written next to the run outputs)."""
        return {
            "domain": {"kind": self.kind.value, "resolution": self.resolution},
            "boundary": [dict(b) for b in self.boundary],
            "problem": self.problem.value,
            "epsilons": list(self.epsilons),
            "solver": asdict(self.solver),
            "thresholds": dict(self.thresholds),
            "output": {"directory": self.output, "dump_fields": self.dump_fields},
            "initial": dict(self.initial),
            "beta": asdict(self.beta),
            "parallel": self.parallel,
        }

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


# ------------------------------------------------------------ line anchors


def _line_map(text: str) -> dict[tuple, int]:
    """Map key paths to 1-based source lines, from the YAML node tree."""
    lines: dict[tuple, int] = {}

    def walk(node, path):
        lines.setdefault(path, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = path + (k.value,)
                lines[key] = k.start_mark.line + 1
                walk(v, key)
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                walk(item, path + (i,))

    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return lines
    if root is not None:
        walk(root, ())
    return lines


class _Problems:
    def __init__(self, lines: dict[tuple, int]):
        self.lines = lines
        self.items: list[str] = []

    def add(self, path: tuple, message: str) -> None:
        p = path
        while p and p not in self.lines:
            p = p[:-1]
        line = self.lines.get(p, 1)
        where = ".".join(str(x) for x in path) or "<document>"
        self.items.append(f"line {line}: {where}: {message}")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _finite_positive(x) -> bool:
    return _is_number(x) and math.isfinite(x) and x > 0


# ------------------------------------------------------------ validation


def validate_config(text: str, base_dir: str | Path = ".", overrides: dict | None = None) -> RunConfig:
    """Parse and validate a YAML run document; raise ConfigurationError listing every problem.

    ``overrides`` replaces top-level values after parsing (keys ``epsilons``,
    ``resolution``, ``output``), as the command-line flags do.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 1
        msg = f"line {line}: invalid YAML: {getattr(exc, 'problem', exc)}"
        raise ConfigurationError(msg, [msg]) from None
    lines = _line_map(text)
    bad = _Problems(lines)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        bad.add((), "document must be a mapping")
        raise ConfigurationError("\n".join(bad.items), bad.items)

    overrides = overrides or {}
    if "epsilons" in overrides and overrides["epsilons"] is not None:
        raw["epsilons"] = list(overrides["epsilons"])
    if overrides.get("resolution") is not None:
        raw.setdefault("domain", {})
        if isinstance(raw["domain"], dict):
            raw["domain"]["resolution"] = overrides["resolution"]
    if overrides.get("output") is not None:
        out = raw.get("output")
        raw["output"] = {**(out if isinstance(out, dict) else {}), "directory": str(overrides["output"])}

    for key in raw:
        if key not in TOP_KEYS:
            bad.add((key,), f"unknown key (expected one of {', '.join(TOP_KEYS)})")

    # problem
    problem = None
    if "problem" not in raw:
        bad.add(("problem",), f"missing; one of {', '.join(p.value for p in Problem)}")
    else:
        try:
            problem = Problem(raw["problem"])
        except ValueError:
            bad.add(("problem",), f"unknown problem {raw['problem']!r}; one of {', '.join(p.value for p in Problem)}")

    # domain
    kind, resolution = None, None
    dom = raw.get("domain")
    if not isinstance(dom, dict):
        bad.add(("domain",), "missing or not a mapping {kind, resolution}")
    else:
        try:
            kind = DomainKind.parse(dom.get("kind"))
        except Exception:
            bad.add(("domain", "kind"), f"unknown domain kind {dom.get('kind')!r}; one of UnitSquare, UnitDisk")
        resolution = dom.get("resolution", 64)
        if not isinstance(resolution, int) or isinstance(resolution, bool) or resolution < MIN_RESOLUTION:
            bad.add(("domain", "resolution"), f"resolution must be an integer >= {MIN_RESOLUTION}, got {resolution!r}")
        for key in dom:
            if key not in ("kind", "resolution"):
                bad.add(("domain", key), "unknown key")

    # boundary
    specs = raw.get("boundary")
    if isinstance(specs, dict):
        specs = [specs]
    if specs is None:
        specs = []
    if not isinstance(specs, list):
        bad.add(("boundary",), "must be a boundary spec or a list of specs")
        specs = []
    for i, s in enumerate(specs):
        path = ("boundary", i) if isinstance(raw.get("boundary"), list) else ("boundary",)
        if not isinstance(s, dict):
            bad.add(path, "boundary spec must be a mapping")
            continue
        t = s.get("type")
        if t not in GENERATOR_TYPES:
            bad.add(path + ("type",), f"unknown boundary type {t!r}; one of {', '.join(GENERATOR_TYPES)}")
        for key in ("amplitude", "value"):
            if key in s and not (_is_number(s[key]) and math.isfinite(s[key])):
                bad.add(path + (key,), f"{key} must be a finite number")
        for key in ("mode", "degree"):
            if key in s and not (isinstance(s[key], int) and not isinstance(s[key], bool)):
                bad.add(path + (key,), f"{key} must be an integer")
        if t == "table" and "path" not in s:
            bad.add(path, "table boundary requires a 'path'")
    if problem is not None:
        need = problem.boundary_count
        if need == 2 and len(specs) != 2:
            bad.add(("boundary",), f"two boundary specs required for {problem.value}, got {len(specs)}")
        elif need == 1 and len(specs) != 1:
            bad.add(("boundary",), f"exactly one boundary spec required for Single, got {len(specs)}")
        elif need == 0 and len(specs) not in (1, 2):
            bad.add(("boundary",), "HarmonicOnly takes one or two boundary specs")

    # epsilons
    eps = raw.get("epsilons")
    eps_ok = False
    if problem in (Problem.BETA_MINIMIZER, Problem.HARMONIC_ONLY) and eps is None:
        eps = []
        eps_ok = True
    elif not isinstance(eps, list) or not eps:
        bad.add(("epsilons",), "must be a non-empty list of positive reals")
    elif not all(_finite_positive(e) for e in eps):
        bad.add(("epsilons",), "all epsilons must be positive finite numbers")
    elif any(b >= a for a, b in zip(eps, eps[1:])):
        bad.add(("epsilons",), "epsilons must be strictly decreasing")
    else:
        eps_ok = True

    # solver
    solver_raw = raw.get("solver") or {}
    settings = None
    if not isinstance(solver_raw, dict):
        bad.add(("solver",), "must be a mapping")
        solver_raw = {}
    for key in solver_raw:
        if key not in SOLVER_KEYS:
            bad.add(("solver", key), f"unknown solver key (expected one of {', '.join(SOLVER_KEYS)})")
    tau_cap = 0.25 * min(eps) ** 2 if eps_ok and eps else None
    tau = solver_raw.get("tau")
    if tau is not None:
        if not _finite_positive(tau):
            bad.add(("solver", "tau"), "tau must be a positive finite number")
        elif tau_cap is not None and tau > tau_cap * (1 + 1e-12):
            bad.add(("solver", "tau"), f"tau must be <= 0.25*min(epsilon)^2 = {tau_cap:g}, got {tau:g}")
    for key in ("residual_tol", "newton_switch"):
        if key in solver_raw and not _finite_positive(solver_raw[key]):
            bad.add(("solver", key), f"{key} must be a positive finite number")
    for key in ("max_steps", "newton_max_iter"):
        if key in solver_raw and not (isinstance(solver_raw[key], int) and not isinstance(solver_raw[key], bool) and solver_raw[key] >= 0):
            bad.add(("solver", key), f"{key} must be a non-negative integer")
    for key in ("newton", "continuation"):
        if key in solver_raw and not isinstance(solver_raw[key], bool):
            bad.add(("solver", key), f"{key} must be true or false")

    # thresholds
    th = raw.get("thresholds") or {}
    if not isinstance(th, dict):
        bad.add(("thresholds",), "must be a mapping of C1..C6")
        th = {}
    for key, val in th.items():
        if key not in THRESHOLD_KEYS:
            bad.add(("thresholds", key), f"unknown threshold (expected one of {', '.join(THRESHOLD_KEYS)})")
        elif not (_is_number(val) and math.isfinite(val)):
            bad.add(("thresholds", key), "threshold must be a finite number")

    # output
    out = raw.get("output") or {}
    if isinstance(out, str):
        out = {"directory": out}
    if not isinstance(out, dict):
        bad.add(("output",), "must be a mapping {directory, dump_fields}")
        out = {}
    directory = out.get("directory", "runs/out")
    dump = out.get("dump_fields", False)
    if not isinstance(directory, str) or not directory:
        bad.add(("output", "directory"), "directory must be a non-empty string")
    if not isinstance(dump, bool):
        bad.add(("output", "dump_fields"), "dump_fields must be true or false")

    # initial fields
    initial = raw.get("initial") or {}
    if not isinstance(initial, dict) or any(k not in ("u", "v") or not isinstance(p, str) for k, p in initial.items()):
        bad.add(("initial",), "must map 'u' (and 'v') to field-dump paths")
        initial = {}
    elif problem is not None and "v" in initial and not problem.is_pair:
        bad.add(("initial", "v"), "an initial v field only applies to pair problems")

    # beta flow
    beta_raw = raw.get("beta") or {}
    beta = BetaFlowConfig()
    if not isinstance(beta_raw, dict):
        bad.add(("beta",), "must be a mapping")
    else:
        for key in beta_raw:
            if key not in BETA_KEYS:
                bad.add(("beta", key), f"unknown key (expected one of {', '.join(BETA_KEYS)})")
        if beta_raw.get("scheme", "tangent") not in ("tangent", "explicit"):
            bad.add(("beta", "scheme"), "scheme must be 'tangent' or 'explicit'")
        for key in ("tau", "tol", "grad_tol"):
            if beta_raw.get(key) is not None and not _finite_positive(beta_raw[key]):
                bad.add(("beta", key), f"{key} must be a positive finite number")
        if "max_steps" in beta_raw and not (isinstance(beta_raw["max_steps"], int) and beta_raw["max_steps"] > 0):
            bad.add(("beta", "max_steps"), "max_steps must be a positive integer")

    parallel = raw.get("parallel", False)
    if not isinstance(parallel, bool):
        bad.add(("parallel",), "parallel must be true or false")

    if bad.items:
        raise ConfigurationError("\n".join(bad.items), bad.items)

    if eps:
        tau = tau if tau is not None else tau_cap
    else:
        tau = tau if tau is not None else 0.0
    settings = SolverSettings(
        tau=float(tau),
        **{k: solver_raw[k] for k in SOLVER_KEYS if k != "tau" and k in solver_raw},
    )
    beta = BetaFlowConfig(**{k: beta_raw[k] for k in BETA_KEYS if k in beta_raw})
    return RunConfig(
        kind=kind,
        resolution=resolution,
        boundary=tuple(dict(s) for s in specs),
        problem=problem,
        epsilons=tuple(float(e) for e in eps),
        solver=settings,
        thresholds={k: float(v) for k, v in th.items()},
        output=directory,
        dump_fields=dump,
        initial=dict(initial),
        beta=beta,
        parallel=parallel,
        base_dir=str(base_dir),
    )


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    p = Path(path)
    return validate_config(p.read_text(), base_dir=p.parent, overrides=overrides)


def parse_epsilons(text: str) -> list[float]:
    """Comma-separated epsilon list from the command line."""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"--epsilons: cannot parse {text!r}") from None
