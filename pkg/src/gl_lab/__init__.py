"""Numerical laboratory for degree-zero Ginzburg-Landau problems on planar domains."""

__version__ = "0.1.0"

from .boundary import BoundaryData, boundary_degree, lift_boundary, make_boundary
from .diagnostics import EnergyReport, ModulusPhase, SweepReport, classify_sweep, decompose, energy_report
from .grid import DomainKind, Grid, build_grid
from .pair import PairSolution, Variant, pair_energy, solve_pair
from .reference import BetaFlowConfig, ConstrainedPair, HarmonicLifting, alpha_value, minimize_beta, solve_harmonic
from .solver import GLSolution, SolverConfig, gl_energy, solve_gl

__all__ = [
    "BetaFlowConfig",
    "BoundaryData",
    "ConstrainedPair",
    "DomainKind",
    "EnergyReport",
    "GLSolution",
    "Grid",
    "HarmonicLifting",
    "ModulusPhase",
    "PairSolution",
    "SolverConfig",
    "SweepReport",
    "Variant",
    "alpha_value",
    "boundary_degree",
    "build_grid",
    "classify_sweep",
    "decompose",
    "energy_report",
    "gl_energy",
    "lift_boundary",
    "make_boundary",
    "minimize_beta",
    "pair_energy",
    "solve_gl",
    "solve_harmonic",
    "solve_pair",
]
