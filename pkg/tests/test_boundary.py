import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl_lab.boundary import (
    boundary_degree,
    boundary_from_samples,
    lift_boundary,
    load_phase_table,
    make_boundary,
    require_degree_zero,
)
from gl_lab.errors import ConfigurationError, HypothesisError, UnderResolvedBoundary
from gl_lab.grid import build_grid


@pytest.fixture(scope="module")
def disk():
    return build_grid("UnitDisk", 32)


@pytest.fixture(scope="module")
def square():
    return build_grid("UnitSquare", 32)


def test_constant_i_has_degree_zero(disk):
    b = make_boundary({"type": "constant", "value": math.pi / 2}, disk)
    assert np.allclose(b.samples, 1j)
    assert b.degree == 0


def test_double_winding(disk):
    b = make_boundary({"type": "winding", "degree": 2}, disk)
    assert b.degree == 2
    assert b.lifting is None


def test_degree_against_brute_force_increment_sum():
    theta = np.linspace(0, 2 * math.pi, 10_000, endpoint=False)
    samples = np.exp(1j * 0.3 * np.sin(3 * theta))
    brute = np.sum(np.angle(np.roll(samples, -1) / samples)) / (2 * math.pi)
    assert round(brute) == 0
    assert boundary_degree(samples) == 0


def test_under_resolved_jump_raises():
    samples = np.exp(1j * np.array([0.0, 0.1, 2.0, 2.1]))
    with pytest.raises(UnderResolvedBoundary):
        boundary_degree(samples)


def test_lift_constant_one(square):
    b = make_boundary({"type": "constant"}, square)
    assert np.all(lift_boundary(b) == 0.0)


def test_lift_cos_is_the_phase(disk):
    b = make_boundary({"type": "cos", "amplitude": 0.5}, disk)
    theta = disk.theta[disk.boundary]
    assert np.max(np.abs(lift_boundary(b) - 0.5 * np.cos(theta))) < 1e-12


def test_lift_degree_one_fails(disk):
    b = make_boundary({"type": "winding", "degree": 1}, disk)
    with pytest.raises(HypothesisError, match="no global lifting exists"):
        lift_boundary(b)
    with pytest.raises(HypothesisError, match=r"hypothesis violated: deg\(g\) must be 0"):
        require_degree_zero(b)


def test_lift_anchor_in_principal_range():
    samples = np.exp(1j * (math.pi + 0.01 * np.sin(np.linspace(0, 2 * math.pi, 64, endpoint=False))))
    phi0 = lift_boundary(samples)
    assert -math.pi < phi0[0] <= math.pi
    assert np.max(np.abs(np.exp(1j * phi0) - samples)) < 1e-12


def test_unit_modulus_required():
    with pytest.raises(ConfigurationError):
        boundary_from_samples(np.full(16, 1.01 + 0j))


def test_sin_arclength_periodic(square):
    b = make_boundary({"type": "sin_arclength", "amplitude": 0.6, "mode": 2}, square)
    assert b.degree == 0
    assert np.max(np.abs(np.abs(b.samples) - 1)) < 1e-14


def test_table_is_flagged_unverified(tmp_path, square):
    s = np.linspace(0, 1, 40, endpoint=False)
    path = tmp_path / "phase.csv"
    np.savetxt(path, np.column_stack([s, 0.4 * np.sin(2 * math.pi * s)]), delimiter=",", header="s,phase")
    st_, ph = load_phase_table(path)
    assert st_.size == ph.size
    b = make_boundary({"type": "table", "path": str(path)}, square)
    assert not b.smooth_verified
    assert b.degree == 0
    assert make_boundary({"type": "cos", "amplitude": 0.4}, square).smooth_verified


def test_unknown_generator(square):
    with pytest.raises(ConfigurationError):
        make_boundary({"type": "spiral"}, square)


phases = st.lists(st.floats(-1.2, 1.2), min_size=8, max_size=64)


def _smooth_samples(values, degree):
    n = len(values)
    theta = 2 * math.pi * np.arange(n) / n
    # a bounded, slowly varying perturbation plus an exact winding part
    base = np.convolve(np.array(values), np.ones(3) / 3, mode="same") * 0.3
    return np.exp(1j * (base + degree * theta))


@settings(max_examples=50, deadline=None)
@given(phases, st.integers(-2, 2), st.integers(0, 63))
def test_degree_invariant_under_rotation(values, degree, shift):
    samples = _smooth_samples(values, degree)
    if len(values) < 12 * (abs(degree) + 1):
        return
    assert boundary_degree(np.roll(samples, shift % len(values))) == boundary_degree(samples) == degree


@settings(max_examples=50, deadline=None)
@given(phases, st.integers(-1, 1), st.integers(-1, 1))
def test_degree_additive_under_products(values, d1, d2):
    if len(values) < 32:
        return
    a = _smooth_samples(values, d1)
    b = _smooth_samples(values[::-1], d2)
    assert boundary_degree(a * b) == boundary_degree(a) + boundary_degree(b)


@settings(max_examples=50, deadline=None)
@given(phases)
def test_lift_then_exponentiate_is_identity(values):
    samples = _smooth_samples(values, 0)
    assert np.max(np.abs(np.exp(1j * lift_boundary(samples)) - samples)) < 1e-10
