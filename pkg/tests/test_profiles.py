"""Tests for the comparison profiles and the discrete torsion function."""

import numpy as np
import pytest

from fracblow.errors import BadConfig, GridMismatch
from fracblow.mesh import Constant, PowerTail, Zero, build_graded, distance_D, distance_d
from fracblow.operator import apply, assemble
from fracblow.profiles import (
    build_v_tau,
    combine,
    evaluate_profile,
    sample_profile,
    solve_torsion,
)
from fracblow.specfun import c_tau


# ---------------------------------------------------------------------------
# Profile construction.


@pytest.mark.parametrize("tau", [-1.5, -1.0, 0.0, 0.5])
def test_build_profile_rejects_bad_exponent(tau):
    with pytest.raises(BadConfig):
        build_v_tau(tau)


@pytest.mark.parametrize("delta", [0.0, -0.1, 0.3, 1.0])
def test_build_profile_rejects_bad_radius(delta):
    with pytest.raises(BadConfig):
        build_v_tau(-0.5, delta)


@pytest.mark.parametrize("tau", [-0.2, -0.5, -0.9])
def test_core_branch_exact(tau):
    spec = build_v_tau(tau, 0.25)
    assert spec.delta == 0.25
    x = spec.delta / 2.0
    assert evaluate_profile(spec, x) == x ** tau
    assert evaluate_profile(spec, -x) == x ** tau


@pytest.mark.parametrize("tau", [-0.2, -0.5, -0.9])
def test_edge_branch_exact(tau):
    spec = build_v_tau(tau, 0.25)
    d = spec.delta / 2.0
    assert evaluate_profile(spec, 1.0 - d) == d ** 2
    assert evaluate_profile(spec, -(1.0 - d)) == d ** 2


def test_zero_outside_interval():
    spec = build_v_tau(-0.5)
    assert np.all(evaluate_profile(spec, np.array([-2.0, -1.0, 1.0, 1.3])) == 0.0)


def test_profile_positive_everywhere_inside():
    xs = np.linspace(-0.9995, 0.9995, 20001)
    xs = xs[xs != 0.0]
    for tau in np.linspace(-0.95, -0.05, 10):
        spec = build_v_tau(tau)
        assert np.min(evaluate_profile(spec, xs)) > 0.0


def test_interpolant_coefficients_shape_and_symmetry():
    spec = build_v_tau(-0.4)
    assert spec.interpolant_coeffs.shape == (2, 6)
    assert np.array_equal(spec.interpolant_coeffs[0], spec.interpolant_coeffs[1])


def test_branch_continuity():
    spec = build_v_tau(-0.5)
    eps = 1e-12
    for x0 in (spec.delta, 1.0 - spec.delta):
        left = evaluate_profile(spec, x0 - eps)
        right = evaluate_profile(spec, x0 + eps)
        assert abs(left - right) <= 1e-9


def test_junction_second_differences_converge():
    # C^2 matching: one-sided second differences agree to O(h) across both
    # junction points.
    spec = build_v_tau(-0.5, 0.25)

    def gap(x0, h):
        f = lambda t: evaluate_profile(spec, t)
        fwd = (f(x0 + 2 * h) - 2 * f(x0 + h) + f(x0)) / h ** 2
        bwd = (f(x0) - 2 * f(x0 - h) + f(x0 - 2 * h)) / h ** 2
        return abs(fwd - bwd)

    for x0 in (spec.delta, 1.0 - spec.delta):
        coarse = gap(x0, 1e-3)
        fine = gap(x0, 1e-4)
        assert coarse < 2.0
        assert fine <= 0.15 * coarse


# ---------------------------------------------------------------------------
# Sampling and pointwise algebra.


def test_sample_profile_scaling():
    grid = build_graded(32, 2.0)
    spec = build_v_tau(-0.5)
    zero = sample_profile(spec, grid, scale=0.0)
    assert np.all(zero.values == 0.0)
    one = sample_profile(spec, grid, scale=1.0)
    two = sample_profile(spec, grid, scale=2.0)
    assert np.array_equal(two.values, 2.0 * one.values)
    assert isinstance(one.exterior, Zero)


def test_combine_values_and_grid_guard():
    grid = build_graded(32, 2.0)
    other = build_graded(32, 2.5)
    spec = build_v_tau(-0.5)
    u = sample_profile(spec, grid)
    v = sample_profile(build_v_tau(-0.25), grid)
    w = combine(2.0, u, -3.0, v)
    assert np.array_equal(w.values, 2.0 * u.values - 3.0 * v.values)
    with pytest.raises(GridMismatch):
        combine(1.0, u, 1.0, sample_profile(spec, other))


def test_combine_exterior_rules():
    grid = build_graded(32, 2.0)
    vals = np.ones(grid.n_nodes)

    def gf(ext):
        from fracblow.mesh import GridFunction
        return GridFunction(grid, vals, ext)

    assert isinstance(combine(1.0, gf(Zero()), 1.0, gf(Zero())).exterior, Zero)
    out = combine(2.0, gf(Constant(3.0)), 1.0, gf(Constant(-1.0))).exterior
    assert out == Constant(5.0)
    out = combine(2.0, gf(Zero()), 3.0, gf(PowerTail(-0.5, 2.0))).exterior
    assert out == PowerTail(-0.5, 6.0)
    out = combine(2.0, gf(PowerTail(-0.5, 1.0)), 1.0, gf(PowerTail(-0.5, 0.5))).exterior
    assert out == PowerTail(-0.5, 2.5)
    with pytest.raises(GridMismatch):
        combine(1.0, gf(PowerTail(-0.5, 1.0)), 1.0, gf(PowerTail(-0.25, 1.0)))
    with pytest.raises(GridMismatch):
        combine(1.0, gf(Constant(1.0)), 1.0, gf(PowerTail(-0.5, 1.0)))


# ---------------------------------------------------------------------------
# Torsion function.


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_torsion_residual_is_one(alpha):
    grid = build_graded(128, 2.0)
    torsion = solve_torsion(alpha, grid)
    matrix = assemble(alpha, grid, Zero())
    residual = apply(matrix, torsion.samples) - 1.0
    away = distance_d(grid.nodes) >= 0.1
    assert np.max(np.abs(residual[away])) <= 0.02
    assert np.max(np.abs(residual[away])) <= 1e-6  # dense solve is exact


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_torsion_symmetric_and_nonnegative(alpha):
    grid = build_graded(128, 2.0)
    v = solve_torsion(alpha, grid).samples.values
    assert np.max(np.abs(v - v[::-1])) <= 1e-10 * np.max(v)
    assert np.min(v) > 0.0


@pytest.mark.parametrize("alpha,tol", [(0.25, 0.01), (0.5, 0.02), (0.75, 0.04)])
def test_torsion_matches_closed_form(alpha, tol):
    # The exact solution of  operator(v) = 1  on the interval with the
    # bare second-difference kernel is  sin(pi*alpha)/pi * (1 - x^2)^alpha.
    grid = build_graded(256, 2.4)
    v = solve_torsion(alpha, grid).samples.values
    x = grid.nodes
    exact = np.sin(np.pi * alpha) / np.pi * (1.0 - x ** 2) ** alpha
    away = distance_d(x) >= 0.01
    rel = np.abs(v - exact) / exact
    assert np.max(rel[away]) <= tol


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_torsion_boundary_decay_exponent(alpha):
    grid = build_graded(256, 2.4)
    v = solve_torsion(alpha, grid).samples.values
    x = grid.nodes
    d = distance_d(x)
    mask = (x > 0) & (d > 1e-3) & (d < 3e-2)
    design = np.vstack([np.log(d[mask]), np.ones(mask.sum())]).T
    exponent = np.linalg.lstsq(design, np.log(v[mask]), rcond=None)[0][0]
    assert abs(exponent - alpha) <= 0.1


# ---------------------------------------------------------------------------
# Near-core sign bands of the applied operator.


def _band_ratios(alpha, tau, n):
    grid = build_graded(n, 2.4)
    profile = sample_profile(build_v_tau(tau, grid.delta), grid)
    matrix = assemble(alpha, grid, profile.exterior)
    out = apply(matrix, profile)
    D = distance_D(grid.nodes)
    window = (D > 20.0 * grid.local_spacing()) & (D < grid.delta / 4.0)
    assert window.sum() >= 8
    return out[window], D[window]


@pytest.mark.parametrize("alpha,tau", [(0.6, -0.5), (0.25, -0.8)])
def test_band_positive_when_kernel_constant_positive(alpha, tau):
    # -operator(V_tau)/D^(tau-2*alpha) stays in a tight positive band
    # around the kernel power constant, stable under grid doubling.
    for n in (512, 1024):
        out, D = _band_ratios(alpha, tau, n)
        ratio = -out / D ** (tau - 2.0 * alpha)
        assert np.min(ratio) > 0.0
        assert np.max(ratio) / np.min(ratio) <= 10.0
        mid = np.median(ratio)
        assert abs(mid - c_tau(alpha, tau)) <= 0.1 * abs(c_tau(alpha, tau))


@pytest.mark.parametrize("alpha,tau", [(0.25, -0.3), (0.4, -0.15)])
def test_band_negative_between_critical_exponents(alpha, tau):
    for n in (512, 1024):
        out, D = _band_ratios(alpha, tau, n)
        ratio = -out / D ** (tau - 2.0 * alpha)
        assert np.max(ratio) < 0.0


@pytest.mark.parametrize("alpha", [0.25, 0.4])
def test_band_growth_bound_at_kernel_zero(alpha):
    # At the zero of the kernel power constant the applied operator is an
    # order smaller; its growth constant stays stable under refinement.
    tau1 = 2.0 * alpha - 1.0
    exponent = min(tau1, 2.0 * tau1 - 2.0 * alpha + 1.0)
    constants = []
    for n in (512, 1024):
        out, D = _band_ratios(alpha, tau1, n)
        constants.append(np.max(np.abs(out) / D ** exponent))
    assert constants[0] <= 3.0
    assert constants[1] <= 3.0
    assert abs(constants[1] / constants[0] - 1.0) <= 0.25
