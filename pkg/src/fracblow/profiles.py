"""Comparison profiles used to sandwich blow-up solutions.

The central object is a one-parameter family of positive, even profiles
that behave like ``D**tau`` near the interior singular point (``D`` is the
distance to 0), like the squared boundary distance ``d**2`` near the ends
of the interval, and join the two regimes with a quintic polynomial chosen
so the whole profile is twice continuously differentiable.  The module
also provides the discrete torsion function (the grid function the
assembled operator maps to the constant 1) and the pointwise linear
algebra needed to build sub- and super-solution candidates from these
pieces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadConfig, GridMismatch, SingularSystem
from .mesh import Constant, Exterior, Grid, GridFunction, PowerTail, Zero
from .operator import assemble

__all__ = [
    "ProfileSpec",
    "TorsionFunction",
    "build_v_tau",
    "evaluate_profile",
    "sample_profile",
    "combine",
    "solve_torsion",
]


# ---------------------------------------------------------------------------
# Profile construction.


@dataclass(frozen=True)
class ProfileSpec:
    """Recipe for one even comparison profile.

    ``tau``     -- exponent of the core branch ``D**tau`` (negative).
    ``delta``   -- matching radius: the core branch is used where
                   ``D <= delta`` and the flat branch ``d**2`` where
                   ``d <= delta``.
    ``interpolant_coeffs`` -- (2, 6) array of ascending monomial
                   coefficients of the quintic bridge, one row per side
                   (row 0: x < 0, row 1: x > 0), in the normalised
                   coordinate ``s = (D - delta) / (1 - 2*delta)``.
                   The geometry is even in x, so the rows coincide; both
                   are kept so a side can be inspected on its own.
    """

    tau: float
    delta: float
    interpolant_coeffs: np.ndarray


def _bridge_coeffs(tau: float, delta: float) -> np.ndarray:
    """Ascending monomial coefficients of the quintic q(s), s in [0, 1],
    matching value, slope and curvature of ``D**tau`` at ``D = delta``
    (s = 0) and of ``d**2`` at ``d = delta`` (s = 1)."""
    span = 1.0 - 2.0 * delta
    # Endpoint data in the physical coordinate D, then rescaled to s.
    left_val = delta ** tau
    left_slope = tau * delta ** (tau - 1.0)
    left_curv = tau * (tau - 1.0) * delta ** (tau - 2.0)
    right_val = delta ** 2
    right_slope = -2.0 * delta          # d/dD of (1 - D)**2 at D = 1 - delta
    right_curv = 2.0
    rhs = np.array([
        left_val,
        span * left_slope,
        span * span * left_curv,
        right_val,
        span * right_slope,
        span * span * right_curv,
    ])
    system = np.array([
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],    # q(0)
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],    # q'(0)
        [0.0, 0.0, 2.0, 0.0, 0.0, 0.0],    # q''(0)
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],    # q(1)
        [0.0, 1.0, 2.0, 3.0, 4.0, 5.0],    # q'(1)
        [0.0, 0.0, 2.0, 6.0, 12.0, 20.0],  # q''(1)
    ])
    return np.linalg.solve(system, rhs)


def build_v_tau(tau: float, delta: float = 0.25) -> ProfileSpec:
    """Build the positive even profile with core exponent ``tau``.

    ``delta`` is halved (at most 3 times) if the quintic bridge dips to
    zero or below anywhere; a profile that still fails is rejected.
    """
    tau = float(tau)
    delta = float(delta)
    if not (-1.0 < tau < 0.0):
        raise BadConfig(f"core exponent must lie in (-1, 0), got {tau}")
    if not (0.0 < delta <= 0.25):
        raise BadConfig(f"matching radius must lie in (0, 1/4], got {delta}")
    for _ in range(4):
        coeffs = _bridge_coeffs(tau, delta)
        s = np.linspace(0.0, 1.0, 4097)
        bridge = np.polynomial.polynomial.polyval(s, coeffs)
        if np.min(bridge) > 0.0:
            return ProfileSpec(tau=tau, delta=delta,
                               interpolant_coeffs=np.vstack([coeffs, coeffs]))
        delta *= 0.5
    raise BadConfig(
        f"no positive bridge found for core exponent {tau} "
        f"after halving the matching radius 3 times")


def evaluate_profile(spec: ProfileSpec, x) -> np.ndarray:
    """Pointwise values of the profile; 0 outside [-1, 1], and the core
    branch diverges at x = 0 (returned as inf there)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    dist_core = np.abs(x)
    dist_edge = 1.0 - dist_core
    out = np.zeros_like(x)
    inside = dist_core < 1.0
    core = inside & (dist_core <= spec.delta)
    edge = inside & (dist_edge <= spec.delta)
    mid = inside & ~core & ~edge
    with np.errstate(divide="ignore"):
        out[core] = dist_core[core] ** spec.tau
    out[edge] = dist_edge[edge] ** 2
    if np.any(mid):
        s = (dist_core[mid] - spec.delta) / (1.0 - 2.0 * spec.delta)
        row = np.where(x[mid] < 0.0, 0, 1)
        coeffs = spec.interpolant_coeffs
        vals = np.zeros(s.shape)
        for side in (0, 1):
            pick = row == side
            if np.any(pick):
                vals[pick] = np.polynomial.polynomial.polyval(
                    s[pick], coeffs[side])
        out[mid] = vals
    return out[0] if scalar else out


def sample_profile(spec: ProfileSpec, grid: Grid,
                   scale: float = 1.0) -> GridFunction:
    """Sample ``scale`` times the profile at the grid nodes, with the
    zero exterior the profile itself has."""
    values = float(scale) * evaluate_profile(spec, grid.nodes)
    return GridFunction(grid, values, Zero())


# ---------------------------------------------------------------------------
# Pointwise linear combinations.


def _combine_exterior(a: float, eu: Exterior, b: float, ev: Exterior) -> Exterior:
    if isinstance(eu, Zero) and isinstance(ev, Zero):
        return Zero()
    if isinstance(eu, Zero):
        return _combine_exterior(b, ev, 0.0, Zero())
    if isinstance(ev, Zero):
        if isinstance(eu, Constant):
            return Constant(a * eu.value)
        return PowerTail(eu.tau, a * eu.amplitude)
    if isinstance(eu, Constant) and isinstance(ev, Constant):
        return Constant(a * eu.value + b * ev.value)
    if (isinstance(eu, PowerTail) and isinstance(ev, PowerTail)
            and eu.tau == ev.tau):
        return PowerTail(eu.tau, a * eu.amplitude + b * ev.amplitude)
    raise GridMismatch(
        f"cannot combine exterior extensions {eu!r} and {ev!r}")


def combine(a: float, u: GridFunction, b: float, v: GridFunction) -> GridFunction:
    """Pointwise ``a*u + b*v`` on a shared grid, combining the exterior
    extensions when they are compatible (zero absorbs into anything;
    constants add; power tails add only with equal exponents)."""
    if not u.grid.same_as(v.grid):
        raise GridMismatch("cannot combine functions on different grids")
    exterior = _combine_exterior(float(a), u.exterior, float(b), v.exterior)
    return GridFunction(u.grid, float(a) * u.values + float(b) * v.values,
                        exterior)


# ---------------------------------------------------------------------------
# Discrete torsion function.


@dataclass(frozen=True)
class TorsionFunction:
    """Grid function the assembled operator maps to the constant 1,
    with zero exterior; used as the bounded lift in comparison pairs."""

    alpha: float
    samples: GridFunction


def solve_torsion(alpha: float, grid: Grid) -> TorsionFunction:
    """Solve the dense collocation system  operator(v) = 1  with zero
    exterior.  The solution is the discrete torsion function: positive
    inside the interval and vanishing toward the endpoints."""
    matrix = assemble(alpha, grid, Zero())
    rhs = np.ones(grid.n_nodes) - matrix.exterior_correction
    try:
        values = np.linalg.solve(matrix.interior_weights, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(
            f"torsion system is singular for alpha={alpha}") from exc
    if not np.all(np.isfinite(values)):
        raise SingularSystem(
            f"torsion solve produced non-finite values for alpha={alpha}")
    scale = float(np.max(np.abs(values)))
    if np.min(values) < -1e-10 * scale:
        raise SingularSystem(
            "torsion solve produced negative values; the discretization "
            f"is unusable (min {np.min(values):.3e})")
    return TorsionFunction(alpha=float(alpha),
                           samples=GridFunction(grid, values, Zero()))
