"""Monotone exhaustion solver for the interior blow-up problem.

The solver brackets a solution between an ordered sub/super-solution pair
built from the comparison profiles, then solves the collocation system on
the growing family of domains that exclude a shrinking neighbourhood of
the singular point (nodes inside the excluded core stay frozen at the
sub-solution).  Each domain is solved by damped Newton, warm-started from
the previous level, and the levels are audited for ordering and
monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BadConfig,
    GridMismatch,
    MonotoneViolation,
    NewtonStall,
    NoAdmissiblePair,
    RegimeError,
    SingularSystem,
)
from .mesh import Grid, GridFunction, Zero, distance_D
from .operator import OperatorMatrix, apply, assemble
from .profiles import build_v_tau, sample_profile, solve_torsion
from .specfun import RegimeKind, classify

__all__ = [
    "ProblemSpec",
    "SolveReport",
    "default_sub_super",
    "solve_dirichlet_level",
    "solve_blowup",
]

# A node is considered resolved when its distance to the singular point is
# at least this multiple of the local spacing; the same standard is used
# by the operator fidelity checks.
RESOLUTION_MULTIPLE = 20.0

# Sub/super search budget: powers of 2 tried before giving up.
_MAX_DOUBLINGS = 40

# Newton controls.
_NEWTON_RTOL = 1e-9
_DAMPING_FLOOR = 2.0 ** -20

# Audit slacks: the fine slack feeds the ordering/monotonicity report
# flags, the gross slack aborts the run (a drop that large means the
# discrete operator lost its sign structure).
_AUDIT_SLACK = 1e-8
_ABORT_SLACK = 1e-6


def _core_checked(grid: Grid) -> np.ndarray:
    """Nodes where the near-core inequalities are enforced: resolved
    (distance to the singular point at least 20 local spacings) and
    inside the matching radius."""
    D = distance_D(grid.nodes)
    return (D >= RESOLUTION_MULTIPLE * grid.local_spacing()) & (D <= grid.delta)


# ---------------------------------------------------------------------------
# Problem description.


@dataclass(eq=False)
class ProblemSpec:
    """Blow-up problem bracketed by an ordered sub/super-solution pair.

    ``sub`` must blow up toward the singular point (checked against
    ``blowup_threshold`` at the innermost nodes) and both bounds must
    vanish outside the interval.
    """

    alpha: float
    p: float
    grid: Grid
    sub: GridFunction
    super: GridFunction
    blowup_threshold: float = 10.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise BadConfig(f"order must lie in (0,1), got {self.alpha}")
        if not self.p > 1.0:
            raise BadConfig(f"p must exceed 1, got {self.p}")
        if not (self.sub.grid.same_as(self.grid)
                and self.super.grid.same_as(self.grid)):
            raise GridMismatch("sub/super must live on the problem grid")
        if not (isinstance(self.sub.exterior, Zero)
                and isinstance(self.super.exterior, Zero)):
            raise BadConfig("sub/super must vanish outside the interval")
        scale = 1.0 + np.abs(self.sub.values) + np.abs(self.super.values)
        if np.any(self.sub.values > self.super.values + 1e-12 * scale):
            raise BadConfig("sub-solution exceeds super-solution somewhere")
        D = distance_D(self.grid.nodes)
        innermost = self.sub.values[D == D.min()]
        if np.any(innermost < self.blowup_threshold):
            raise BadConfig(
                f"sub-solution reaches only {innermost.min():.3g} at the "
                f"innermost nodes; threshold {self.blowup_threshold} "
                "(not a blow-up candidate, or the grid is too coarse)")

    @property
    def tau(self) -> float:
        """Expected blow-up rate exponent -2*alpha/(p-1)."""
        return -2.0 * self.alpha / (self.p - 1.0)


@dataclass(eq=False)
class SolveReport:
    """Outcome of an exhaustion run: final iterate plus the audit flags."""

    final: GridFunction
    n_exhaustion_levels: int
    newton_iters: list
    levels: list
    residual_inf: float
    tolerance: float
    converged: bool
    ordering_ok: bool
    monotone_ok: bool

    def as_dict(self) -> dict:
        """JSON-ready summary (scalars only; the profile goes to CSV)."""
        return {
            "n_exhaustion_levels": int(self.n_exhaustion_levels),
            "levels": [int(n) for n in self.levels],
            "newton_iters": [int(k) for k in self.newton_iters],
            "residual_inf": float(self.residual_inf),
            "tolerance": float(self.tolerance),
            "converged": bool(self.converged),
            "ordering_ok": bool(self.ordering_ok),
            "monotone_ok": bool(self.monotone_ok),
            "max_value": float(np.max(self.final.values)),
        }


# ---------------------------------------------------------------------------
# Default sub/super-solution pair.


def default_sub_super(alpha: float, p: float, grid: Grid,
                      ) -> tuple[GridFunction, GridFunction]:
    """Ordered pair bracketing the blow-up solution in the unique-existence
    regime.

    The sub-solution is ``lam_small * V_tau`` with the scale halved until
    the discrete inequality  operator(W) + W**p <= tol  holds at every
    resolved node inside the matching radius (the profile is only a
    sub-solution near the singular point; the exhaustion scheme never
    relies on it elsewhere).  The super-solution is ``lam_big * V_tau``
    scaled up until the reverse inequality holds on the same node set,
    plus a torsion-function lift sized to push the residual nonnegative
    on the whole grid.
    """
    regime = classify(alpha, p)
    if regime.kind is not RegimeKind.UNIQUE_EXISTENCE:
        raise RegimeError(
            f"default pair requires the unique-existence regime, "
            f"got {regime.kind.value} for alpha={alpha}, p={p}")
    tau = regime.predicted_rate
    profile = build_v_tau(tau, grid.delta)
    V = sample_profile(profile, grid)
    torsion = solve_torsion(alpha, grid).samples
    matrix = assemble(alpha, grid, Zero())
    applied = apply(matrix, V)
    core = _core_checked(grid)
    if not np.any(core):
        raise BadConfig(
            "no resolved nodes inside the matching radius; refine the grid "
            "or increase the grading exponent")
    vals = V.values

    def residual(lam: float) -> tuple[np.ndarray, np.ndarray]:
        linear = lam * applied
        power = (lam * vals) ** p
        tol = 1e-8 * (np.abs(linear) + power + 1.0)
        return linear + power, tol

    lam_small = 1.0
    for _ in range(_MAX_DOUBLINGS + 1):
        res, tol = residual(lam_small)
        if np.all(res[core] <= tol[core]):
            break
        lam_small *= 0.5
    else:
        raise NoAdmissiblePair(
            f"no sub-solution scale found for alpha={alpha}, p={p} "
            f"after {_MAX_DOUBLINGS} halvings")

    lam_big = 1.0
    for _ in range(_MAX_DOUBLINGS + 1):
        res, tol = residual(lam_big)
        if np.all(res[core] >= -tol[core]):
            break
        lam_big *= 2.0
    else:
        raise NoAdmissiblePair(
            f"no super-solution scale found for alpha={alpha}, p={p} "
            f"after {_MAX_DOUBLINGS} doublings")
    lam_big = max(lam_big, lam_small)

    # Torsion lift: the assembled operator maps the torsion function to 1
    # exactly, so adding lam_c of it raises the linear part of the residual
    # by lam_c everywhere (and the absorption term only grows with it).
    res0, _ = residual(lam_big)
    lam_c = max(0.0, -float(np.min(res0)))
    for _ in range(_MAX_DOUBLINGS + 1):
        upper = lam_big * vals + lam_c * torsion.values
        res = lam_big * applied + lam_c + upper ** p
        tol = 1e-8 * (np.abs(lam_big * applied) + lam_c + upper ** p + 1.0)
        if np.all(res >= -tol):
            break
        lam_c = max(2.0 * lam_c, 1.0)
    else:
        raise NoAdmissiblePair(
            f"torsion lift failed to globalize the super-solution for "
            f"alpha={alpha}, p={p}")

    sub = GridFunction(grid, lam_small * vals, Zero())
    super_ = GridFunction(grid, lam_big * vals + lam_c * torsion.values,
                          Zero())
    return sub, super_


# ---------------------------------------------------------------------------
# Newton solve on one exhaustion domain.


def _newton_on_domain(spec: ProblemSpec, matrix: OperatorMatrix,
                      active: np.ndarray, start: np.ndarray,
                      max_iter: int) -> tuple[np.ndarray, int]:
    """Damped Newton for  operator(u) + |u|^(p-1) u = 0  on the active
    nodes, the rest frozen at the sub-solution.  Returns (values, iters)."""
    p = spec.p
    weights = matrix.interior_weights
    corr = matrix.exterior_correction
    idx = np.flatnonzero(active)
    w_aa = weights[np.ix_(idx, idx)]

    u = start.copy()
    u[~active] = spec.sub.values[~active]

    def full_residual(vec: np.ndarray) -> np.ndarray:
        return (weights @ vec + corr
                + np.abs(vec) ** (p - 1.0) * vec)[idx]

    res = full_residual(u)
    for iteration in range(max_iter + 1):
        scale = max(1.0, float(np.max(np.abs(u[idx]))))
        if np.max(np.abs(res)) <= _NEWTON_RTOL * scale:
            return u, iteration
        jac = w_aa + np.diag(p * np.abs(u[idx]) ** (p - 1.0))
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(
                f"Newton Jacobian singular at level with "
                f"{idx.size} active nodes") from exc
        norm = np.max(np.abs(res))
        damping = 1.0
        while damping >= _DAMPING_FLOOR:
            trial = u.copy()
            trial[idx] += damping * step
            trial_res = full_residual(trial)
            if np.max(np.abs(trial_res)) <= (1.0 - 0.25 * damping) * norm:
                u, res = trial, trial_res
                break
            damping *= 0.5
        else:
            raise NewtonStall(
                f"damping floor reached with residual {norm:.3e} "
                f"after {iteration} iterations")
    raise NewtonStall(
        f"no convergence in {max_iter} iterations "
        f"(residual {np.max(np.abs(res)):.3e})")


def _active_mask(grid: Grid, n: int) -> np.ndarray:
    return distance_D(grid.nodes) > 1.0 / n


def solve_dirichlet_level(spec: ProblemSpec, n: int,
                          start: Optional[GridFunction] = None,
                          max_iter: int = 60) -> GridFunction:
    """Solve the collocation system on the domain excluding the core
    {D <= 1/n}, with excluded nodes frozen at the sub-solution."""
    n = int(n)
    if n < 4:
        raise BadConfig(f"exhaustion level must be at least 4, got {n}")
    active = _active_mask(spec.grid, n)
    if not np.any(active):
        raise BadConfig(f"no active nodes at exhaustion level {n}")
    if start is not None and not start.grid.same_as(spec.grid):
        raise GridMismatch("warm start lives on a different grid")
    matrix = assemble(spec.alpha, spec.grid, Zero())
    start_vals = (start.values if start is not None else spec.sub.values)
    values, _ = _newton_on_domain(spec, matrix, active, start_vals, max_iter)
    return GridFunction(spec.grid, values, Zero())


# ---------------------------------------------------------------------------
# Exhaustion driver.


def solve_blowup(spec: ProblemSpec, n_start: int, n_end: int,
                 max_iter: int = 60) -> SolveReport:
    """Run the exhaustion scheme on a doubling schedule of levels from
    ``n_start`` to ``n_end``, warm-starting each level from the previous
    one, and audit ordering against the sub/super pair and monotone
    growth across levels."""
    n_start, n_end = int(n_start), int(n_end)
    if n_start < 4:
        raise BadConfig(f"starting level must be at least 4, got {n_start}")
    if not n_start < n_end:
        raise BadConfig(
            f"levels must increase, got {n_start} -> {n_end}")
    if not np.any(_active_mask(spec.grid, n_start)):
        raise BadConfig(f"no active nodes at starting level {n_start}")

    levels = [n_start]
    while levels[-1] < n_end:
        levels.append(min(2 * levels[-1], n_end))

    matrix = assemble(spec.alpha, spec.grid, Zero())
    sub_vals = spec.sub.values
    super_vals = spec.super.values
    node_scale = 1.0 + np.abs(sub_vals) + np.abs(super_vals)

    u = sub_vals.copy()
    newton_iters = []
    ordering_ok = True
    monotone_ok = True
    for n in levels:
        active = _active_mask(spec.grid, n)
        u_new, iters = _newton_on_domain(spec, matrix, active, u, max_iter)
        newton_iters.append(iters)
        if np.any(u_new < sub_vals - _AUDIT_SLACK * node_scale) or \
           np.any(u_new > super_vals + _AUDIT_SLACK * node_scale):
            ordering_ok = False
        drop = u - u_new
        drop_scale = 1.0 + np.abs(u)
        if np.any(drop > _ABORT_SLACK * drop_scale):
            raise MonotoneViolation(
                f"iterate decreased by {np.max(drop):.3e} at level {n}")
        if np.any(drop > _AUDIT_SLACK * drop_scale):
            monotone_ok = False
        u = u_new

    final = GridFunction(spec.grid, u, Zero())
    idx = np.flatnonzero(_active_mask(spec.grid, levels[-1]))
    residual = (matrix.interior_weights @ u + matrix.exterior_correction
                + np.abs(u) ** (spec.p - 1.0) * u)[idx]
    residual_inf = float(np.max(np.abs(residual)))
    tolerance = _NEWTON_RTOL * max(1.0, float(np.max(np.abs(u[idx]))))
    return SolveReport(
        final=final,
        n_exhaustion_levels=len(levels),
        newton_iters=newton_iters,
        levels=levels,
        residual_inf=residual_inf,
        tolerance=tolerance,
        converged=residual_inf <= tolerance,
        ordering_ok=ordering_ok,
        monotone_ok=monotone_ok,
    )
