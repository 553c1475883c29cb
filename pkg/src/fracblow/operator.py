"""Dense collocation discretization of the 1-D integral fractional
Laplacian on the punctured interval, honouring a declared exterior
extension exactly.

For a node x the operator value is assembled from exact kernel moments
over a partition of the real line:

* a symmetric self panel (x-r, x+r), free of other nodes, integrated in
  closed form against the second-difference model of the integrand
  (the panel radius never reaches 0, the other side of 0, or the outer
  boundary);
* piecewise-linear interpolation between consecutive nodes on each side
  of 0 -- never across 0, where functions of interest blow up;
* the uncovered inner gaps (0, x_first) on each side, where the function
  is frozen at its innermost node value (the gap width shrinks
  algebraically under refinement, so the frozen-value rule is
  consistent for any integrable blow-up power);
* linear bridges from the outermost nodes to the boundary value implied
  by the exterior extension;
* the exterior |y| >= 1, in closed form for the zero and constant
  extensions and via a Gauss hypergeometric identity for power tails.

Every piece is accumulated in difference form (weights multiply
u(x) - u(y-model)), so globally constant data is annihilated exactly up
to dot-product rounding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import math

import numpy as np
from scipy.special import digamma, hyp2f1

from .errors import BadConfig, GridMismatch
from .mesh import Constant, Exterior, Grid, GridFunction, PowerTail, Zero

__all__ = ["OperatorMatrix", "assemble", "apply", "power_tail_gap",
           "power_tail_moment"]


@dataclass(eq=False)
class OperatorMatrix:
    """Dense discrete operator: apply(u) = interior_weights @ u.values +
    exterior_correction, valid for grid functions with the same grid and
    the same exterior extension used at assembly."""

    alpha: float
    grid: Grid
    interior_weights: np.ndarray
    exterior_correction: np.ndarray
    exterior: Exterior

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            n = self.grid.n_nodes
            writer.writerow(["row"] + [f"w{j}" for j in range(n)]
                            + ["exterior_correction"])
            for i in range(n):
                writer.writerow(
                    [i] + [repr(float(w)) for w in self.interior_weights[i]]
                    + [repr(float(self.exterior_correction[i]))])


def _gauss_2f1_log_case(b: float, x: float) -> float:
    """hyp2f1(1, b; b+1; x) for x in (0.5, 1), summed as the classical
    expansion in powers of (1 - x) around the logarithmic singularity.

    This parameter family is exactly the degenerate case where the two
    upper parameters sum to the lower one; library routines built on the
    generic connection formulas lose all accuracy there (observed sign
    errors near x = 1 at non-half-integer b), while this expansion
    converges geometrically with ratio 1 - x.
    """
    w = 1.0 - x
    log_w = math.log(w)
    total = 0.0
    coef = 1.0                 # (b)_n / n!
    psi_n = digamma(1.0)       # psi(n + 1)
    psi_b = float(digamma(b))  # psi(b + n)
    w_pow = 1.0
    for n in range(400):
        term = coef * (psi_n - psi_b - log_w) * w_pow
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        coef *= (b + n) / (n + 1.0)
        psi_n += 1.0 / (n + 1.0)
        psi_b += 1.0 / (b + n)
        w_pow *= w
    return b * total


def power_tail_gap(alpha: float, tau: float, x: float) -> float:
    """Closed form of integral_1^inf (1 - z^tau) (z - x)^(-1-2*alpha) dz
    for |x| < 1 and tau < 2*alpha (use -x for the left exterior piece).

    The integrand vanishes at z = 1, so this stays bounded (or mildly
    singular) as x -> 1 where the raw tail moment blows up like the
    kernel mass; computing the difference directly avoids a catastrophic
    cancellation between two large hypergeometric values.
    """
    if not (-1.0 < x < 1.0):
        raise BadConfig(f"collocation point must lie in (-1,1), got {x}")
    c = 2.0 * alpha - tau
    if c <= 0.0:
        raise BadConfig(
            f"power-tail exponent {tau} must lie below 2*alpha = {2*alpha}")
    # by parts: (-tau / 2a) * integral_1^inf z^(tau-1) (z-x)^(-2a) dz
    if alpha == 0.5 and x > 0.5:
        gauss = _gauss_2f1_log_case(c, x)
    else:
        gauss = float(hyp2f1(2.0 * alpha, c, c + 1.0, x))
    return (-tau / (2.0 * alpha)) * gauss / c


def power_tail_moment(alpha: float, tau: float, x: float) -> float:
    """Closed form of integral_1^inf z^tau (z - x)^(-1-2*alpha) dz for
    |x| < 1 and tau < 2*alpha (use -x for the left exterior piece)."""
    mass = (1.0 - x) ** (-2.0 * alpha) / (2.0 * alpha)
    return mass - power_tail_gap(alpha, tau, x)


def _exterior_limit(exterior: Exterior) -> float:
    """Boundary value the exterior extension implies at |x| -> 1+."""
    if isinstance(exterior, Zero):
        return 0.0
    if isinstance(exterior, Constant):
        return float(exterior.value)
    return float(exterior.amplitude)


def _kernel_moments(A, B, alpha):
    """J0 = integral_A^B s^(-1-2a) ds and J1 = integral_A^B s^(-2a) ds."""
    twoa = 2.0 * alpha
    J0 = (A ** (-twoa) - B ** (-twoa)) / twoa
    if alpha == 0.5:
        J1 = np.log(B / A)
    else:
        J1 = (B ** (1.0 - twoa) - A ** (1.0 - twoa)) / (1.0 - twoa)
    return J0, J1


def _build_pieces(grid: Grid, exterior: Exterior):
    """Global partition of (-1,1) into linear pieces (a, b, jl, jr, el, er):
    the model value runs linearly from slot jl at a to slot jr at b;
    slot -1 means the fixed value el/er instead of a node."""
    x = grid.nodes
    n = x.size
    E = _exterior_limit(exterior)
    right = np.flatnonzero(x > 0.0)
    left = np.flatnonzero(x < 0.0)
    pa, pb, jl, jr, el, er = [], [], [], [], [], []

    def add(a, b, j_lo, j_hi, e_lo=0.0, e_hi=0.0):
        pa.append(a); pb.append(b); jl.append(j_lo); jr.append(j_hi)
        el.append(e_lo); er.append(e_hi)

    # left bridge, left segments, left inner gap
    i0 = left[0]
    add(-1.0, x[i0], -1, i0, E, 0.0)
    for k in range(left.size - 1):
        add(x[left[k]], x[left[k + 1]], left[k], left[k + 1])
    iL = left[-1]
    add(x[iL], 0.0, iL, iL)
    # right inner gap, right segments, right bridge
    iR = right[0]
    add(0.0, x[iR], iR, iR)
    for k in range(right.size - 1):
        add(x[right[k]], x[right[k + 1]], right[k], right[k + 1])
    i1 = right[-1]
    add(x[i1], 1.0, i1, -1, 0.0, E)

    return (np.array(pa), np.array(pb), np.array(jl, dtype=int),
            np.array(jr, dtype=int), np.array(el), np.array(er))


def _self_radii(grid: Grid) -> np.ndarray:
    """Per-node self-panel radius: largest symmetric interval around the
    node that contains no other node and stays clear of 0 and +-1."""
    x = grid.nodes
    r = np.empty_like(x)
    for mask in (x < 0.0, x > 0.0):
        side = np.flatnonzero(mask)
        xs = x[side]
        inner = np.abs(xs) / 2.0          # half the distance to 0
        outer = (1.0 - np.abs(xs)) / 2.0  # half the distance to the boundary
        gaps = np.diff(xs)
        lo = np.full(xs.size, np.inf)
        hi = np.full(xs.size, np.inf)
        if gaps.size:
            lo[1:] = gaps
            hi[:-1] = gaps
        if xs[0] < 0.0:   # left side: ordered from boundary toward 0
            bound_lo, bound_hi = outer, inner
        else:             # right side: ordered from 0 toward boundary
            bound_lo, bound_hi = inner, outer
        r[side] = np.minimum(np.minimum(lo, hi),
                             np.minimum(bound_lo, bound_hi))
    return r


def assemble(alpha: float, grid: Grid, exterior: Exterior) -> OperatorMatrix:
    """Assemble the dense collocation matrix of the fractional Laplacian
    of order ``alpha`` on ``grid`` under the given exterior extension."""
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise BadConfig(f"alpha must lie strictly in (0,1), got {alpha}")
    if not isinstance(grid, Grid):
        raise BadConfig("grid must be a Grid instance")
    if not isinstance(exterior, (Zero, Constant, PowerTail)):
        raise BadConfig(f"unknown exterior extension {exterior!r}")
    if isinstance(exterior, PowerTail) and exterior.tau >= 2.0 * alpha:
        raise BadConfig(
            f"power-tail exponent {exterior.tau} must lie below "
            f"2*alpha = {2.0 * alpha} for an integrable exterior")

    x = grid.nodes
    n = x.size
    twoa = 2.0 * alpha
    pa, pb, jl, jr, el, er = _build_pieces(grid, exterior)
    radii = _self_radii(grid)
    E = _exterior_limit(exterior)

    W = np.zeros((n, n))
    corr = np.zeros(n)

    # neighbours used by the self panel: the model value at x +- r
    left_adj = np.empty((2, n))   # row 0: theta, row 1: slot (as float)
    right_adj = np.empty((2, n))

    for mask in (x < 0.0, x > 0.0):
        side = np.flatnonzero(mask)
        xs = x[side]
        for k, i in enumerate(side):
            r = radii[i]
            # model value at x - r
            if k == 0:
                if xs[0] > 0.0:
                    # innermost right node: x - r sits in the frozen gap
                    left_adj[:, i] = (0.0, i)
                else:
                    # leftmost node: x - r sits on the bridge to -1
                    theta = r / (xs[0] + 1.0)
                    left_adj[:, i] = (theta, -1)
            else:
                theta = r / (xs[k] - xs[k - 1])
                left_adj[:, i] = (theta, side[k - 1])
            # model value at x + r
            if k == side.size - 1:
                if xs[-1] > 0.0:
                    theta = r / (1.0 - xs[-1])
                    right_adj[:, i] = (theta, -1)
                else:
                    # innermost left node: x + r sits in the frozen gap
                    right_adj[:, i] = (0.0, i)
            else:
                theta = r / (xs[k + 1] - xs[k])
                right_adj[:, i] = (theta, side[k + 1])

    for i in range(n):
        xi = x[i]
        r = radii[i]

        # trim the self panel out of the two pieces meeting at x_i, but
        # keep the linear model anchored at the ORIGINAL piece endpoints:
        # only the integration limits shrink, not the interpolation line
        ta = pa.copy()
        tb = pb.copy()
        ta[pa == xi] = xi + r
        tb[pb == xi] = xi - r
        keep = tb - ta > 1e-300
        ta, tb = ta[keep], tb[keep]
        oa, ob = pa[keep], pb[keep]
        jlk, jrk, elk, erk = jl[keep], jr[keep], el[keep], er[keep]

        right_of = oa >= xi
        dn = np.where(right_of, ta - xi, xi - tb)    # trimmed near limit
        df = np.where(right_of, tb - xi, xi - ta)    # trimmed far limit
        An = np.where(right_of, oa - xi, xi - ob)    # original near end
        Af = np.where(right_of, ob - xi, xi - oa)    # original far end
        J0, J1 = _kernel_moments(dn, df, alpha)
        width = Af - An
        w_near = (Af * J0 - J1) / width
        w_far = (J1 - An * J0) / width
        # map near/far weights back to the a-end and b-end of each piece
        w_a = np.where(right_of, w_near, w_far)
        w_b = np.where(right_of, w_far, w_near)

        # diagonal and correction terms are summed with fsum so the result
        # does not depend on piece order; mirrored rows see the same terms
        # in reverse and would otherwise pick up order-dependent rounding
        mass = ((1.0 - xi) ** (-twoa) + (1.0 + xi) ** (-twoa)) / twoa
        diag_terms = [mass]
        corr_terms = []

        diag_terms.extend(w_a.tolist())
        diag_terms.extend(w_b.tolist())
        for w_end, j_end, e_end in ((w_a, jlk, elk), (w_b, jrk, erk)):
            node_end = j_end >= 0
            np.add.at(W[i], j_end[node_end], -w_end[node_end])
            if not np.all(node_end):
                fixed = ~node_end
                corr_terms.extend((-w_end[fixed] * e_end[fixed]).tolist())

        # self panel: second-difference model with exact kernel moment
        c_self = r ** (-twoa) / (2.0 - twoa)
        for theta, slot in (left_adj[:, i], right_adj[:, i]):
            t = c_self * theta
            diag_terms.append(t)
            if slot >= 0.0:
                W[i, int(slot)] -= t
            else:
                corr_terms.append(-t * E)

        # exterior |y| >= 1: kernel mass to the diagonal, declared data to
        # the correction
        if isinstance(exterior, Constant):
            corr_terms.append(-exterior.value * mass)
        elif isinstance(exterior, PowerTail):
            gap_sum = (power_tail_gap(alpha, exterior.tau, xi)
                       + power_tail_gap(alpha, exterior.tau, -xi))
            corr_terms.append(-exterior.amplitude * (mass - gap_sum))

        W[i, i] += math.fsum(diag_terms)
        corr[i] = math.fsum(corr_terms)

    return OperatorMatrix(alpha=alpha, grid=grid, interior_weights=W,
                          exterior_correction=corr, exterior=exterior)


def apply(M: OperatorMatrix, u: GridFunction) -> np.ndarray:
    """Discrete fractional Laplacian of ``u`` at every grid node."""
    if not M.grid.same_as(u.grid):
        raise GridMismatch("grid of the operand differs from the matrix grid")
    if u.exterior != M.exterior:
        raise GridMismatch(
            f"operand exterior {u.exterior!r} differs from matrix "
            f"exterior {M.exterior!r}")
    return M.interior_weights @ u.values + M.exterior_correction
