"""Controllability analysis of the cell model via iterated brackets.

For the control-affine system ``xdot = f(x) + h u`` the columns of the
controllability matrix are the iterated brackets ``ad^k h``, built by the
recursion ``ad^{k+1} = J(ad^k) f - J(f) ad^k`` with ``ad^0 = h``.  Bracket
Jacobians come from central finite differences; the drift Jacobian is exact.
At rest (all relaxation charges zero) the matrix collapses to a closed form
with Vandermonde structure in the reciprocal time constants, which this
module also provides as an independent cross-check.  The condition number of
that matrix is the conditioning/control-effort proxy everything downstream
consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteBracket, NonpositiveTimeConstant
from .model import (
    CellParameters,
    CellState,
    dynamics,
    equilibrium_state,
    eval_map,
    eval_map_derivative,
)

# 91 points, 0.05 to 0.95 step 0.01: stays clear of map extrapolation at the
# SOC range edges.
DEFAULT_SOC_GRID = np.linspace(0.05, 0.95, 91)

_FD_REL_STEP = 1e-6
_FD_ABS_FLOOR = 1e-9

# Default relative cutoff for the rank decision.
RANK_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CtrbMatrix:
    """Square bracket matrix, column k = ad^k h, plus where it was evaluated."""

    entries: np.ndarray
    eval_state: CellState
    eval_soc: float

    def rank(self, tolerance: float = RANK_TOLERANCE) -> int:
        return rank(self.entries, tolerance)

    def condition_number(self) -> float:
        return condition_number(self.entries)


@dataclass(frozen=True)
class ConditionProfile:
    """Condition number of the rest-point bracket matrix across SOC."""

    soc_grid: np.ndarray
    kappa: np.ndarray
    cell_id: str

    @property
    def log10_kappa(self) -> np.ndarray:
        return np.log10(self.kappa)


@dataclass(frozen=True)
class TwoStateEigs:
    """Closed-form eigenvalues for the single-RC rest-point matrix.

    ``lam_hi``/``lam_lo`` belong to C.T @ C and ``lam_inv_hi``/``lam_inv_lo``
    to (C^-1).T @ C^-1, where C is the 2x2 matrix [[1/Q, 0], [1, 1/tau]].
    """

    lam_hi: float
    lam_lo: float
    lam_inv_hi: float
    lam_inv_lo: float

    def kappa(self) -> float:
        return math.sqrt(self.lam_hi / self.lam_lo)


def input_vector(params: CellParameters) -> np.ndarray:
    """Input direction [1/Q, 1, ..., 1]; constant over state."""
    h = np.ones(params.n_x)
    h[0] = 1.0 / params.capacity_q
    return h


def drift_jacobian(params: CellParameters, state: CellState) -> np.ndarray:
    """Exact Jacobian of the drift.

    Row 0 is zero (SOC has no drift).  Row i couples back to SOC through the
    slope of the time-constant map, d(-q_i/tau_i)/dsoc = q_i tau_i'/tau_i^2,
    and relaxes through the diagonal -1/tau_i.
    """
    soc = state.soc
    jac = np.zeros((params.n_x, params.n_x))
    for i, (qi, tau_map) in enumerate(zip(state.q, params.tau_maps), start=1):
        tau = eval_map(tau_map, soc)
        if tau <= 0.0:
            raise NonpositiveTimeConstant(
                f"cell {params.cell_id!r}: tau = {tau:g} s at soc = {soc:g}"
            )
        coupling = qi * eval_map_derivative(tau_map, soc)
        tau_sq = tau * tau
        if tau_sq == 0.0:
            # subnormal tau underflows when squared; keep IEEE semantics so
            # the non-finite bracket guard can report it instead of a crash
            jac[i, 0] = 0.0 if coupling == 0.0 else math.copysign(math.inf, coupling)
        else:
            jac[i, 0] = coupling / tau_sq
        jac[i, i] = -1.0 / tau
    return jac


def _drift(params: CellParameters, x: np.ndarray) -> np.ndarray:
    return np.array(dynamics(params, CellState.from_vector(x), 0.0).f)


def _fd_jacobian(fn, x: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian of a vector function of the state vector."""
    n = x.size
    jac = np.empty((n, n))
    for j in range(n):
        step = max(_FD_REL_STEP * abs(x[j]), _FD_ABS_FLOOR)
        hi = x.copy()
        lo = x.copy()
        hi[j] += step
        lo[j] -= step
        jac[:, j] = (fn(hi) - fn(lo)) / (2.0 * step)
    return jac


def _bracket(params: CellParameters, order: int, x: np.ndarray) -> np.ndarray:
    if order == 0:
        return input_vector(params)

    def lower(y: np.ndarray) -> np.ndarray:
        return _bracket(params, order - 1, y)

    jac = _fd_jacobian(lower, x)
    j_f = drift_jacobian(params, CellState.from_vector(x))
    return jac @ _drift(params, x) - j_f @ lower(x)


def lie_bracket_sequence(
    params: CellParameters, state: CellState, max_order: int
) -> list[np.ndarray]:
    """Brackets ad^0 h .. ad^max_order h at the given state.

    Order 0 is exactly the input direction; higher orders differentiate the
    previous bracket numerically (central differences, relative step 1e-6,
    absolute floor 1e-9) and apply the exact drift Jacobian.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    x = np.array(state.as_vector())
    seq = []
    for order in range(max_order + 1):
        vec = _bracket(params, order, x)
        if not np.all(np.isfinite(vec)):
            raise NonFiniteBracket(
                f"cell {params.cell_id!r}: bracket of order {order} is not finite "
                f"at soc = {state.soc:g}"
            )
        seq.append(vec)
    return seq


def controllability_matrix(params: CellParameters, state: CellState) -> CtrbMatrix:
    """Assemble [h, ad^1 h, ..., ad^{n_x - 1} h] column by column."""
    seq = lie_bracket_sequence(params, state, params.n_x - 1)
    return CtrbMatrix(
        entries=np.column_stack(seq), eval_state=state, eval_soc=state.soc
    )


def equilibrium_ctrb(params: CellParameters, soc: float) -> CtrbMatrix:
    """Closed form of the bracket matrix at rest (all q = 0).

    Row 0 is [1/Q, 0, ..., 0]; row i is the geometric sequence
    [1, 1/tau_i, 1/tau_i^2, ...] — Vandermonde in the reciprocal time
    constants, hence full rank exactly when the tau values are pairwise
    distinct.
    """
    n = params.n_x
    entries = np.zeros((n, n))
    entries[0, 0] = 1.0 / params.capacity_q
    powers = np.arange(n)
    for i, tau_map in enumerate(params.tau_maps, start=1):
        tau = eval_map(tau_map, soc)
        if tau <= 0.0:
            raise NonpositiveTimeConstant(
                f"cell {params.cell_id!r}: tau = {tau:g} s at soc = {soc:g}"
            )
        entries[i, :] = (1.0 / tau) ** powers
    return CtrbMatrix(
        entries=entries, eval_state=equilibrium_state(params, soc), eval_soc=soc
    )


def _as_array(matrix) -> np.ndarray:
    if isinstance(matrix, CtrbMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def rank(matrix, tolerance: float = RANK_TOLERANCE) -> int:
    """Singular values above tolerance x largest singular value."""
    a = _as_array(matrix)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tolerance * s[0]))


def condition_number(matrix) -> float:
    """sigma_max / sigma_min, or +inf when the matrix is singular to
    working precision (smallest singular value at the round-off floor
    n * eps relative to the largest)."""
    a = _as_array(matrix)
    s = np.linalg.svd(a, compute_uv=False)
    floor = a.shape[0] * np.finfo(float).eps * s[0]
    if s[0] == 0.0 or s[-1] <= floor:
        return math.inf
    return float(s[0] / s[-1])


def two_state_eigs(capacity_q: float, tau: float) -> TwoStateEigs:
    """Closed-form spectrum for one RC pair.

    The radicand factors as (Q^2 tau^2 + (Q - tau)^2)(Q^2 tau^2 + (Q + tau)^2)
    and is shared by both matrices; the small eigenvalues are recovered from
    the exact determinants rather than the subtractive branch, which loses
    several digits to cancellation when Q tau is large.
    """
    if capacity_q <= 0.0 or tau <= 0.0:
        raise ValueError("capacity and time constant must be positive")
    q2 = capacity_q * capacity_q
    t2 = tau * tau
    rad = (q2 * t2 + (capacity_q - tau) ** 2) * (q2 * t2 + (capacity_q + tau) ** 2)
    root = math.sqrt(rad)
    lam_inv_hi = 0.5 * (root + q2 + t2 + q2 * t2)
    return TwoStateEigs(
        lam_hi=lam_inv_hi / (q2 * t2),
        lam_lo=1.0 / lam_inv_hi,
        lam_inv_hi=lam_inv_hi,
        lam_inv_lo=q2 * t2 / lam_inv_hi,
    )


def kappa_profile(params: CellParameters, soc_grid=None) -> ConditionProfile:
    """Rest-point condition number at every grid point."""
    grid = DEFAULT_SOC_GRID if soc_grid is None else np.asarray(soc_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("soc_grid must be a non-empty 1-d sequence")
    if grid[0] < 0.0 or grid[-1] > 1.0 or np.any(np.diff(grid) <= 0.0):
        raise ValueError("soc_grid must be strictly increasing within [0, 1]")
    kappa = np.array(
        [condition_number(equilibrium_ctrb(params, s).entries) for s in grid]
    )
    return ConditionProfile(soc_grid=grid.copy(), kappa=kappa, cell_id=params.cell_id)
