"""Constant current-constant voltage charge simulation (forward Euler).

Each cell charges at a fixed current until its terminal voltage reaches the
limit, then holds the limit while the current decays; charging completes
when the held current drops below the cutoff.  Cells are simulated
independently — there is no shared bus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCv, NonpositiveTimeConstant
from .model import CellParameters, CellState, dynamics, eval_map, eval_map_derivative

COMPLETED = "completed"
TIMED_OUT = "t_max"
FAULT = "fault"


@dataclass(frozen=True)
class CccvProtocol:
    """Charge protocol: amperes in, volts held, amperes to stop at.

    ``sample_every_s`` bounds trajectory memory by recording once per second
    of simulated time by default; set it to ``dt`` to record every step.
    """

    i_cc: float
    v_limit: float
    i_cutoff: float = 0.01
    dt: float = 0.1
    t_max: float = 36000.0
    sample_every_s: float = 1.0

    def __post_init__(self):
        if not (self.i_cc > self.i_cutoff > 0.0):
            raise ValueError("need i_cc > i_cutoff > 0")
        if self.dt <= 0.0 or self.t_max <= 0.0 or self.sample_every_s <= 0.0:
            raise ValueError("dt, t_max and sample_every_s must be positive")


@dataclass(frozen=True)
class SimResult:
    """Outcome for one cell.

    Times are NaN when the corresponding event never happened.  Trajectory
    columns are (t_s, current_a, soc, v_v), sampled on the protocol's
    cadence plus the final event row.
    """

    cell_id: str
    t_cv_start: float
    t_complete: float
    trajectory: np.ndarray
    terminated_by: str


def euler_step(
    params: CellParameters, state: CellState, current: float, dt: float
) -> CellState:
    """One explicit step x + dt * (f(x) + h * current)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    d = dynamics(params, state, current)
    xdot = d.xdot(current)
    soc = state.soc + dt * xdot[0]
    q = tuple(qi + dt * qd for qi, qd in zip(state.q, xdot[1:]))
    return CellState(soc, q)


def cv_current(params: CellParameters, state: CellState, v_limit: float) -> float:
    """Current that holds the terminal voltage at the limit.

    With ohmic resistance the hold is algebraic: the resistor absorbs
    whatever the limit leaves over.  A zero-resistance cell has no
    instantaneous voltage/current coupling, so instead the current that
    makes dV/dt = 0 on the constraint manifold is used.  Either way the
    result is floored at zero (the charger does not discharge).
    """
    soc = state.soc
    r = eval_map(params.r_map, soc)
    v_stack = eval_map(params.ocv_map, soc)
    for qi, c_map in zip(state.q, params.c_maps):
        v_stack += qi / eval_map(c_map, soc)
    if r > 0.0:
        return max(0.0, (v_limit - v_stack) / r)
    num = 0.0
    den = eval_map_derivative(params.ocv_map, soc) / params.capacity_q
    for qi, tau_map, c_map in zip(state.q, params.tau_maps, params.c_maps):
        tau = eval_map(tau_map, soc)
        if tau <= 0.0:
            raise NonpositiveTimeConstant(
                f"cell {params.cell_id!r}: tau = {tau:g} s at soc = {soc:g}"
            )
        c = eval_map(c_map, soc)
        num += qi / (tau * c)
        den += 1.0 / c
    if den <= 0.0:
        raise DegenerateCv(
            f"cell {params.cell_id!r}: zero-resistance voltage hold is ill-posed "
            f"at soc = {soc:g} (denominator {den:g})"
        )
    return max(0.0, num / den)


def _simulate(params: CellParameters, protocol: CccvProtocol, initial: CellState):
    dt = protocol.dt
    state = initial
    in_cv = False
    t_cv = math.nan
    t_done = math.nan
    terminated = TIMED_OUT
    rows: list[tuple[float, float, float, float]] = []
    next_sample = 0.0
    k = 0

    def record(t, current, soc, v):
        if rows and rows[-1][0] == t:
            rows[-1] = (t, current, soc, v)
        else:
            rows.append((t, current, soc, v))

    try:
        while True:
            t = k * dt
            d = dynamics(params, state, protocol.i_cc)
            if not in_cv and d.v >= protocol.v_limit:
                in_cv = True
                t_cv = t
            if in_cv:
                current = cv_current(params, state, protocol.v_limit)
                v = dynamics(params, state, current).v
                if current < protocol.i_cutoff:
                    t_done = t
                    terminated = COMPLETED
                    record(t, current, state.soc, v)
                    break
            else:
                current = protocol.i_cc
                v = d.v
            if t >= protocol.t_max:
                terminated = TIMED_OUT
                record(t, current, state.soc, v)
                break
            if t + 1e-9 >= next_sample:
                record(t, current, state.soc, v)
                next_sample = (
                    math.floor(t / protocol.sample_every_s) + 1
                ) * protocol.sample_every_s
            state = euler_step(params, state, current, dt)
            k += 1
    except (NonpositiveTimeConstant, DegenerateCv):
        terminated = FAULT
        t_done = math.nan
    return SimResult(
        cell_id=params.cell_id,
        t_cv_start=t_cv,
        t_complete=t_done,
        trajectory=np.array(rows).reshape(-1, 4),
        terminated_by=terminated,
    )


def run_cccv(cells, protocol: CccvProtocol, initial) -> list[SimResult]:
    """Simulate every cell under the same protocol, one result per cell.

    ``initial`` gives one starting state per cell.  A fault inside one
    cell's loop (bad map, ill-posed hold) marks that result only; the other
    cells still run.
    """
    if len(initial) != len(cells):
        raise ValueError("need exactly one initial state per cell")
    return [
        _simulate(params, protocol, state) for params, state in zip(cells, initial)
    ]
