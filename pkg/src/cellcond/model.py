"""Equivalent-circuit cell model with SOC-dependent parameters.

A cell is a series resistor plus ``n_rc`` parallel RC pairs behind an
open-circuit voltage source.  Every electrical parameter is a polynomial in
state of charge, stored as an ascending-degree coefficient list.  The state
vector is ``[soc, q_1, ..., q_n]`` where ``q_i`` is the charge on RC pair
``i`` in coulombs; positive current charges the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import NonpositiveTimeConstant

UNITS = ("seconds", "farads", "ohms", "volts")


@dataclass(frozen=True)
class ParameterMap:
    """Polynomial in SOC, ascending-degree coefficients, with a unit tag."""

    coefficients: tuple[float, ...]
    unit: str

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("a parameter map needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("parameter map coefficients must be finite")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit tag {self.unit!r}, expected one of {UNITS}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def eval_map(pmap: ParameterMap, soc: float) -> float:
    """Evaluate the polynomial at ``soc`` (Horner's scheme)."""
    acc = 0.0
    for c in reversed(pmap.coefficients):
        acc = acc * soc + c
    return acc


def eval_map_derivative(pmap: ParameterMap, soc: float) -> float:
    """Exact d/dsoc of the polynomial at ``soc``."""
    acc = 0.0
    for k in range(len(pmap.coefficients) - 1, 0, -1):
        acc = acc * soc + k * pmap.coefficients[k]
    return acc


@dataclass(frozen=True)
class CellParameters:
    """Full electrical description of one cell.

    The constructor only normalises shapes; physical checks (positive
    capacity, positive time constants on the SOC range, and so on) live in
    :func:`validate_cell` so that cells loaded from files can be reported on
    rather than rejected mid-parse.
    """

    capacity_q: float
    n_rc: int
    tau_maps: tuple[ParameterMap, ...]
    c_maps: tuple[ParameterMap, ...]
    r_map: ParameterMap
    ocv_map: ParameterMap
    cell_id: str = "cell"
    batch_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "capacity_q", float(self.capacity_q))
        object.__setattr__(self, "n_rc", int(self.n_rc))
        object.__setattr__(self, "tau_maps", tuple(self.tau_maps))
        object.__setattr__(self, "c_maps", tuple(self.c_maps))
        if self.n_rc < 1:
            raise ValueError("n_rc must be at least 1")

    @property
    def n_x(self) -> int:
        """State dimension: SOC plus one charge per RC pair."""
        return self.n_rc + 1

    def with_cell_id(self, cell_id: str) -> "CellParameters":
        return replace(self, cell_id=cell_id)


@dataclass(frozen=True)
class CellState:
    """Operating point: state of charge plus RC-pair charges in coulombs."""

    soc: float
    q: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "soc", float(self.soc))
        object.__setattr__(self, "q", tuple(float(qi) for qi in self.q))

    def as_vector(self) -> tuple[float, ...]:
        return (self.soc, *self.q)

    @staticmethod
    def from_vector(x) -> "CellState":
        return CellState(x[0], tuple(x[1:]))


def equilibrium_state(params: CellParameters, soc: float) -> CellState:
    """Zero-current rest point: all RC charges relaxed to zero."""
    return CellState(soc, (0.0,) * params.n_rc)


@dataclass(frozen=True)
class DynamicsEval:
    """Control-affine pieces at one operating point: xdot = f + h * current."""

    f: tuple[float, ...]
    h: tuple[float, ...]
    v: float

    def xdot(self, current: float) -> tuple[float, ...]:
        return tuple(fi + hi * current for fi, hi in zip(self.f, self.h))


def dynamics(params: CellParameters, state: CellState, current: float) -> DynamicsEval:
    """Evaluate drift, input direction, and terminal voltage.

    The drift is ``[0, -q_i / tau_i(soc)]`` and the input direction is
    ``[1/Q, 1, ..., 1]``: current splits its effect between SOC bookkeeping
    and charging every RC pair directly.  Terminal voltage adds the
    open-circuit value, the RC overpotentials ``q_i / C_i(soc)``, and the
    ohmic drop.
    """
    soc = state.soc
    f = [0.0]
    v = eval_map(params.ocv_map, soc) + eval_map(params.r_map, soc) * current
    for qi, tau_map, c_map in zip(state.q, params.tau_maps, params.c_maps):
        tau = eval_map(tau_map, soc)
        if tau <= 0.0:
            raise NonpositiveTimeConstant(
                f"cell {params.cell_id!r}: tau = {tau:g} s at soc = {soc:g}"
            )
        f.append(-qi / tau)
        v += qi / eval_map(c_map, soc)
    h = (1.0 / params.capacity_q,) + (1.0,) * params.n_rc
    return DynamicsEval(f=tuple(f), h=h, v=v)


_SOC_CHECK_POINTS = [i / 100.0 for i in range(101)]


@dataclass(frozen=True)
class CellValidation:
    """Outcome of checking one cell: hard violations plus advisory warnings."""

    cell_id: str
    violations: tuple[str, ...] = field(default=())
    warnings: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_cell(params: CellParameters) -> CellValidation:
    """Check a cell over a 101-point SOC grid on [0, 1].

    Hard violations: nonpositive capacity, mismatched map-list lengths,
    nonpositive time constant or capacitance anywhere on the grid, and two
    RC pairs sharing coefficient-identical time-constant maps (which makes
    the rest-point conditioning analysis singular).  A non-monotone OCV is
    only a warning; some chemistries genuinely plateau.
    """
    violations = []
    warnings = []
    if params.capacity_q <= 0.0:
        violations.append(f"nonpositive capacity {params.capacity_q:g} C")
    if len(params.tau_maps) != params.n_rc or len(params.c_maps) != params.n_rc:
        violations.append(
            f"map list lengths ({len(params.tau_maps)} tau, {len(params.c_maps)} c) "
            f"do not match n_rc = {params.n_rc}"
        )
    for i, tau_map in enumerate(params.tau_maps):
        worst = min(eval_map(tau_map, s) for s in _SOC_CHECK_POINTS)
        if worst <= 0.0:
            violations.append(f"tau map {i} reaches {worst:g} s on [0, 1]")
    for i, c_map in enumerate(params.c_maps):
        worst = min(eval_map(c_map, s) for s in _SOC_CHECK_POINTS)
        if worst <= 0.0:
            violations.append(f"capacitance map {i} reaches {worst:g} F on [0, 1]")
    seen: dict[tuple[float, ...], int] = {}
    for i, tau_map in enumerate(params.tau_maps):
        if tau_map.coefficients in seen:
            violations.append(
                f"tau maps {seen[tau_map.coefficients]} and {i} are identical"
            )
        else:
            seen[tau_map.coefficients] = i
    ocv = [eval_map(params.ocv_map, s) for s in _SOC_CHECK_POINTS]
    if any(b < a for a, b in zip(ocv, ocv[1:])):
        warnings.append("open-circuit voltage is not monotone on [0, 1]")
    return CellValidation(
        cell_id=params.cell_id,
        violations=tuple(violations),
        warnings=tuple(warnings),
    )
