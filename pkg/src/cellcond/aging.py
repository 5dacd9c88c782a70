"""Parameter sensitivity of the conditioning metric, and cell aging.

Only the capacity and the time-constant maps enter the bracket matrix, so
those are the only sensitivity targets; capacitance, resistance, and
open-circuit-voltage maps shape the terminal voltage but not conditioning.
Aging scales capacity down and time constants up, either uniformly (nominal
end-of-life) or with seeded per-cell variation (second-life populations).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ctrb import ConditionProfile, kappa_profile
from .errors import CountExceedsPopulation, MixedGrids
from .model import CellParameters, ParameterMap

AGED_SUFFIX = "-aged"


@dataclass(frozen=True)
class SensitivityRecord:
    """Normalized sensitivity (d kappa / d theta) * theta along the SOC grid."""

    cell_id: str
    target: str
    soc_grid: np.ndarray
    s_theta: np.ndarray


@dataclass(frozen=True)
class AgingSpec:
    """Multiplicative aging: factors applied to capacity and every tau map.

    Jitters are half-widths of uniform per-cell variation around each factor;
    zero jitter means every aged cell gets exactly the nominal factors.
    """

    q_factor: float = 0.8
    tau_factor: float = 3.0
    q_jitter: float = 0.0
    tau_jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.q_factor <= 0.0 or self.tau_factor <= 0.0:
            raise ValueError("aging factors must be positive")
        if not (0.0 <= self.q_jitter < self.q_factor):
            raise ValueError("q_jitter must satisfy 0 <= jitter < q_factor")
        if not (0.0 <= self.tau_jitter < self.tau_factor):
            raise ValueError("tau_jitter must satisfy 0 <= jitter < tau_factor")


def canonical_target(params: CellParameters, target) -> str:
    """Normalize a sensitivity target to 'capacity' or 'tau<i>' (map index).

    Anything else — capacitance, resistance, OCV — is rejected: those maps
    never appear in the bracket matrix, so their sensitivity is identically
    zero and asking for it is almost certainly a mistake.
    """
    if target == "capacity":
        return "capacity"
    index = None
    if isinstance(target, int):
        index = target
    elif isinstance(target, str) and target.startswith("tau"):
        try:
            index = int(target[3:])
        except ValueError:
            index = None
    if index is not None and 0 <= index < params.n_rc:
        return f"tau{index}"
    raise ValueError(
        f"target {target!r} is not a parameter of the controllability matrix; "
        f"valid targets: 'capacity' or 'tau0'..'tau{params.n_rc - 1}'"
    )


def _scale_map(pmap: ParameterMap, factor: float) -> ParameterMap:
    return ParameterMap(tuple(c * factor for c in pmap.coefficients), pmap.unit)


def _scale_target(params: CellParameters, target: str, factor: float) -> CellParameters:
    if target == "capacity":
        return replace(params, capacity_q=params.capacity_q * factor)
    index = int(target[3:])
    tau_maps = tuple(
        _scale_map(m, factor) if i == index else m
        for i, m in enumerate(params.tau_maps)
    )
    return replace(params, tau_maps=tau_maps)


def normalized_sensitivity(
    params: CellParameters, target, soc_grid=None, rel_step: float = 0.01
) -> SensitivityRecord:
    """Forward-difference normalized sensitivity along the SOC grid.

    The target is scaled by (1 + rel_step) — a map scales all of its
    coefficients together — and the conditioning change divides by the
    relative step, which is exactly (d kappa / d theta) * theta up to the
    difference order.
    """
    if rel_step <= 0.0:
        raise ValueError("rel_step must be positive")
    name = canonical_target(params, target)
    base = kappa_profile(params, soc_grid)
    bumped = kappa_profile(_scale_target(params, name, 1.0 + rel_step), base.soc_grid)
    return SensitivityRecord(
        cell_id=params.cell_id,
        target=name,
        soc_grid=base.soc_grid,
        s_theta=(bumped.kappa - base.kappa) / rel_step,
    )


def _rescale_cell(
    params: CellParameters, q_factor: float, tau_factor: float
) -> CellParameters:
    return replace(
        params,
        capacity_q=params.capacity_q * q_factor,
        tau_maps=tuple(_scale_map(m, tau_factor) for m in params.tau_maps),
        cell_id=params.cell_id + AGED_SUFFIX,
    )


def apply_eol(params: CellParameters, spec: AgingSpec) -> CellParameters:
    """Nominal end-of-life rescale: capacity down, every tau map up.

    The spec must carry zero jitter — per-cell variation belongs to
    randomize_second_life, where a seed makes it reproducible.
    """
    if spec.q_jitter != 0.0 or spec.tau_jitter != 0.0:
        raise ValueError("apply_eol needs a zero-jitter spec")
    return _rescale_cell(params, spec.q_factor, spec.tau_factor)


def randomize_second_life(
    cells, count: int, spec: AgingSpec, seed: int | None = None
) -> list[CellParameters]:
    """Age a seeded random subset of the population, leave the rest alone.

    Selection is without replacement; each selected cell draws its own
    factors uniformly from [factor - jitter, factor + jitter], independently
    for capacity and time constants.  Output preserves population order.
    """
    if count > len(cells):
        raise CountExceedsPopulation(
            f"asked for {count} aged cells from a population of {len(cells)}"
        )
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    chosen = sorted(rng.choice(len(cells), size=count, replace=False).tolist())
    factors = {
        i: (
            rng.uniform(spec.q_factor - spec.q_jitter, spec.q_factor + spec.q_jitter),
            rng.uniform(
                spec.tau_factor - spec.tau_jitter, spec.tau_factor + spec.tau_jitter
            ),
        )
        for i in chosen
    }
    return [
        _rescale_cell(cell, *factors[i]) if i in factors else cell
        for i, cell in enumerate(cells)
    ]


@dataclass(frozen=True)
class BatchStats:
    """Per-batch aggregate of conditioning profiles.

    Carries both aggregation orders — mean of log10 kappa (headline, with
    its population standard deviation) and log10 of mean kappa — since
    either is a defensible way to summarize spread over decades.
    """

    batch_id: str
    soc_grid: np.ndarray
    mean_log10_kappa: np.ndarray
    std_log10_kappa: np.ndarray
    log10_mean_kappa: np.ndarray


def batch_statistics(profiles, batch_by_cell: dict) -> list[BatchStats]:
    """Group profiles by batch and aggregate log10 kappa per grid point."""
    if not profiles:
        return []
    grid = profiles[0].soc_grid
    groups: dict[str, list[ConditionProfile]] = {}
    for p in profiles:
        if not np.array_equal(p.soc_grid, grid):
            raise MixedGrids(
                f"profile for cell {p.cell_id!r} uses a different SOC grid"
            )
        if p.cell_id not in batch_by_cell:
            raise ValueError(f"no batch assignment for cell {p.cell_id!r}")
        groups.setdefault(batch_by_cell[p.cell_id], []).append(p)
    out = []
    for batch_id in sorted(groups):
        kappa = np.stack([p.kappa for p in groups[batch_id]])
        logs = np.log10(kappa)
        out.append(
            BatchStats(
                batch_id=batch_id,
                soc_grid=grid.copy(),
                mean_log10_kappa=logs.mean(axis=0),
                std_log10_kappa=logs.std(axis=0),
                log10_mean_kappa=np.log10(kappa.mean(axis=0)),
            )
        )
    return out
