"""Synthetic cell populations and the population JSON format.

Real parameter maps come from fitting campaigns that are out of scope here,
so this module fabricates plausible ones: two batches with different nominal
time-constant maps, every coefficient scattered cell-to-cell by a Gaussian
coefficient of variation.  Files round-trip through a flat JSON schema so
externally fitted cells can be fed to the same analyses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GenerationFailed, ParseError, SchemaError, ValidationError
from .model import CellParameters, ParameterMap, validate_cell

# Nominal maps, ascending degree in SOC.  The two batches get distinct
# time-constant maps (different manufacturers); batch 1 relaxes slower at
# low SOC, which shows up as worse conditioning there.  All stay inside
# 5-300 s over the whole SOC range.
BATCH_TAU_NOMINALS = (
    (
        (12.0, -8.0, 2.0, 4.0),
        (60.0, -30.0, 15.0, 10.0),
        (270.0, -120.0, 60.0, 20.0),
    ),
    (
        (8.0, 4.0, -2.0, 1.0),
        (45.0, 10.0, -5.0, 5.0),
        (180.0, 40.0, -30.0, 25.0),
    ),
)
C_NOMINAL = (5000.0, 800.0, -400.0, 200.0)
R_NOMINAL = (0.012, -0.005, 0.002)
OCV_NOMINAL = (3.2, 0.35, -0.15, 0.1)

_MAX_DRAW_ATTEMPTS = 100


@dataclass(frozen=True)
class PopulationSpec:
    """Recipe for a synthetic population.

    ``tau_nominals`` holds one tuple of map-coefficient tuples per batch;
    ``cov`` is the per-coefficient Gaussian coefficient of variation.
    """

    batch_sizes: tuple[int, ...] = (33, 33)
    capacity_nominal_c: float = 3960.0
    n_rc: int = 3
    tau_nominals: tuple = BATCH_TAU_NOMINALS
    c_nominal: tuple[float, ...] = C_NOMINAL
    r_nominal: tuple[float, ...] = R_NOMINAL
    ocv_nominal: tuple[float, ...] = OCV_NOMINAL
    cov: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.cov < 0.0:
            raise ValueError("cov must be >= 0")
        if self.capacity_nominal_c <= 0.0:
            raise ValueError("nominal capacity must be positive")
        if len(self.tau_nominals) != len(self.batch_sizes):
            raise ValueError("need one tau nominal set per batch")
        if any(n < 1 for n in self.batch_sizes):
            raise ValueError("batch sizes must be >= 1")
        grid = [i / 100.0 for i in range(101)]
        for batch in self.tau_nominals:
            if len(batch) != self.n_rc:
                raise ValueError("each batch needs n_rc tau nominal maps")
            for coeffs in batch:
                if min(_polyval(coeffs, s) for s in grid) <= 0.0:
                    raise ValueError(f"nominal tau map {coeffs} not positive on [0,1]")
        if min(_polyval(self.c_nominal, s) for s in grid) <= 0.0:
            raise ValueError("nominal capacitance map must be positive on [0,1]")


def _polyval(coeffs, soc: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * soc + c
    return acc


def _jittered(rng: np.random.Generator, coeffs, cov: float) -> tuple[float, ...]:
    return tuple(float(c * (1.0 + rng.normal(0.0, cov))) for c in coeffs)


def _draw_cell(
    rng: np.random.Generator, spec: PopulationSpec, batch: int, cell_id: str
) -> CellParameters:
    return CellParameters(
        capacity_q=spec.capacity_nominal_c * (1.0 + rng.normal(0.0, spec.cov)),
        n_rc=spec.n_rc,
        tau_maps=tuple(
            ParameterMap(_jittered(rng, c, spec.cov), "seconds")
            for c in spec.tau_nominals[batch]
        ),
        c_maps=tuple(
            ParameterMap(_jittered(rng, spec.c_nominal, spec.cov), "farads")
            for _ in range(spec.n_rc)
        ),
        r_map=ParameterMap(_jittered(rng, spec.r_nominal, spec.cov), "ohms"),
        ocv_map=ParameterMap(_jittered(rng, spec.ocv_nominal, spec.cov), "volts"),
        cell_id=cell_id,
        batch_id=f"batch{batch + 1}",
    )


def generate_population(spec: PopulationSpec) -> list[CellParameters]:
    """Draw the whole population, re-drawing any cell that fails validation."""
    rng = np.random.default_rng(spec.seed)
    cells = []
    for b, size in enumerate(spec.batch_sizes):
        for j in range(size):
            cell_id = f"b{b + 1}-c{j:02d}"
            for _ in range(_MAX_DRAW_ATTEMPTS):
                candidate = _draw_cell(rng, spec, b, cell_id)
                if validate_cell(candidate).ok:
                    break
            else:
                raise GenerationFailed(
                    f"no valid draw for {cell_id} in {_MAX_DRAW_ATTEMPTS} attempts; "
                    f"cov {spec.cov:g} is probably too wide for the nominals"
                )
            cells.append(candidate)
    return cells


def save_population(cells, path) -> None:
    data = [
        {
            "cell_id": c.cell_id,
            "batch_id": c.batch_id,
            "capacity_coulombs": c.capacity_q,
            "n_rc": c.n_rc,
            "tau_coeffs": [list(m.coefficients) for m in c.tau_maps],
            "c_coeffs": [list(m.coefficients) for m in c.c_maps],
            "r_coeffs": list(c.r_map.coefficients),
            "ocv_coeffs": list(c.ocv_map.coefficients),
        }
        for c in cells
    ]
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


_REQUIRED_KEYS = (
    "cell_id",
    "batch_id",
    "capacity_coulombs",
    "n_rc",
    "tau_coeffs",
    "c_coeffs",
    "r_coeffs",
    "ocv_coeffs",
)


def _coeff_list(obj, key: str, where: str) -> tuple[float, ...]:
    raw = obj[key]
    if not isinstance(raw, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
    ):
        raise SchemaError(f"{where}: {key} must be an array of numbers")
    return tuple(float(v) for v in raw)


def _nested_coeffs(obj, key: str, where: str) -> list[tuple[float, ...]]:
    raw = obj[key]
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise SchemaError(f"{where}: {key} must be an array of arrays")
    return [
        _coeff_list({key: row}, key, f"{where}[{i}]") for i, row in enumerate(raw)
    ]


def _cell_from_obj(obj, index: int) -> CellParameters:
    where = f"cell #{index}"
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise SchemaError(f"{where}: missing keys {missing}")
    if not isinstance(obj["cell_id"], str) or not isinstance(obj["batch_id"], str):
        raise SchemaError(f"{where}: cell_id and batch_id must be strings")
    where = f"cell {obj['cell_id']!r}"
    if not isinstance(obj["capacity_coulombs"], (int, float)) or isinstance(
        obj["capacity_coulombs"], bool
    ):
        raise SchemaError(f"{where}: capacity_coulombs must be a number")
    if not isinstance(obj["n_rc"], int) or isinstance(obj["n_rc"], bool):
        raise SchemaError(f"{where}: n_rc must be an integer")
    try:
        return CellParameters(
            capacity_q=float(obj["capacity_coulombs"]),
            n_rc=obj["n_rc"],
            tau_maps=tuple(
                ParameterMap(c, "seconds") for c in _nested_coeffs(obj, "tau_coeffs", where)
            ),
            c_maps=tuple(
                ParameterMap(c, "farads") for c in _nested_coeffs(obj, "c_coeffs", where)
            ),
            r_map=ParameterMap(_coeff_list(obj, "r_coeffs", where), "ohms"),
            ocv_map=ParameterMap(_coeff_list(obj, "ocv_coeffs", where), "volts"),
            cell_id=obj["cell_id"],
            batch_id=obj["batch_id"],
        )
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_population(path) -> list[CellParameters]:
    """Read, schema-check, and physically validate a population file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaError(f"{path}: population file must be a JSON array")
    cells = [_cell_from_obj(obj, i) for i, obj in enumerate(data)]
    for cell in cells:
        report = validate_cell(cell)
        if not report.ok:
            raise ValidationError(
                f"cell {cell.cell_id!r}: " + "; ".join(report.violations)
            )
    return cells
