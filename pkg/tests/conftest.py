"""Shared fixtures: hand-built scenario cells and randomized cell factories."""

import numpy as np
import pytest

from cellcond import CellParameters, ParameterMap


def _as_map(value, unit):
    coeffs = tuple(value) if isinstance(value, (tuple, list)) else (float(value),)
    return ParameterMap(coeffs, unit)


def build_cell(
    capacity=4320.0,
    taus=(10.0,),
    cs=None,
    r=0.0,
    ocv=(3.0, 0.5),
    cell_id="cell",
    batch_id="",
):
    """Quick cell constructor; tau/c entries may be scalars or coefficient tuples."""
    tau_maps = tuple(_as_map(t, "seconds") for t in taus)
    if cs is None:
        cs = (5000.0,) * len(tau_maps)
    return CellParameters(
        capacity_q=capacity,
        n_rc=len(tau_maps),
        tau_maps=tau_maps,
        c_maps=tuple(_as_map(c, "farads") for c in cs),
        r_map=_as_map(r, "ohms"),
        ocv_map=_as_map(ocv, "volts"),
        cell_id=cell_id,
        batch_id=batch_id,
    )


def random_positive_cell(rng, n_rc=None):
    """Random cell with degree <= 3 tau maps guaranteed positive on [0, 1]."""
    if n_rc is None:
        n_rc = int(rng.integers(1, 4))
    taus = []
    for _ in range(n_rc):
        c0 = rng.uniform(1.0, 300.0)
        degree = int(rng.integers(0, 4))
        rest = rng.uniform(-c0 / 4.0, c0 / 4.0, size=degree)
        taus.append((c0, *rest))
    return build_cell(
        capacity=rng.uniform(500.0, 10000.0),
        taus=tuple(taus),
        cs=tuple((rng.uniform(1000.0, 8000.0),) for _ in range(n_rc)),
        r=rng.uniform(0.0, 0.02),
        cell_id="rand",
    )


_TAU_BANDS = ((6.0, 20.0), (30.0, 80.0), (150.0, 300.0))


def _banded_map(rng, lo, hi):
    # cubic confined to [lo, hi] over the whole SOC range: the SOC-dependent
    # part is bounded by the distance from the midpoint to the band edges
    mid = rng.uniform(lo + 0.15 * (hi - lo), hi - 0.15 * (hi - lo))
    span = min(mid - lo, hi - mid)
    c1, c2, c3 = rng.uniform(-span / 3.0, span / 3.0, size=3)
    return (mid, c1, c2, c3)


def random_banded_cell(rng, cell_id="banded"):
    """Three RC pairs with time constants confined to well-separated bands.

    Separated bands keep the rest-point matrix comfortably full rank across
    the grid, which the sensitivity properties need; overlapping time
    constants make conditioning blow up and its differences meaningless.
    """
    return build_cell(
        capacity=rng.uniform(2000.0, 6000.0),
        taus=tuple(_banded_map(rng, lo, hi) for lo, hi in _TAU_BANDS),
        cs=((5000.0,),) * 3,
        r=0.0,
        cell_id=cell_id,
    )


def distinct_constant_taus(rng, n, lo=5.0, hi=300.0, min_ratio=1.1):
    """Pairwise well-separated constant time constants, log-uniform."""
    while True:
        taus = np.sort(np.exp(rng.uniform(np.log(lo), np.log(hi), size=n)))
        if np.all(taus[1:] / taus[:-1] >= min_ratio):
            return tuple(float(t) for t in taus)


@pytest.fixture
def cell_a():
    return build_cell(taus=(10.0,), cell_id="cell-a")


@pytest.fixture
def cell_b():
    return build_cell(taus=(200.0,), cell_id="cell-b")


@pytest.fixture
def make_cell():
    return build_cell
