"""Sensitivity targets, end-of-life scaling, second-life variation, statistics."""

import numpy as np
import pytest

from cellcond import (
    AGED_SUFFIX,
    AgingSpec,
    ConditionProfile,
    CountExceedsPopulation,
    MixedGrids,
    apply_eol,
    batch_statistics,
    canonical_target,
    condition_number,
    equilibrium_ctrb,
    kappa_profile,
    normalized_sensitivity,
    randomize_second_life,
)
from conftest import build_cell, random_banded_cell


class TestCanonicalTarget:
    def test_capacity(self, cell_a):
        assert canonical_target(cell_a, "capacity") == "capacity"

    def test_tau_by_index_or_name(self, make_cell):
        cell = make_cell(taus=(10.0, 50.0, 200.0))
        assert canonical_target(cell, 0) == "tau0"
        assert canonical_target(cell, "tau2") == "tau2"

    def test_rejects_maps_outside_the_matrix(self, cell_a):
        for bad in ("c0", "ocv", "r", "resistance"):
            with pytest.raises(ValueError):
                canonical_target(cell_a, bad)

    def test_rejects_out_of_range_index(self, cell_a):
        with pytest.raises(ValueError):
            canonical_target(cell_a, 1)
        with pytest.raises(ValueError):
            canonical_target(cell_a, -1)


class TestNormalizedSensitivity:
    def test_two_state_sensitivities_approach_kappa(self, cell_a):
        # with Q and tau both large, kappa ~ Q tau, so scaling either by
        # (1 + s) scales kappa by about (1 + s): S ~ kappa for both targets
        grid = np.array([0.5])
        kappa = condition_number(equilibrium_ctrb(cell_a, 0.5))
        s_q = normalized_sensitivity(cell_a, "capacity", grid).s_theta[0]
        s_tau = normalized_sensitivity(cell_a, "tau0", grid).s_theta[0]
        assert s_q == pytest.approx(kappa, rel=0.05)
        assert s_tau == pytest.approx(kappa, rel=0.05)
        assert s_q == pytest.approx(s_tau, rel=0.05)

    def test_forward_against_central_difference_oracle(self, cell_a):
        grid = np.array([0.3])
        forward = normalized_sensitivity(cell_a, "capacity", grid, rel_step=1e-4)

        def kappa_scaled(factor):
            scaled = build_cell(capacity=4320.0 * factor, taus=(10.0,))
            return kappa_profile(scaled, grid).kappa[0]

        central = (kappa_scaled(1 + 1e-4) - kappa_scaled(1 - 1e-4)) / (2e-4)
        assert forward.s_theta[0] == pytest.approx(central, rel=2e-4)

    def test_small_step_forward_central_agreement(self, cell_a):
        grid = np.array([0.5])
        fwd = normalized_sensitivity(cell_a, "tau0", grid, rel_step=1e-6).s_theta[0]

        def kappa_scaled(factor):
            scaled = build_cell(taus=(10.0 * factor,))
            return kappa_profile(scaled, grid).kappa[0]

        central = (kappa_scaled(1 + 1e-6) - kappa_scaled(1 - 1e-6)) / 2e-6
        assert fwd == pytest.approx(central, rel=1e-3)

    def test_record_carries_grid_and_target(self, cell_a):
        grid = np.array([0.2, 0.8])
        rec = normalized_sensitivity(cell_a, "capacity", grid)
        assert np.array_equal(rec.soc_grid, grid)
        assert rec.target == "capacity"
        assert rec.cell_id == "cell-a"
        assert np.all(np.isfinite(rec.s_theta))

    def test_rejects_nonpositive_step(self, cell_a):
        with pytest.raises(ValueError):
            normalized_sensitivity(cell_a, "capacity", np.array([0.5]), rel_step=0.0)

    def test_rejects_voltage_stack_targets(self, cell_a):
        with pytest.raises(ValueError):
            normalized_sensitivity(cell_a, "ocv", np.array([0.5]))


class TestAgingSpec:
    def test_defaults_are_nominal_eol(self):
        spec = AgingSpec()
        assert spec.q_factor == 0.8
        assert spec.tau_factor == 3.0
        assert spec.q_jitter == spec.tau_jitter == 0.0

    def test_rejects_nonpositive_factors(self):
        with pytest.raises(ValueError):
            AgingSpec(q_factor=0.0)

    def test_rejects_jitter_at_least_factor(self):
        with pytest.raises(ValueError):
            AgingSpec(q_jitter=0.8)
        with pytest.raises(ValueError):
            AgingSpec(tau_jitter=-0.1)


class TestApplyEol:
    def test_nominal_factors(self, cell_a):
        aged = apply_eol(cell_a, AgingSpec())
        assert aged.capacity_q == pytest.approx(3456.0, rel=1e-15)
        assert aged.tau_maps[0].coefficients == (30.0,)
        assert aged.c_maps == cell_a.c_maps
        assert aged.r_map == cell_a.r_map
        assert aged.ocv_map == cell_a.ocv_map
        assert aged.cell_id.endswith(AGED_SUFFIX)

    def test_identity_factors_keep_values(self, cell_a):
        aged = apply_eol(cell_a, AgingSpec(q_factor=1.0, tau_factor=1.0))
        assert aged.capacity_q == cell_a.capacity_q
        assert aged.tau_maps == cell_a.tau_maps

    def test_rejects_jittered_spec(self, cell_a):
        with pytest.raises(ValueError):
            apply_eol(cell_a, AgingSpec(q_jitter=0.05))

    def test_composition_of_factors(self, make_cell):
        cell = make_cell(taus=((11.0, 3.0), (70.0,)), capacity=4100.0)
        f = AgingSpec(q_factor=0.5, tau_factor=2.0)
        g = AgingSpec(q_factor=0.25, tau_factor=4.0)
        fg = AgingSpec(q_factor=0.125, tau_factor=8.0)
        twice = apply_eol(apply_eol(cell, f), g)
        once = apply_eol(cell, fg)
        assert twice.capacity_q == once.capacity_q
        for a, b in zip(twice.tau_maps, once.tau_maps):
            assert a.coefficients == b.coefficients

    def test_composition_general_factors(self, make_cell):
        cell = make_cell(taus=((11.0, 3.0),), capacity=4100.0)
        twice = apply_eol(
            apply_eol(cell, AgingSpec(0.8, 3.0)), AgingSpec(0.9, 1.5)
        )
        once = apply_eol(cell, AgingSpec(0.8 * 0.9, 3.0 * 1.5))
        assert twice.capacity_q == pytest.approx(once.capacity_q, rel=1e-15)
        for a, b in zip(twice.tau_maps, once.tau_maps):
            assert np.allclose(a.coefficients, b.coefficients, rtol=1e-15)

    def test_kappa_scales_roughly_with_both_factors(self, cell_a):
        # kappa ~ Q tau here, so (0.8, 3) should multiply it by about 2.4
        before = condition_number(equilibrium_ctrb(cell_a, 0.5))
        aged = apply_eol(cell_a, AgingSpec())
        after = condition_number(equilibrium_ctrb(aged, 0.5))
        assert after == pytest.approx(2.4 * before, rel=0.05)


class TestRandomizeSecondLife:
    def test_exact_count_aged(self):
        rng = np.random.default_rng(0)
        cells = [random_banded_cell(rng, f"c{i}") for i in range(66)]
        out = randomize_second_life(cells, 32, AgingSpec(q_jitter=0.05, tau_jitter=0.3))
        aged = [c for c in out if c.cell_id.endswith(AGED_SUFFIX)]
        assert len(aged) == 32
        assert len(out) == 66

    def test_zero_jitter_gives_nominal_factors(self):
        rng = np.random.default_rng(1)
        cells = [random_banded_cell(rng, f"c{i}") for i in range(6)]
        out = randomize_second_life(cells, 3, AgingSpec())
        for before, after in zip(cells, out):
            if after.cell_id.endswith(AGED_SUFFIX):
                assert after.capacity_q == before.capacity_q * 0.8
                for ma, mb in zip(after.tau_maps, before.tau_maps):
                    assert ma.coefficients == tuple(
                        c * 3.0 for c in mb.coefficients
                    )

    def test_same_seed_reproduces(self):
        rng = np.random.default_rng(2)
        cells = [random_banded_cell(rng, f"c{i}") for i in range(10)]
        spec = AgingSpec(q_jitter=0.05, tau_jitter=0.3, seed=123)
        assert randomize_second_life(cells, 4, spec) == randomize_second_life(
            cells, 4, spec
        )

    def test_seed_changes_selection(self):
        rng = np.random.default_rng(3)
        cells = [random_banded_cell(rng, f"c{i}") for i in range(20)]
        spec = AgingSpec(q_jitter=0.05, tau_jitter=0.3)
        picks = set()
        for seed in range(100):
            out = randomize_second_life(cells, 5, spec, seed=seed)
            picks.add(
                tuple(
                    i
                    for i, c in enumerate(out)
                    if c.cell_id.endswith(AGED_SUFFIX)
                )
            )
        assert len(picks) > 1

    def test_unaged_cells_pass_through_untouched(self):
        rng = np.random.default_rng(4)
        cells = [random_banded_cell(rng, f"c{i}") for i in range(8)]
        out = randomize_second_life(cells, 3, AgingSpec())
        for before, after in zip(cells, out):
            if not after.cell_id.endswith(AGED_SUFFIX):
                assert after is before

    def test_count_exceeding_population(self, cell_a):
        with pytest.raises(CountExceedsPopulation):
            randomize_second_life([cell_a], 2, AgingSpec())


def _profile(cell_id, kappa, grid=None):
    grid = np.array([0.25, 0.75]) if grid is None else grid
    return ConditionProfile(
        soc_grid=grid, kappa=np.asarray(kappa, dtype=float), cell_id=cell_id
    )


class TestBatchStatistics:
    def test_single_profile_zero_std(self):
        stats = batch_statistics([_profile("c0", [10.0, 100.0])], {"c0": "b1"})
        assert len(stats) == 1
        assert np.all(stats[0].std_log10_kappa == 0.0)
        assert np.allclose(stats[0].mean_log10_kappa, [1.0, 2.0])

    def test_hand_arithmetic(self):
        profiles = [_profile("c0", [1e2, 1e2]), _profile("c1", [1e4, 1e4])]
        stats = batch_statistics(profiles, {"c0": "b1", "c1": "b1"})
        assert np.allclose(stats[0].mean_log10_kappa, 3.0)
        assert np.allclose(stats[0].std_log10_kappa, 1.0)
        # the other aggregation order: log of the mean, not mean of the log
        assert np.allclose(stats[0].log10_mean_kappa, np.log10(5050.0))

    def test_batches_sorted_and_separate(self):
        profiles = [
            _profile("c0", [10.0, 10.0]),
            _profile("c1", [1000.0, 1000.0]),
        ]
        stats = batch_statistics(profiles, {"c0": "b2", "c1": "b1"})
        assert [s.batch_id for s in stats] == ["b1", "b2"]
        assert np.allclose(stats[0].mean_log10_kappa, 3.0)
        assert np.allclose(stats[1].mean_log10_kappa, 1.0)

    def test_mixed_grids_rejected(self):
        profiles = [
            _profile("c0", [10.0, 10.0]),
            _profile("c1", [10.0, 10.0], grid=np.array([0.2, 0.8])),
        ]
        with pytest.raises(MixedGrids):
            batch_statistics(profiles, {"c0": "b1", "c1": "b1"})

    def test_missing_batch_assignment(self):
        with pytest.raises(ValueError):
            batch_statistics([_profile("c0", [10.0, 10.0])], {})

    def test_empty_input(self):
        assert batch_statistics([], {}) == []

    def test_aged_mean_above_fresh_mean(self):
        rng = np.random.default_rng(5)
        grid = np.linspace(0.1, 0.9, 9)
        cells = [random_banded_cell(rng, f"c{i}") for i in range(6)]
        fresh = [kappa_profile(c, grid) for c in cells]
        aged = [kappa_profile(apply_eol(c, AgingSpec()), grid) for c in cells]
        batch_of = {
            p.cell_id: ("aged" if p.cell_id.endswith(AGED_SUFFIX) else "fresh")
            for p in fresh + aged
        }
        stats = batch_statistics(fresh + aged, batch_of)
        by_id = {s.batch_id: s for s in stats}
        assert np.all(
            by_id["aged"].mean_log10_kappa > by_id["fresh"].mean_log10_kappa
        )
