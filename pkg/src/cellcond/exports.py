"""CSV emission for every analysis product.

All numeric fields print with 17 significant digits so emitted files diff
cleanly across runs and round-trip float-exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write(path, header, rows) -> None:
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_profiles_csv(profiles, path) -> None:
    rows = (
        (p.cell_id, _fmt(soc), _fmt(k), _fmt(lk))
        for p in profiles
        for soc, k, lk in zip(p.soc_grid, p.kappa, p.log10_kappa)
    )
    _write(path, ("cell_id", "soc", "kappa", "log10_kappa"), rows)


def write_batch_stats_csv(stats, path) -> None:
    rows = (
        (s.batch_id, _fmt(soc), _fmt(m), _fmt(sd), _fmt(lm))
        for s in stats
        for soc, m, sd, lm in zip(
            s.soc_grid, s.mean_log10_kappa, s.std_log10_kappa, s.log10_mean_kappa
        )
    )
    _write(
        path,
        ("batch_id", "soc", "mean_log10_kappa", "std_log10_kappa", "log10_mean_kappa"),
        rows,
    )


def write_sensitivity_csv(records, path) -> None:
    rows = (
        (r.cell_id, r.target, _fmt(soc), _fmt(s))
        for r in records
        for soc, s in zip(r.soc_grid, r.s_theta)
    )
    _write(path, ("cell_id", "target", "soc", "s_theta"), rows)


def write_trajectory_csv(results, path) -> None:
    rows = (
        (r.cell_id, _fmt(t), _fmt(i), _fmt(soc), _fmt(v))
        for r in results
        for t, i, soc, v in r.trajectory
    )
    _write(path, ("cell_id", "t_s", "current_a", "soc", "v_v"), rows)


def write_summary_csv(results, path) -> None:
    rows = (
        (r.cell_id, _fmt(r.t_cv_start), _fmt(r.t_complete), r.terminated_by)
        for r in results
    )
    _write(path, ("cell_id", "t_cv_start_s", "t_complete_s", "terminated_by"), rows)


def write_scatter_csv(scatter_rows, path) -> None:
    rows = (
        (str(design_id), _fmt(max_kappa), _fmt(min_q), str(cap_flag), str(kappa_flag))
        for design_id, max_kappa, min_q, cap_flag, kappa_flag in scatter_rows
    )
    _write(
        path,
        (
            "design_id",
            "max_kappa_avg",
            "min_q_avg_ah",
            "best_capacity_flag",
            "best_kappa_flag",
        ),
        rows,
    )


def write_table_csv(designs, path) -> None:
    rows = (
        (
            str(d.design_id),
            _fmt(d.q1_avg),
            _fmt(d.q2_avg),
            _fmt(d.min_q_avg),
            _fmt(d.kappa1_avg),
            _fmt(d.kappa2_avg),
            _fmt(d.max_kappa_avg),
        )
        for d in designs
    )
    _write(
        path,
        (
            "design_id",
            "q1_avg_ah",
            "q2_avg_ah",
            "min_q_avg_ah",
            "kappa1_avg",
            "kappa2_avg",
            "max_kappa_avg",
        ),
        rows,
    )
