"""Command-line driver.

One binary, subcommands per analysis, configuration entirely via flags so a
command line fully determines its outputs.  Exit codes: 0 success, 1 data
error (bad file, invalid cell, impossible request), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .aging import AgingSpec, apply_eol, batch_statistics, normalized_sensitivity, randomize_second_life
from .cccv import CccvProtocol, run_cccv
from .ctrb import condition_number, equilibrium_ctrb, kappa_profile
from .errors import CellcondError
from .exports import (
    write_batch_stats_csv,
    write_profiles_csv,
    write_scatter_csv,
    write_sensitivity_csv,
    write_summary_csv,
    write_table_csv,
    write_trajectory_csv,
)
from .model import CellParameters, ParameterMap, equilibrium_state
from .packs import evaluate_designs, export_scatter, generate_partitions, select_best
from .population import (
    BATCH_TAU_NOMINALS,
    PopulationSpec,
    generate_population,
    load_population,
    save_population,
)


def _n_rc_flag(text: str) -> int:
    value = int(text)
    if not 1 <= value <= len(BATCH_TAU_NOMINALS[0]):
        raise argparse.ArgumentTypeError(
            f"--n-rc must be between 1 and {len(BATCH_TAU_NOMINALS[0])} "
            "(the built-in nominal maps)"
        )
    return value


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid-min", type=float, default=0.05)
    parser.add_argument("--grid-max", type=float, default=0.95)
    parser.add_argument("--grid-step", type=float, default=0.01)


def _grid(args) -> np.ndarray:
    lo, hi, step = args.grid_min, args.grid_max, args.grid_step
    if not (0.0 <= lo <= hi <= 1.0) or step <= 0.0:
        raise CellcondError(
            f"bad SOC grid: min {lo:g}, max {hi:g}, step {step:g}"
        )
    n = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, n)


def _add_protocol_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--i-cc", type=float, default=1.0)
    parser.add_argument("--v-limit", type=float, default=3.5)
    parser.add_argument("--i-cutoff", type=float, default=0.01)
    parser.add_argument("--dt", type=float, default=0.1)
    parser.add_argument("--t-max", type=float, default=36000.0)


def _cmd_gen_population(args) -> int:
    spec = PopulationSpec(
        batch_sizes=(args.n_per_batch, args.n_per_batch),
        capacity_nominal_c=args.capacity_c,
        n_rc=args.n_rc,
        tau_nominals=tuple(batch[: args.n_rc] for batch in BATCH_TAU_NOMINALS),
        cov=args.cov,
        seed=args.seed,
    )
    cells = generate_population(spec)
    save_population(cells, args.out)
    print(f"wrote {len(cells)} cells to {args.out}")
    return 0


def _cmd_analyze_kappa(args) -> int:
    cells = load_population(args.population)
    grid = _grid(args)
    profiles = [kappa_profile(c, grid) for c in cells]
    stats = batch_statistics(profiles, {c.cell_id: c.batch_id for c in cells})
    write_profiles_csv(profiles, args.out_profiles)
    write_batch_stats_csv(stats, args.out_stats)
    print(
        f"wrote {len(profiles)} profiles to {args.out_profiles} and "
        f"{len(stats)} batch curves to {args.out_stats}"
    )
    return 0


def _cmd_sensitivity(args) -> int:
    cells = load_population(args.population)
    grid = _grid(args)
    if args.eol:
        spec = AgingSpec(q_factor=args.eol_q_factor, tau_factor=args.eol_tau_factor)
        cells = [apply_eol(c, spec) for c in cells]
    records = []
    for cell in cells:
        targets = args.target or ["capacity"] + [f"tau{i}" for i in range(cell.n_rc)]
        records.extend(
            normalized_sensitivity(cell, t, grid, rel_step=args.rel_step)
            for t in targets
        )
    write_sensitivity_csv(records, args.out)
    print(f"wrote {len(records)} sensitivity records to {args.out}")
    return 0


def _cmd_age(args) -> int:
    cells = load_population(args.population)
    spec = AgingSpec(
        q_factor=args.eol_q_factor,
        tau_factor=args.eol_tau_factor,
        q_jitter=args.jitter_q,
        tau_jitter=args.jitter_tau,
        seed=args.seed,
    )
    aged = randomize_second_life(cells, args.aged_count, spec)
    save_population(aged, args.out)
    print(f"aged {args.aged_count} of {len(cells)} cells, wrote {args.out}")
    return 0


def _cmd_simulate_cccv(args) -> int:
    cells = load_population(args.population)
    protocol = CccvProtocol(
        i_cc=args.i_cc,
        v_limit=args.v_limit,
        i_cutoff=args.i_cutoff,
        dt=args.dt,
        t_max=args.t_max,
    )
    initial = [equilibrium_state(c, args.soc0) for c in cells]
    results = run_cccv(cells, protocol, initial)
    write_trajectory_csv(results, args.out_traj)
    write_summary_csv(results, args.out_summary)
    done = sum(1 for r in results if r.terminated_by == "completed")
    print(f"{done}/{len(results)} cells completed; wrote {args.out_summary}")
    return 0


def _rank_correlation(a: np.ndarray, b: np.ndarray) -> float:
    ranks_a = np.argsort(np.argsort(a)).astype(float)
    ranks_b = np.argsort(np.argsort(b)).astype(float)
    return float(np.corrcoef(ranks_a, ranks_b)[0, 1])


def _cmd_design_packs(args) -> int:
    cells = load_population(args.population)
    grid = _grid(args)
    partitions = generate_partitions(
        len(cells), len(cells) // 2, args.n_designs, args.seed
    )
    designs = evaluate_designs(cells, partitions, grid)
    write_table_csv(designs, args.out_table)
    write_scatter_csv(export_scatter(designs), args.out_scatter)
    best = select_best(designs)
    print(
        f"best by capacity: design {best.by_capacity} "
        f"(min_q_avg = {designs[best.by_capacity].min_q_avg:.4g} Ah); "
        f"best by conditioning: design {best.by_kappa} "
        f"(max_kappa_avg = {designs[best.by_kappa].max_kappa_avg:.4g})"
    )
    if len(designs) > 1:
        corr = _rank_correlation(
            np.array([d.min_q_avg for d in designs]),
            -np.array([d.max_kappa_avg for d in designs]),
        )
        print(f"rank correlation, capacity objective vs conditioning objective: {corr:+.3f}")
    return 0


def _demo_cell(tau_s: float, label: str) -> CellParameters:
    return CellParameters(
        capacity_q=4320.0,
        n_rc=1,
        tau_maps=(ParameterMap((tau_s,), "seconds"),),
        c_maps=(ParameterMap((5000.0,), "farads"),),
        r_map=ParameterMap((0.0,), "ohms"),
        ocv_map=ParameterMap((3.0, 0.5), "volts"),
        cell_id=label,
    )


def _cmd_demo(args) -> int:
    cells = [_demo_cell(10.0, "cell-a"), _demo_cell(200.0, "cell-b")]
    protocol = CccvProtocol(
        i_cc=args.i_cc,
        v_limit=args.v_limit,
        i_cutoff=args.i_cutoff,
        dt=args.dt,
        t_max=args.t_max,
    )
    results = run_cccv(cells, protocol, [equilibrium_state(c, 0.0) for c in cells])
    for cell, res in zip(cells, results):
        kappa = condition_number(equilibrium_ctrb(cell, 0.5).entries)
        print(
            f"{cell.cell_id}: kappa = {kappa:.3e}, "
            f"t_cv_start = {res.t_cv_start:.1f} s, "
            f"t_complete = {res.t_complete:.1f} s ({res.terminated_by})"
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellcond",
        description="Conditioning analysis of battery cells and pack designs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-population", help="write a synthetic population JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--n-per-batch", type=int, default=33)
    p.add_argument("--capacity-c", type=float, default=3960.0)
    p.add_argument("--n-rc", type=_n_rc_flag, default=3)
    p.add_argument("--cov", type=float, default=0.03)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen_population)

    p = sub.add_parser(
        "analyze-kappa", help="conditioning profiles and batch statistics"
    )
    p.add_argument("--population", required=True)
    _add_grid_flags(p)
    p.add_argument("--out-profiles", required=True)
    p.add_argument("--out-stats", required=True)
    p.set_defaults(func=_cmd_analyze_kappa)

    p = sub.add_parser("sensitivity", help="normalized conditioning sensitivity")
    p.add_argument("--population", required=True)
    p.add_argument(
        "--target",
        action="append",
        help="'capacity' or tau<i>; repeatable; default: all valid targets",
    )
    p.add_argument("--rel-step", type=float, default=0.01)
    p.add_argument("--eol", action="store_true", help="rescale cells to end of life first")
    p.add_argument("--eol-q-factor", type=float, default=0.8)
    p.add_argument("--eol-tau-factor", type=float, default=3.0)
    _add_grid_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("age", help="age a seeded random subset of a population")
    p.add_argument("--population", required=True)
    p.add_argument("--eol-q-factor", type=float, default=0.8)
    p.add_argument("--eol-tau-factor", type=float, default=3.0)
    p.add_argument("--jitter-q", type=float, default=0.05)
    p.add_argument("--jitter-tau", type=float, default=0.3)
    p.add_argument("--aged-count", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_age)

    p = sub.add_parser("simulate-cccv", help="charge every cell, export trajectories")
    p.add_argument("--population", required=True)
    _add_protocol_flags(p)
    p.add_argument("--soc0", type=float, default=0.0)
    p.add_argument("--out-traj", required=True)
    p.add_argument("--out-summary", required=True)
    p.set_defaults(func=_cmd_simulate_cccv)

    p = sub.add_parser("design-packs", help="randomized two-pack design search")
    p.add_argument("--population", required=True)
    p.add_argument("--n-designs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    _add_grid_flags(p)
    p.add_argument("--out-table", required=True)
    p.add_argument("--out-scatter", required=True)
    p.set_defaults(func=_cmd_design_packs)

    p = sub.add_parser(
        "demo",
        help="built-in two-cell study: conditioning versus charge effort",
    )
    _add_protocol_flags(p)
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CellcondError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
