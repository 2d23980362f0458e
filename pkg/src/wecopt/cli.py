"""Command-line interface.

Subcommands:

* optimize  -- run a method on a scenario for several seeds; writes
               results.csv, trace_<run>.csv and layout_<run>.csv.
* landscape -- build and dump a two-buoy power landscape (coarse or fine).
* field     -- probe-buoy energy field around a saved layout.
* compare   -- one-tailed rank-sum test between two results directories.

Exit codes: 0 success, 2 configuration error, 3 budget or feasibility failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .climate import load_scenario
from .errors import (BudgetExhaustedError, ConfigurationError,
                     PlacementInfeasibleError, ScenarioFormatError)
from .fitness import FarmArea
from .harness import (METHODS, ExperimentConfig, build_method_landscape,
                      export_energy_field, method_spec, read_results,
                      run_experiment, summarize, wilcoxon_one_tailed,
                      write_field, write_results, write_run_files)
from .hydro import WecParameters
from .landscape import (COARSE_ANGULAR_RES, COARSE_RADIAL_RES, FINE_ANGULAR_RES,
                        FINE_RADIAL_RES, build_two_buoy_landscape, save_landscape)

DEFAULT_BUDGETS = {16: 600, 4: 2400}


def _default_budget(n_buoys: int, budget: int | None) -> int:
    if budget is not None:
        return budget
    if n_buoys in DEFAULT_BUDGETS:
        return DEFAULT_BUDGETS[n_buoys]
    raise ConfigurationError(
        f"--budget is required for {n_buoys} buoys (defaults exist only for N in {sorted(DEFAULT_BUDGETS)})")


def _cmd_optimize(args) -> int:
    config = ExperimentConfig(scenario=args.scenario, method=args.method,
                              n_buoys=args.buoys,
                              budget=_default_budget(args.buoys, args.budget),
                              n_runs=args.runs, root_seed=args.seed,
                              workers=args.workers)
    records = run_experiment(config)
    out = Path(args.out)
    write_results(records, out)
    write_run_files(records, out)

    parsed = read_results(out / "results.csv")
    stats = summarize(parsed["penalized_w"])
    print(f"method={config.method} scenario={config.scenario} buoys={config.n_buoys} "
          f"budget={config.budget} runs={config.n_runs}")
    print(f"max={stats.max:.6g} median={stats.median:.6g} "
          f"mean={stats.mean:.6g} std={stats.std:.6g}")
    surrogate = records[0].surrogate_evals if records else 0
    print(f"surrogate evaluations per run (shared build): {surrogate}")
    print(f"results written to {out}")
    if not all(r.complete for r in records):
        print("warning: at least one run exhausted its budget before placing all buoys",
              file=sys.stderr)
        return 3
    return 0


def _cmd_landscape(args) -> int:
    scenario = load_scenario(args.scenario)
    params = WecParameters()
    if args.mode == "coarse":
        landscape = build_two_buoy_landscape(params, scenario,
                                             COARSE_ANGULAR_RES, COARSE_RADIAL_RES)
    else:
        landscape = build_two_buoy_landscape(params, scenario,
                                             FINE_ANGULAR_RES, FINE_RADIAL_RES)
    save_landscape(landscape, args.out)
    print(f"{landscape.angles_deg.size} x {landscape.distances_m.size} table "
          f"({landscape.evaluations} two-buoy evaluations) written to {args.out}")
    return 0


def _read_layout_positions(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    rows = [line.split(",") for line in lines[1:]] if lines else []
    if not rows:
        return np.empty((0, 2))
    return np.array([[float(r[1]), float(r[2])] for r in rows])


def _cmd_field(args) -> int:
    scenario = load_scenario(args.scenario)
    params = WecParameters()
    positions = _read_layout_positions(args.layout)
    n = max(positions.shape[0], 1)
    farm = FarmArea.square(args.buoys or n)
    grid = export_energy_field(positions, params, scenario, args.step, farm,
                               margin=args.margin)
    write_field(grid, args.out)
    print(f"{grid.x.size} nodes ({grid.evaluations} probe evaluations) written to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    a = read_results(Path(args.a) / "results.csv")
    b = read_results(Path(args.b) / "results.csv")
    pa, pb = a["penalized_w"], b["penalized_w"]
    p = wilcoxon_one_tailed(pa, pb)
    stats_a, stats_b = summarize(pa), summarize(pb)
    print(f"A: {args.a}  median={stats_a.median:.6g} mean={stats_a.mean:.6g} n={stats_a.count}")
    print(f"B: {args.b}  median={stats_b.median:.6g} mean={stats_b.mean:.6g} n={stats_b.count}")
    print(f"one-tailed rank-sum p (A > B): {p:.6g}")
    verdict = "significant" if p < args.alpha else "not significant"
    print(f"at alpha = {args.alpha}: {verdict}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wecopt",
                                     description="Wave-energy converter array layout tools")
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="run a placement method over several seeds")
    opt.add_argument("--scenario", required=True,
                     help="builtin scenario name or path to a scenario file")
    opt.add_argument("--method", required=True,
                     help="one of: " + ", ".join(sorted(METHODS)))
    opt.add_argument("--buoys", type=int, required=True)
    opt.add_argument("--budget", type=int, default=None,
                     help="full-layout evaluations per run (default 600 for 16, 2400 for 4)")
    opt.add_argument("--runs", type=int, default=10)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--out", required=True)
    opt.add_argument("--workers", type=int, default=1)
    opt.set_defaults(func=_cmd_optimize)

    land = sub.add_parser("landscape", help="dump a two-buoy power landscape")
    land.add_argument("--scenario", required=True)
    land.add_argument("--mode", choices=("coarse", "fine"), default="coarse")
    land.add_argument("--out", required=True)
    land.set_defaults(func=_cmd_landscape)

    fld = sub.add_parser("field", help="probe-buoy energy field for a layout file")
    fld.add_argument("--layout", required=True, help="layout_<run>.csv file")
    fld.add_argument("--scenario", required=True)
    fld.add_argument("--step", type=float, default=25.0)
    fld.add_argument("--margin", type=float, default=100.0)
    fld.add_argument("--buoys", type=int, default=None,
                     help="farm sizing; defaults to the layout's buoy count")
    fld.add_argument("--out", required=True)
    fld.set_defaults(func=_cmd_field)

    cmp_ = sub.add_parser("compare", help="rank-sum test between two results directories")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--alpha", type=float, default=0.025)
    cmp_.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ScenarioFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetExhaustedError, PlacementInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
