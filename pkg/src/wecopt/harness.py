"""Experiment driver, statistics and file outputs.

An experiment runs one method n_runs times with seeds root_seed + run_index,
each run against a fresh evaluation budget.  Runs are independent; with
several workers they execute in separate processes and are collected in run
order, so outputs are byte-identical regardless of the worker count.
Surrogate landscapes are built once per experiment and shared.
"""

from __future__ import annotations

import itertools
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import MutationSchedule, run_de, run_one_plus_one_ea, run_random_search
from .climate import WaveScenario, annual_power_breakdown, isolated_annual_power, load_scenario
from .errors import BudgetExhaustedError, ConfigurationError
from .fitness import (DEFAULT_MIN_SEPARATION, EvaluationBudget, FarmArea,
                      FitnessReport, LayoutEvaluator)
from .heuristics import HeuristicConfig, run_isls, run_isls2, run_sls
from .hydro import WecParameters
from .landscape import (COARSE_ANGULAR_RES, COARSE_RADIAL_RES, FINE_ANGULAR_RES,
                        FINE_RADIAL_RES, SurrogateLandscape, build_two_buoy_landscape)

RESULTS_HEADER = "run_id,seed,final_power_w,violation_m,penalized_w,q_factor,evals_used"


# -- method registry -----------------------------------------------------------

@dataclass(frozen=True)
class MethodSpec:
    name: str
    kind: str                   # "baseline" or "heuristic"
    landscape: str | None       # None, "coarse" or "fine"
    description: str


def _registry() -> dict[str, MethodSpec]:
    specs = [
        MethodSpec("random-search", "baseline", None, "uniform random layouts"),
        MethodSpec("1+1ea-sigma3", "baseline", None, "1+1 EA, Gaussian sigma = 3 m"),
        MethodSpec("1+1ea-sigma10", "baseline", None, "1+1 EA, Gaussian sigma = 10 m"),
        MethodSpec("1+1ea-sigma30", "baseline", None, "1+1 EA, Gaussian sigma = 30 m"),
        MethodSpec("1+1ea-uniform", "baseline", None, "1+1 EA, uniform steps in [-30, 30] m"),
        MethodSpec("1+1ea-linear", "baseline", None, "1+1 EA, sigma decaying 30 m to 1 m"),
        MethodSpec("1+1ea-onefifth", "baseline", None, "1+1 EA, 1/5 success rule"),
        MethodSpec("de-cr03", "baseline", None, "DE/rand/1/bin, mu=50, F=0.5, Cr=0.3"),
        MethodSpec("de-cr05", "baseline", None, "DE/rand/1/bin, mu=50, F=0.5, Cr=0.5"),
        MethodSpec("de-cr07", "baseline", None, "DE/rand/1/bin, mu=50, F=0.5, Cr=0.7"),
        MethodSpec("de-cr09", "baseline", None, "DE/rand/1/bin, mu=50, F=0.5, Cr=0.9"),
        MethodSpec("sls", "heuristic", "coarse", "smart local search, 15 samples per buoy"),
        MethodSpec("sls-nm", "heuristic", "coarse", "sls with 3 samples + Nelder-Mead"),
        MethodSpec("isls", "heuristic", "fine", "two-phase smart local search"),
        MethodSpec("isls-nm", "heuristic", "fine", "isls with Nelder-Mead phase 2"),
        MethodSpec("isls2-nm", "heuristic", "fine", "automated sectors + Nelder-Mead"),
        MethodSpec("isls2-sqp", "heuristic", "fine", "automated sectors + quasi-Newton ascent"),
        MethodSpec("isls2-as", "heuristic", "fine", "automated sectors + active-set ascent"),
        MethodSpec("isls2-ip", "heuristic", "fine", "automated sectors + barrier ascent"),
        MethodSpec("isls2-f", "heuristic", "fine", "automated sectors + max-distance proxy"),
    ]
    return {s.name: s for s in specs}


METHODS = _registry()
_ALIASES = {"rs": "random-search", "de": "de-cr05"}


def method_spec(name: str) -> MethodSpec:
    canonical = _ALIASES.get(name, name)
    if canonical not in METHODS:
        known = ", ".join(sorted(METHODS) + sorted(_ALIASES))
        raise ConfigurationError(f"unknown method {name!r}; known methods: {known}")
    return METHODS[canonical]


def _dispatch(spec: MethodSpec, n: int, evaluator: LayoutEvaluator,
              landscape: SurrogateLandscape | None, seed: int):
    """Run one method; returns (positions, complete, report or None)."""
    name = spec.name
    if name == "random-search":
        res = run_random_search(n, evaluator, seed)
        return res.positions, True, None
    if name.startswith("1+1ea-"):
        schedules = {"sigma3": MutationSchedule.fixed(3.0),
                     "sigma10": MutationSchedule.fixed(10.0),
                     "sigma30": MutationSchedule.fixed(30.0),
                     "uniform": MutationSchedule.uniform(30.0),
                     "linear": MutationSchedule.linear(30.0, 1.0),
                     "onefifth": MutationSchedule.one_fifth(10.0)}
        res = run_one_plus_one_ea(n, schedules[name.removeprefix("1+1ea-")], evaluator, seed)
        return res.positions, True, None
    if name.startswith("de-cr"):
        p_cr = int(name.removeprefix("de-cr")) / 10.0
        res = run_de(n, evaluator, seed, mu=50, f=0.5, p_cr=p_cr)
        return res.positions, True, None
    if name == "sls":
        run = run_sls(HeuristicConfig.for_sls(n), evaluator, landscape, seed)
    elif name == "sls-nm":
        run = run_sls(HeuristicConfig.for_sls_nm(n), evaluator, landscape, seed)
    elif name == "isls":
        run = run_isls(HeuristicConfig.for_isls(n), evaluator, landscape, seed)
    elif name in ("isls-nm", "isls2-nm"):
        run = run_isls2(HeuristicConfig.for_isls2(n, "nm"), evaluator, landscape, seed)
    elif name == "isls2-sqp":
        run = run_isls2(HeuristicConfig.for_isls2(n, "sqp"), evaluator, landscape, seed)
    elif name == "isls2-as":
        run = run_isls2(HeuristicConfig.for_isls2(n, "as"), evaluator, landscape, seed)
    elif name == "isls2-ip":
        run = run_isls2(HeuristicConfig.for_isls2(n, "ip"), evaluator, landscape, seed)
    elif name == "isls2-f":
        run = run_isls2(HeuristicConfig.for_isls2(n, "fast"), evaluator, landscape, seed)
    else:  # pragma: no cover - registry and dispatch kept in sync
        raise ConfigurationError(f"method {name!r} has no dispatch entry")
    return run.positions, run.complete, run.final_report


# -- experiment driver ----------------------------------------------------------

@dataclass
class ExperimentConfig:
    scenario: str
    method: str
    n_buoys: int
    budget: int
    n_runs: int = 10
    root_seed: int = 0
    workers: int = 1
    min_separation: float = DEFAULT_MIN_SEPARATION

    def __post_init__(self):
        if self.n_runs < 1:
            raise ConfigurationError("n_runs must be at least 1")
        if self.budget < 1:
            raise ConfigurationError("budget must be at least 1")
        method_spec(self.method)


@dataclass
class RunRecord:
    run_id: int
    seed: int
    positions: np.ndarray
    report: FitnessReport
    trace: list[tuple[int, float]]
    complete: bool
    q: float
    surrogate_evals: int
    wall_time: float = 0.0


def _execute_run(payload) -> RunRecord:
    (run_id, seed, spec, n, budget_limit, params, scenario, farm,
     landscape, isolated) = payload
    started = time.perf_counter()
    budget = EvaluationBudget(budget_limit)
    evaluator = LayoutEvaluator(params, scenario, farm, budget)
    positions, complete, report = _dispatch(spec, n, evaluator, landscape, seed)
    if report is None:
        if spec.kind == "baseline":
            report = evaluator.best_report
            positions = evaluator.best_positions
        else:
            report = evaluator(positions)  # heuristics with no sampling (N = 1)
    q = report.raw_power / (positions.shape[0] * isolated)
    return RunRecord(run_id=run_id, seed=seed, positions=positions, report=report,
                     trace=list(evaluator.trace), complete=complete, q=q,
                     surrogate_evals=landscape.evaluations if landscape is not None else 0,
                     wall_time=time.perf_counter() - started)


def build_method_landscape(spec: MethodSpec, params: WecParameters,
                           scenario: WaveScenario) -> SurrogateLandscape | None:
    if spec.landscape is None:
        return None
    if spec.landscape == "coarse":
        return build_two_buoy_landscape(params, scenario, COARSE_ANGULAR_RES, COARSE_RADIAL_RES)
    return build_two_buoy_landscape(params, scenario, FINE_ANGULAR_RES, FINE_RADIAL_RES)


def run_experiment(config: ExperimentConfig,
                   params: WecParameters | None = None) -> list[RunRecord]:
    params = params or WecParameters()
    scenario = load_scenario(config.scenario)
    spec = method_spec(config.method)
    farm = FarmArea.square(config.n_buoys, config.min_separation)
    landscape = build_method_landscape(spec, params, scenario)
    isolated = isolated_annual_power(params, scenario)

    payloads = [(i, config.root_seed + i, spec, config.n_buoys, config.budget,
                 params, scenario, farm, landscape, isolated)
                for i in range(config.n_runs)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_execute_run, payloads))
    return [_execute_run(p) for p in payloads]


# -- statistics -------------------------------------------------------------------

@dataclass(frozen=True)
class SummaryStats:
    count: int
    max: float
    median: float
    mean: float
    std: float


def summarize(values) -> SummaryStats:
    """Max / median / mean / sample std (n - 1) of final penalized fitness."""
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise ValueError("summarize needs at least one value")
    if vals.size == 1:
        warnings.warn("single-sample summary: std reported as 0 by convention")
        std = 0.0
    else:
        std = float(np.std(vals, ddof=1))
    return SummaryStats(count=int(vals.size), max=float(np.max(vals)),
                        median=float(np.median(vals)), mean=float(np.mean(vals)), std=std)


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def wilcoxon_one_tailed(sample_a, sample_b) -> float:
    """One-tailed rank-sum p-value for "a stochastically greater than b".

    Midranks for ties; exact enumeration of all rank assignments when the
    pooled size is at most 12, normal approximation with tie correction and
    continuity correction otherwise.
    """
    a = np.asarray(list(sample_a), dtype=float)
    b = np.asarray(list(sample_b), dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    n, m = a.size, b.size
    total = n + m
    ranks = _midranks(np.concatenate([a, b]))
    w_obs = float(ranks[:n].sum())

    if total <= 12:
        count = 0
        n_comb = 0
        for combo in itertools.combinations(range(total), n):
            n_comb += 1
            if ranks[list(combo)].sum() >= w_obs - 1e-9:
                count += 1
        return count / n_comb

    mu = n * (total + 1) / 2.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (total * (total - 1))
    var = n * m / 12.0 * ((total + 1) - tie_term)
    if var <= 0:
        return 0.5
    z = (w_obs - mu - 0.5) / math.sqrt(var)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# -- energy field ------------------------------------------------------------------

@dataclass
class FieldGrid:
    x: np.ndarray
    y: np.ndarray
    power: np.ndarray      # W; NaN on masked nodes
    masked: np.ndarray     # bool
    evaluations: int


def probe_power(positions, params: WecParameters, scenario: WaveScenario,
                point, kernel=None) -> float:
    """Power a probe buoy would absorb at `point` added to the layout."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    probe = np.asarray(point, dtype=float).reshape(1, 2)
    stacked = np.vstack([pos, probe]) if pos.size else probe
    return float(annual_power_breakdown(stacked, params, scenario, kernel)[-1])


def export_energy_field(positions, params: WecParameters, scenario: WaveScenario,
                        grid_step: float, farm: FarmArea, margin: float = 100.0,
                        kernel=None) -> FieldGrid:
    """Probe-buoy power on a grid covering the farm plus a margin.

    Nodes closer than the safety distance to any buoy are masked instead of
    probed.  One farm evaluation per unmasked node, metered separately from
    any optimizer budget.
    """
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    axis = np.arange(-margin, farm.side + margin + grid_step / 2.0, grid_step)
    xs, ys = [], []
    power = []
    masked = []
    evaluations = 0
    for y in axis:
        for x in axis:
            node = np.array([x, y])
            xs.append(x)
            ys.append(y)
            if pos.size and np.min(np.linalg.norm(pos - node, axis=1)) < farm.min_separation:
                masked.append(True)
                power.append(np.nan)
                continue
            masked.append(False)
            power.append(probe_power(pos, params, scenario, node, kernel))
            evaluations += 1
    return FieldGrid(x=np.array(xs), y=np.array(ys), power=np.array(power),
                     masked=np.array(masked), evaluations=evaluations)


# -- file outputs -------------------------------------------------------------------

def format_power(value: float) -> str:
    return f"{value:.6g}"


def write_results(records: list[RunRecord], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = [RESULTS_HEADER]
    for r in records:
        lines.append(",".join([str(r.run_id), str(r.seed),
                               format_power(r.report.raw_power),
                               format_power(r.report.violation),
                               format_power(r.report.penalized),
                               format_power(r.q),
                               str(r.report.evaluations_used)]))
    path = out / "results.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_run_files(records: list[RunRecord], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for r in records:
        trace_lines = ["eval_index,best_penalized_w"]
        trace_lines += [f"{idx},{format_power(best)}" for idx, best in r.trace]
        (out / f"trace_{r.run_id}.csv").write_text("\n".join(trace_lines) + "\n", encoding="utf-8")

        layout_lines = ["buoy_index,x_m,y_m,per_buoy_power_w"]
        for i, (x, y) in enumerate(r.positions):
            per = r.report.per_buoy_power[i] if i < len(r.report.per_buoy_power) else float("nan")
            layout_lines.append(f"{i},{x:.2f},{y:.2f},{format_power(per)}")
        (out / f"layout_{r.run_id}.csv").write_text("\n".join(layout_lines) + "\n", encoding="utf-8")


def read_results(path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0] != RESULTS_HEADER:
        raise ConfigurationError(f"{path} is not a results.csv file")
    cols = {name: [] for name in RESULTS_HEADER.split(",")}
    for line in lines[1:]:
        for name, value in zip(cols, line.split(",")):
            cols[name].append(float(value))
    return {name: np.array(vals) for name, vals in cols.items()}


def write_field(grid: FieldGrid, path) -> None:
    lines = ["x_m,y_m,power_w,masked"]
    for x, y, p, m in zip(grid.x, grid.y, grid.power, grid.masked):
        p_text = "" if m else format_power(p)
        lines.append(f"{x:.2f},{y:.2f},{p_text},{int(m)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
