"""Sequential one-buoy-at-a-time placement heuristics.

All variants share one engine: place the first buoy by a rule, then for each
subsequent buoy draw candidate positions inside a landscape-derived search
sector anchored at the previously placed buoy, keep the best by penalized
fitness, and optionally refine it with a capped local search.

Variants:

* sls      -- coarse landscape, sectors mirrored to both sides of the anchor,
              15 uniform samples per buoy, first buoy at the bottom centre.
* sls-nm   -- sls sectors, 3 samples + 20 Nelder-Mead evaluations per buoy.
* isls     -- fine landscape, automated sector, corner start, upward-only
              phase 1 (10 samples) until the sector leaves the farm, then
              20 samples per remaining buoy.
* isls2-*  -- isls phase 1, phase 2 best-of-3 plus a 20-evaluation refiner
              (nm / sqp / as / ip), or the fast max-distance proxy placement.

Randomness is drawn from per-buoy substreams seeded by (seed, buoy_index) so
a placement does not depend on how many samples earlier buoys consumed.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhaustedError, ConfigurationError, PlacementInfeasibleError
from .fitness import FarmArea, FitnessReport, LayoutEvaluator
from .landscape import (SearchSector, SectorExtraction, SurrogateLandscape,
                        extract_search_sectors)
from .refiners import constrained_descent, max_distance_point, nelder_mead

REFINERS = ("none", "nm", "sqp", "as", "ip", "fast")


@dataclass
class HeuristicConfig:
    n_buoys: int
    sls_samples: int = 15
    samples_phase1: int = 10
    samples_phase2: int = 20
    refiner: str = "none"
    refiner_evals: int = 20
    step_slack_kappa: float = 10.0      # added above the best landscape distance
    phase1_radial_slack: float = 50.0   # how far below the best distance phase-1 samples go
    phase2_radial_slack: float = 100.0

    def __post_init__(self):
        if self.n_buoys < 1:
            raise ConfigurationError("n_buoys must be at least 1")
        for name in ("sls_samples", "samples_phase1", "samples_phase2", "refiner_evals"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")
        if self.refiner not in REFINERS:
            raise ConfigurationError(f"unknown refiner {self.refiner!r}; choose from {REFINERS}")

    @classmethod
    def for_sls(cls, n_buoys: int) -> "HeuristicConfig":
        return cls(n_buoys=n_buoys, step_slack_kappa=20.0)

    @classmethod
    def for_sls_nm(cls, n_buoys: int) -> "HeuristicConfig":
        return cls(n_buoys=n_buoys, sls_samples=3, refiner="nm", step_slack_kappa=20.0)

    @classmethod
    def for_isls(cls, n_buoys: int) -> "HeuristicConfig":
        return cls(n_buoys=n_buoys)

    @classmethod
    def for_isls2(cls, n_buoys: int, refiner: str) -> "HeuristicConfig":
        return cls(n_buoys=n_buoys, samples_phase2=3, refiner=refiner)


@dataclass
class Placement:
    buoy_index: int        # 1-based placement order
    phase: int             # 1 or 2 (sls places everything in phase 1)
    position: np.ndarray
    fitness: float | None  # penalized fitness of the partial layout, if evaluated
    refined: bool = False


@dataclass
class HeuristicRun:
    positions: np.ndarray
    complete: bool
    placements: list[Placement] = field(default_factory=list)
    final_report: FitnessReport | None = None
    phase_one_count: int = 0
    bn_row: int | None = None
    best_local_angle: float | None = None


def place_first_buoy(rule: str, farm: FarmArea, best_angle: float | None = None) -> np.ndarray:
    """First-buoy position: bottom centre, or the corner facing the best angle."""
    if rule == "center_bottom":
        return np.array([farm.side / 2.0, 0.0])
    if rule == "corner":
        if best_angle is None:
            raise ConfigurationError("corner rule needs the best landscape angle")
        return np.array([0.0, 0.0]) if 0.0 < best_angle < 90.0 else np.array([farm.side, 0.0])
    raise ConfigurationError(f"unknown first-buoy rule {rule!r}")


def _draw_candidates(sectors, anchor, farm: FarmArea, rng, count: int,
                     best_distance: float, kappa: float, r_prime: float,
                     avoid: np.ndarray | None = None) -> np.ndarray:
    """Uniform sector samples, clamped into the farm.

    Angle is uniform over the sector's angular range (sector chosen uniformly
    when several are given), distance uniform over
    [max(R', radial_low), best_distance + kappa].  The draw law keeps samples
    at least R' from the anchor, so a clamped position closer than that has
    collapsed onto the anchor: it is rejected and redrawn, as is a position
    coinciding exactly with an already placed buoy (degenerate geometry).
    After 100 * count rejections the sector is deemed infeasible.
    """
    anchor = np.asarray(anchor, dtype=float)
    cands = np.empty((count, 2))
    found = 0
    rejections = 0
    while found < count:
        if rejections > 100 * count:
            raise PlacementInfeasibleError(
                "search sector lies outside the farm; clamped samples collapse onto the anchor")
        idx = 0 if len(sectors) == 1 else int(rng.integers(len(sectors)))
        sector = sectors[idx]
        angle = math.radians(rng.uniform(sector.angle_low, sector.angle_high))
        dist = rng.uniform(max(r_prime, sector.radial_low), best_distance + kappa)
        point = anchor + dist * np.array([math.cos(angle), math.sin(angle)])
        clamped = farm.clamp(point)
        if np.linalg.norm(clamped - anchor) < r_prime:
            rejections += 1
            continue
        if avoid is not None and avoid.size and np.min(np.linalg.norm(avoid - clamped, axis=1)) < 1e-9:
            rejections += 1
            continue
        cands[found] = clamped
        found += 1
    return cands


def sample_sector(sector: SearchSector, anchor, farm: FarmArea, rng, count: int, *,
                  best_distance: float, kappa: float,
                  r_prime: float | None = None) -> np.ndarray:
    """Public single-sector sampling with the step law used by all heuristics."""
    rp = farm.min_separation if r_prime is None else r_prime
    return _draw_candidates((sector,), anchor, farm, rng, count, best_distance, kappa, rp)


# -- sector geometry helpers --------------------------------------------------

def _upward_angle(angle_deg: float) -> float:
    """Reflect a heading about the x axis if it points into the lower half plane."""
    a = angle_deg % 360.0
    return (360.0 - a) % 360.0 if math.sin(math.radians(a)) < 0 else a


def _upward_angle_range(lo: float, hi: float) -> tuple[float, float]:
    """Mirror an angular interval into the upper half plane and clip to [0, 180]."""
    mid = 0.5 * (lo + hi)
    if math.sin(math.radians(mid)) < 0:
        lo, hi = -hi, -lo
        mid = 0.5 * (lo + hi)
    shift = -360.0 * math.floor(mid / 360.0)
    lo, hi, mid = lo + shift, hi + shift, mid + shift
    lo_c, hi_c = max(lo, 0.0), min(hi, 180.0)
    if hi_c - lo_c < 1e-9:
        half = max(0.5 * (hi - lo), 1e-6)
        center = min(max(mid, 0.0), 180.0)
        lo_c, hi_c = max(0.0, center - half), min(180.0, center + half)
        if hi_c - lo_c < 1e-9:
            lo_c, hi_c = 0.0, 180.0
    return lo_c, hi_c


def _phase_sectors(extraction: SectorExtraction, phase: int, config: HeuristicConfig,
                   r_prime: float) -> tuple[tuple[SearchSector, ...], float]:
    """Phase-dependent sectors and distance slack for the isls family.

    Phase 1 keeps the automated angular range mirrored into the upper half
    plane so the placement marches towards the far boundary, with a tight
    radial band (slack R' below the best distance, the step slack above).
    Phase 2 fills the space behind the front row: the surrogate's angular
    signal no longer applies once buoys occlude each other, so samples go to
    the full circle with the broader 2R' slack on both sides of the best
    distance.  Returns (sectors, slack above the best distance for the draw).
    """
    sigma = config.phase1_radial_slack if phase == 1 else config.phase2_radial_slack
    r_lo = max(r_prime, extraction.best_distance - sigma)
    if phase == 1:
        base = extraction.sectors[0]
        lo, hi = _upward_angle_range(base.angle_low, base.angle_high)
        slack = config.step_slack_kappa
        r_hi = max(extraction.best_distance + slack, r_lo + 1e-6)
        return (SearchSector(lo, hi, r_lo, r_hi),), slack
    slack = sigma + config.step_slack_kappa
    r_hi = max(extraction.best_distance + slack, r_lo + 1e-6)
    return (SearchSector(0.0, 360.0, r_lo, r_hi),), slack


def bottom_y_boundary(sector: SearchSector, anchor) -> float:
    """Lowest y coordinate reachable inside an upward sector from the anchor."""
    s_lo = math.sin(math.radians(sector.angle_low))
    s_hi = math.sin(math.radians(sector.angle_high))
    return float(anchor[1]) + sector.radial_low * min(s_lo, s_hi)


def _first_row_capacity(side: float, best_angle_deg: float, best_distance: float) -> int:
    """Estimated buoy capacity of the first placement sweep.

    Row length is the farm crossing at the best landscape angle, capped at the
    diagonal; dividing by the preferred spacing gives the capacity.
    """
    cos_a = abs(math.cos(math.radians(best_angle_deg)))
    row_len = side * math.sqrt(2.0) if cos_a < 1e-12 else min(side / cos_a, side * math.sqrt(2.0))
    return int(math.floor(row_len / best_distance)) + 1


# -- per-buoy objective --------------------------------------------------------

class _BuoyObjective:
    """Penalized fitness of placed + [candidate] as a function of the candidate."""

    def __init__(self, evaluator: LayoutEvaluator, placed: list[np.ndarray]):
        self.evaluator = evaluator
        self.placed = placed
        self.best_point: np.ndarray | None = None
        self.best_fitness = -np.inf
        self.best_report: FitnessReport | None = None

    def __call__(self, point) -> float:
        candidate = np.asarray(point, dtype=float)
        if self.placed and np.min(np.linalg.norm(np.vstack(self.placed) - candidate, axis=1)) < 1e-9:
            return -np.inf  # coincident with a placed buoy; not worth an evaluation
        layout = np.vstack(self.placed + [candidate]) if self.placed else candidate.reshape(1, 2)
        report = self.evaluator(layout)
        if report.penalized > self.best_fitness:
            self.best_fitness = report.penalized
            self.best_point = candidate.copy()
            self.best_report = report
        return report.penalized


def _buoy_rng(seed: int, buoy_index: int):
    return np.random.default_rng((int(seed), int(buoy_index)))


def _refine(objective: _BuoyObjective, start: np.ndarray, f_start: float,
            farm: FarmArea, refiner: str, max_evals: int) -> np.ndarray:
    bounds = (0.0, farm.side)
    if refiner == "nm":
        result = nelder_mead(objective, start, bounds, max_evals=max_evals, f_start=f_start)
    else:
        result = constrained_descent(objective, start, bounds, refiner,
                                     max_evals=max_evals, f_start=f_start)
    return result.best_point


# -- the shared engine ---------------------------------------------------------

def _run_sls_engine(config: HeuristicConfig, evaluator: LayoutEvaluator,
                    landscape: SurrogateLandscape, seed: int) -> HeuristicRun:
    farm = evaluator.farm
    r_prime = farm.min_separation
    extraction = extract_search_sectors(landscape, "sls")
    anchor0 = place_first_buoy("center_bottom", farm)

    placed: list[np.ndarray] = []
    placements: list[Placement] = []
    final_report = None
    complete = True

    if config.n_buoys == 1:
        placed.append(anchor0)
        placements.append(Placement(1, 1, anchor0, None))
    else:
        try:
            for i in range(1, config.n_buoys + 1):
                rng = _buoy_rng(seed, i)
                anchor = placed[-1] if placed else anchor0
                cands = _draw_candidates(extraction.sectors, anchor, farm, rng,
                                         config.sls_samples, extraction.best_distance,
                                         config.step_slack_kappa, r_prime)
                objective = _BuoyObjective(evaluator, placed)
                refined = False
                try:
                    for cand in cands:
                        objective(cand)
                    if config.refiner == "nm":
                        _refine(objective, objective.best_point, objective.best_fitness,
                                farm, "nm", config.refiner_evals)
                        refined = True
                finally:
                    if objective.best_point is not None:
                        placed.append(objective.best_point)
                        placements.append(Placement(i, 1, objective.best_point,
                                                    objective.best_fitness, refined))
                        final_report = objective.best_report
        except BudgetExhaustedError:
            pass

    positions = np.vstack(placed) if placed else np.empty((0, 2))
    return HeuristicRun(positions=positions, complete=len(placed) == config.n_buoys,
                        placements=placements, final_report=final_report,
                        phase_one_count=len(placed),
                        best_local_angle=extraction.best_angle)


def _run_isls_engine(config: HeuristicConfig, evaluator: LayoutEvaluator,
                     landscape: SurrogateLandscape, seed: int) -> HeuristicRun:
    farm = evaluator.farm
    r_prime = farm.min_separation
    extraction = extract_search_sectors(landscape, "auto")
    best_local_angle = _upward_angle(extraction.best_angle)
    first = place_first_buoy("corner", farm, best_local_angle)
    bn_row = _first_row_capacity(farm.side, best_local_angle, extraction.best_distance)

    sector_p1, slack_p1 = _phase_sectors(extraction, 1, config, r_prime)
    sector_p2, slack_p2 = _phase_sectors(extraction, 2, config, r_prime)

    placed: list[np.ndarray] = [first]
    placements: list[Placement] = [Placement(1, 1, first, None)]
    final_report = None
    buoy_index = 2

    try:
        # Phase 1: march towards the far boundary while the sector still
        # reaches into the farm from the last placed buoy.
        while (buoy_index <= config.n_buoys
               and bottom_y_boundary(sector_p1[0], placed[-1]) < farm.side):
            rng = _buoy_rng(seed, buoy_index)
            cands = _draw_candidates(sector_p1, placed[-1], farm, rng,
                                     config.samples_phase1, extraction.best_distance,
                                     slack_p1, r_prime)
            objective = _BuoyObjective(evaluator, placed)
            try:
                for cand in cands:
                    objective(cand)
            finally:
                if objective.best_point is not None:
                    placed.append(objective.best_point)
                    placements.append(Placement(buoy_index, 1, objective.best_point,
                                                objective.best_fitness))
                    final_report = objective.best_report
            buoy_index += 1

        # Phase 2: remaining buoys, sampled on both sides and refined.
        for i in range(buoy_index, config.n_buoys + 1):
            rng = _buoy_rng(seed, i)
            objective = _BuoyObjective(evaluator, placed)
            refined = False
            try:
                if config.refiner == "fast":
                    point = max_distance_point(np.vstack(placed), (0.0, farm.side), rng=rng)
                    objective(farm.clamp(point))
                else:
                    cands = _draw_candidates(sector_p2, placed[-1], farm, rng,
                                             config.samples_phase2, extraction.best_distance,
                                             slack_p2, r_prime)
                    for cand in cands:
                        objective(cand)
                    if config.refiner != "none":
                        gate = True
                        if config.refiner == "as":
                            near_top = objective.best_point[1] >= farm.side - r_prime
                            gate = (i <= bn_row) or near_top
                        if gate:
                            _refine(objective, objective.best_point, objective.best_fitness,
                                    farm, config.refiner, config.refiner_evals)
                            refined = True
            finally:
                if objective.best_point is not None:
                    placed.append(objective.best_point)
                    placements.append(Placement(i, 2, objective.best_point,
                                                objective.best_fitness, refined))
                    final_report = objective.best_report
    except BudgetExhaustedError:
        pass

    positions = np.vstack(placed)
    return HeuristicRun(positions=positions, complete=len(placed) == config.n_buoys,
                        placements=placements, final_report=final_report,
                        phase_one_count=sum(1 for p in placements if p.phase == 1),
                        bn_row=bn_row, best_local_angle=best_local_angle)


# -- public entry points ---------------------------------------------------------

def run_sls(config: HeuristicConfig, evaluator: LayoutEvaluator,
            landscape: SurrogateLandscape, seed: int) -> HeuristicRun:
    """Smart local search: 15 sector samples per buoy (first buoy included)."""
    return _run_sls_engine(config, evaluator, landscape, seed)


def run_isls(config: HeuristicConfig, evaluator: LayoutEvaluator,
             landscape: SurrogateLandscape, seed: int) -> HeuristicRun:
    """Two-phase placement: corner start, upward sweep, then broad sampling."""
    return _run_isls_engine(dataclasses.replace(config, refiner="none"),
                            evaluator, landscape, seed)


def run_isls2(config: HeuristicConfig, evaluator: LayoutEvaluator,
              landscape: SurrogateLandscape, seed: int,
              refiner: str | None = None) -> HeuristicRun:
    """isls phase 1 plus a refined second phase (nm / sqp / as / ip / fast)."""
    if refiner is not None:
        config = dataclasses.replace(config, refiner=refiner)
    return _run_isls_engine(config, evaluator, landscape, seed)
