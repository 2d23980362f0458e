"""Farm geometry, separation penalty and budget-metered layout evaluation.

The square farm side scales with the buoy count as sqrt(N * 20000) m and any
pair of buoys closer than the safety distance R' (50 m default) contributes
its shortfall to a violation sum.  The objective every optimizer maximises is
the annual average power divided by (violation + 1)^20: feasible layouts are
untouched, violating ones are crushed steeply but smoothly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .climate import WaveScenario, annual_power_breakdown
from .errors import BoundsError, BudgetExhaustedError
from .hydro import Layout, PointAbsorberKernel, WecParameters

DEFAULT_MIN_SEPARATION = 50.0
PENALTY_EXPONENT = 20
AREA_PER_BUOY = 20000.0


def farm_side(n: int) -> float:
    """Side length of the square lease for n buoys, sqrt(n * 20000) m."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.sqrt(n * AREA_PER_BUOY)


@dataclass(frozen=True)
class FarmArea:
    side: float
    min_separation: float = DEFAULT_MIN_SEPARATION

    def __post_init__(self):
        if not self.side > 0 or not self.min_separation > 0:
            raise ValueError("side and min_separation must be strictly positive")

    @classmethod
    def square(cls, n: int, min_separation: float = DEFAULT_MIN_SEPARATION) -> "FarmArea":
        return cls(side=farm_side(n), min_separation=min_separation)

    def contains(self, positions: np.ndarray) -> bool:
        p = np.asarray(positions, dtype=float)
        return bool(np.all(p >= 0.0) and np.all(p <= self.side))

    def clamp(self, point: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(point, dtype=float), 0.0, self.side)


def violation_sum(layout, r_prime: float = DEFAULT_MIN_SEPARATION) -> float:
    """Total shortfall below the safety distance over all buoy pairs, m.

    Pairs separated by exactly r_prime contribute zero.
    """
    pos = layout.positions if isinstance(layout, Layout) else np.asarray(layout, dtype=float)
    n = pos.shape[0]
    if n < 2:
        return 0.0
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    iu = np.triu_indices(n, k=1)
    return float(np.maximum(0.0, r_prime - dist[iu]).sum())


def penalized_fitness(raw_power: float, violation: float) -> float:
    """raw / (violation + 1)^20; equals raw iff the layout is feasible."""
    if raw_power < 0:
        raise ValueError("raw_power must be non-negative")
    if violation < 0:
        raise ValueError("violation must be non-negative")
    return raw_power / (violation + 1.0) ** PENALTY_EXPONENT


@dataclass
class FitnessReport:
    raw_power: float
    violation: float
    penalty_factor: float
    penalized: float
    per_buoy_power: np.ndarray
    evaluations_used: int


class EvaluationBudget:
    """Thread-safe tally of full-layout evaluations against a hard limit."""

    def __init__(self, limit: int):
        if limit < 0:
            raise ValueError("limit must be non-negative")
        self.limit = int(limit)
        self._used = 0
        self._lock = threading.Lock()

    @property
    def used(self) -> int:
        return self._used

    @property
    def remaining(self) -> int:
        return self.limit - self._used

    def consume(self) -> int:
        with self._lock:
            if self._used >= self.limit:
                raise BudgetExhaustedError(f"evaluation budget of {self.limit} exhausted")
            self._used += 1
            return self._used


def evaluate_layout(layout, params: WecParameters, scenario: WaveScenario,
                    farm: FarmArea, budget: EvaluationBudget,
                    kernel: PointAbsorberKernel | None = None) -> FitnessReport:
    """Evaluate one layout, spending one unit of budget.

    Positions outside [0, side]^2 raise BoundsError without consuming budget:
    optimizers are expected to clamp their own proposals, so an out-of-bounds
    layout here is a caller bug, not a search outcome.
    """
    pos = layout.positions if isinstance(layout, Layout) else np.asarray(layout, dtype=float)
    if not farm.contains(pos):
        raise BoundsError("layout has positions outside the farm area")
    used = budget.consume()
    per_buoy = annual_power_breakdown(pos, params, scenario, kernel)
    raw = float(per_buoy.sum())
    vio = violation_sum(pos, farm.min_separation)
    factor = (vio + 1.0) ** PENALTY_EXPONENT
    return FitnessReport(raw_power=raw, violation=vio, penalty_factor=factor,
                         penalized=raw / factor, per_buoy_power=per_buoy,
                         evaluations_used=used)


class LayoutEvaluator:
    """Callable objective shared by every optimizer in this package.

    Wraps evaluate_layout with a fixed (params, scenario, farm, budget) and
    records a best-so-far trace entry per evaluation.
    """

    def __init__(self, params: WecParameters, scenario: WaveScenario, farm: FarmArea,
                 budget: EvaluationBudget, kernel: PointAbsorberKernel | None = None):
        self.params = params
        self.scenario = scenario
        self.farm = farm
        self.budget = budget
        self.kernel = kernel
        self.trace: list[tuple[int, float]] = []
        self.best_penalized = -np.inf
        self.best_report: FitnessReport | None = None
        self.best_positions: np.ndarray | None = None

    def __call__(self, positions) -> FitnessReport:
        report = evaluate_layout(positions, self.params, self.scenario,
                                 self.farm, self.budget, self.kernel)
        if report.penalized > self.best_penalized:
            self.best_penalized = report.penalized
            self.best_report = report
            pos = positions.positions if isinstance(positions, Layout) else positions
            self.best_positions = np.array(pos, dtype=float)
        self.trace.append((report.evaluations_used, self.best_penalized))
        return report
