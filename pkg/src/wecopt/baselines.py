"""Whole-layout global optimizers: random search, 1+1 EA variants, DE.

All three optimise the 2N-dimensional position vector of the full layout
against the penalized annual power, spending exactly the evaluation budget
carried by the shared evaluator.  Mutations are clamped into the farm; the
separation constraint is left to the penalty.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhaustedError, ConfigurationError
from .fitness import LayoutEvaluator, violation_sum

ONE_FIFTH_WINDOW = 20
ONE_FIFTH_FACTOR = 1.5


@dataclass(frozen=True)
class MutationSchedule:
    """Step-size rule for the 1+1 EA.

    kinds: "fixed" (Gaussian, constant sigma), "uniform" (per-coordinate
    uniform in [-s, s]), "linear" (Gaussian, sigma decaying linearly from
    sigma_start to sigma_end over the run), "one_fifth" (Gaussian, sigma
    multiplied by 1.5 when the success rate over the last 20 steps exceeds
    1/5, divided by 1.5 otherwise).
    """

    kind: str
    sigma: float = 10.0
    s: float = 30.0
    sigma_start: float = 30.0
    sigma_end: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform", "linear", "one_fifth"):
            raise ConfigurationError(f"unknown mutation schedule {self.kind!r}")
        if self.sigma < 0 or self.s <= 0 or self.sigma_start <= 0 or self.sigma_end <= 0:
            raise ConfigurationError("mutation parameters must be positive")
        if self.kind == "linear" and self.sigma_end > self.sigma_start:
            raise ConfigurationError("linear schedule must decay")

    @classmethod
    def fixed(cls, sigma: float) -> "MutationSchedule":
        return cls(kind="fixed", sigma=sigma)

    @classmethod
    def uniform(cls, s: float = 30.0) -> "MutationSchedule":
        return cls(kind="uniform", s=s)

    @classmethod
    def linear(cls, start: float = 30.0, end: float = 1.0) -> "MutationSchedule":
        return cls(kind="linear", sigma_start=start, sigma_end=end)

    @classmethod
    def one_fifth(cls, sigma0: float = 10.0) -> "MutationSchedule":
        return cls(kind="one_fifth", sigma=sigma0)


@dataclass
class BaselineRun:
    positions: np.ndarray
    fitness: float
    complete: bool = True


def _uniform_layout(rng, n: int, side: float) -> np.ndarray:
    return rng.uniform(0.0, side, size=(n, 2))


def run_random_search(n: int, evaluator: LayoutEvaluator, seed: int) -> BaselineRun:
    """Uniform layouts until the budget runs out; best penalized fitness kept."""
    rng = np.random.default_rng(seed)
    side = evaluator.farm.side
    best = None
    best_fit = -np.inf
    try:
        while True:
            layout = _uniform_layout(rng, n, side)
            report = evaluator(layout)
            if report.penalized > best_fit:
                best, best_fit = layout, report.penalized
    except BudgetExhaustedError:
        pass
    if best is None:
        raise BudgetExhaustedError("random search needs at least one evaluation")
    return BaselineRun(positions=best, fitness=best_fit)


def _initial_layout(rng, n: int, side: float, r_prime: float) -> np.ndarray:
    """Uniform start, resampled up to 100 times to reduce initial violations."""
    best = None
    best_vio = np.inf
    for _ in range(100):
        layout = _uniform_layout(rng, n, side)
        vio = violation_sum(layout, r_prime)
        if vio < best_vio:
            best, best_vio = layout, vio
        if vio == 0.0:
            break
    return best


def run_one_plus_one_ea(n: int, schedule: MutationSchedule,
                        evaluator: LayoutEvaluator, seed: int) -> BaselineRun:
    """1+1 EA perturbing all coordinates, accepting strict improvements only."""
    rng = np.random.default_rng(seed)
    side = evaluator.farm.side
    parent = _initial_layout(rng, n, side, evaluator.farm.min_separation)
    try:
        parent_fit = evaluator(parent).penalized
    except BudgetExhaustedError:
        raise BudgetExhaustedError("1+1 EA needs at least one evaluation") from None

    total_steps = max(evaluator.budget.remaining, 1)
    sigma = schedule.sigma
    successes: deque[bool] = deque(maxlen=ONE_FIFTH_WINDOW)
    step = 0
    try:
        while True:
            step += 1
            if schedule.kind == "linear":
                frac = 0.0 if total_steps == 1 else (step - 1) / (total_steps - 1)
                sigma = schedule.sigma_start + (schedule.sigma_end - schedule.sigma_start) * frac
            if schedule.kind == "uniform":
                delta = rng.uniform(-schedule.s, schedule.s, size=(n, 2))
            else:
                delta = rng.normal(0.0, 1.0, size=(n, 2)) * sigma
            child = np.clip(parent + delta, 0.0, side)
            child_fit = evaluator(child).penalized
            improved = child_fit > parent_fit
            if improved:
                parent, parent_fit = child, child_fit
            if schedule.kind == "one_fifth":
                successes.append(improved)
                if len(successes) == ONE_FIFTH_WINDOW:  # adapt once per full window
                    rate = sum(successes) / ONE_FIFTH_WINDOW
                    sigma = sigma * ONE_FIFTH_FACTOR if rate > 0.2 else sigma / ONE_FIFTH_FACTOR
                    successes.clear()
    except BudgetExhaustedError:
        pass
    return BaselineRun(positions=parent, fitness=parent_fit)


def run_de(n: int, evaluator: LayoutEvaluator, seed: int, mu: int = 50,
           f: float = 0.5, p_cr: float = 0.5) -> BaselineRun:
    """DE/rand/1/bin on the flattened position vector with greedy selection."""
    if mu < 4:
        raise ConfigurationError("DE/rand/1 needs a population of at least 4")
    rng = np.random.default_rng(seed)
    side = evaluator.farm.side
    dim = 2 * n

    pop = [_uniform_layout(rng, n, side).ravel() for _ in range(mu)]
    fits = np.empty(mu)
    try:
        for i in range(mu):
            fits[i] = evaluator(pop[i].reshape(n, 2)).penalized
    except BudgetExhaustedError:
        raise BudgetExhaustedError("DE needs a budget of at least its population size") from None

    try:
        while True:
            for i in range(mu):
                others = [j for j in range(mu) if j != i]
                a, b, c = rng.choice(others, size=3, replace=False)
                donor = pop[a] + f * (pop[b] - pop[c])
                mask = rng.random(dim) < p_cr
                mask[rng.integers(dim)] = True
                trial = np.clip(np.where(mask, donor, pop[i]), 0.0, side)
                trial_fit = evaluator(trial.reshape(n, 2)).penalized
                if trial_fit >= fits[i]:
                    pop[i], fits[i] = trial, trial_fit
    except BudgetExhaustedError:
        pass

    best = int(np.argmax(fits))
    return BaselineRun(positions=pop[best].reshape(n, 2), fitness=float(fits[best]))
