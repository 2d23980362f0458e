"""Local refiners for single-buoy placement: Nelder-Mead and bounded ascent.

All refiners maximise a scalar objective of a 2-D point inside a square
[low, high]^2, respect a hard cap on objective evaluations (finite-difference
probes included) and never return a point worse than their start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ARMIJO_C = 1e-4
INITIAL_STEP = 20.0
ACTIVE_TOL = 0.1          # m; distance to a bound below which it counts as active
DIAMETER_TOL = 0.1        # m; Nelder-Mead stopping diameter
SIMPLEX_EDGE = 10.0       # m; initial simplex edge length
MAX_BACKTRACKS = 8

STRATEGIES = ("as", "sqp", "ip")


@dataclass
class RefinerResult:
    best_point: np.ndarray
    best_value: float | None
    evaluations_used: int
    converged: bool
    termination_reason: str


class _CapReached(Exception):
    pass


class _Counted:
    """Objective wrapper enforcing the evaluation cap and tracking the best."""

    def __init__(self, objective, cap: int, start, f_start):
        self.objective = objective
        self.cap = cap
        self.used = 0
        self.best_point = np.array(start, dtype=float)
        self.best_value = f_start

    def __call__(self, point) -> float:
        if self.used >= self.cap:
            raise _CapReached
        self.used += 1
        value = float(self.objective(np.asarray(point, dtype=float)))
        if self.best_value is None or value > self.best_value:
            self.best_value = value
            self.best_point = np.array(point, dtype=float)
        return value


def _clip(point, bounds):
    return np.clip(np.asarray(point, dtype=float), bounds[0], bounds[1])


def nelder_mead(objective, start, bounds, max_evals: int = 20,
                f_start: float | None = None) -> RefinerResult:
    """Maximising Nelder-Mead on a 2-D box.

    Reflection 1, expansion 2, contraction 0.5, shrink 0.5.  The initial
    simplex has 10 m edges along the axes (flipped inward at a bound) and all
    proposals are clamped into the box.  Stops when the cap is hit or the
    simplex diameter falls below 0.1 m.
    """
    start = _clip(start, bounds)
    f = _Counted(objective, max_evals, start, f_start)
    reason = "evaluation cap"
    converged = False
    try:
        if f.best_value is None:
            f(start)
        verts = [np.array(start, dtype=float)]
        vals = [f.best_value]
        for axis in range(2):
            v = np.array(start, dtype=float)
            edge = SIMPLEX_EDGE if v[axis] + SIMPLEX_EDGE <= bounds[1] else -SIMPLEX_EDGE
            v[axis] = np.clip(v[axis] + edge, bounds[0], bounds[1])
            verts.append(v)
            vals.append(f(v))

        while True:
            order = np.argsort(vals)[::-1]          # best first
            verts = [verts[i] for i in order]
            vals = [vals[i] for i in order]
            diameter = max(np.linalg.norm(verts[i] - verts[j])
                           for i in range(3) for j in range(i + 1, 3))
            if diameter < DIAMETER_TOL:
                converged = True
                reason = "simplex collapsed"
                break
            centroid = (verts[0] + verts[1]) / 2.0
            xr = _clip(centroid + (centroid - verts[2]), bounds)
            fr = f(xr)
            if fr > vals[0]:
                xe = _clip(centroid + 2.0 * (centroid - verts[2]), bounds)
                fe = f(xe)
                verts[2], vals[2] = (xe, fe) if fe > fr else (xr, fr)
            elif fr > vals[1]:
                verts[2], vals[2] = xr, fr
            else:
                xc = _clip(centroid + 0.5 * (verts[2] - centroid), bounds)
                fc = f(xc)
                if fc > vals[2]:
                    verts[2], vals[2] = xc, fc
                else:
                    for i in (1, 2):
                        verts[i] = verts[0] + 0.5 * (verts[i] - verts[0])
                        vals[i] = f(verts[i])
    except _CapReached:
        pass
    return RefinerResult(best_point=f.best_point, best_value=f.best_value,
                         evaluations_used=f.used, converged=converged,
                         termination_reason=reason)


def fd_gradient(objective, point, bounds, h: float = 0.5,
                f_center: float | None = None) -> np.ndarray:
    """Finite-difference gradient; one-sided within h of a bound.

    Central differences need no value at the point itself; the one-sided
    branches reuse f_center when the caller already knows it.
    """
    p = np.asarray(point, dtype=float)
    grad = np.zeros(2)
    center = f_center
    for axis in range(2):
        lo_ok = p[axis] - h >= bounds[0]
        hi_ok = p[axis] + h <= bounds[1]
        e = np.zeros(2)
        e[axis] = h
        if lo_ok and hi_ok:
            grad[axis] = (objective(p + e) - objective(p - e)) / (2.0 * h)
        elif hi_ok:
            if center is None:
                center = objective(p)
            grad[axis] = (objective(p + e) - center) / h
        else:
            if center is None:
                center = objective(p)
            grad[axis] = (center - objective(p - e)) / h
    return grad


def _barrier_terms(point, bounds, mu):
    slacks = np.array([point[0] - bounds[0], bounds[1] - point[0],
                       point[1] - bounds[0], bounds[1] - point[1]])
    if np.any(slacks <= 0.0):
        return -np.inf, np.zeros(2)
    value = mu * float(np.sum(np.log(slacks)))
    grad = mu * np.array([1.0 / slacks[0] - 1.0 / slacks[1],
                          1.0 / slacks[2] - 1.0 / slacks[3]])
    return value, grad


def constrained_descent(objective, start, bounds, strategy: str,
                        max_evals: int = 20, f_start: float | None = None) -> RefinerResult:
    """Bounded gradient ascent with backtracking, in three boundary flavours.

    * "as": coordinates within 0.1 m of a bound with outward gradient are
      frozen; ascent follows the projected gradient along the active set.
    * "sqp": quasi-Newton direction from a BFGS-updated 2x2 inverse Hessian
      approximation; steps are clipped at the boundary.
    * "ip": ascends objective + mu * sum(log(slacks)) so iterates stay strictly
      interior; mu starts at 1e-3 |f(start)| and halves on every accepted step.

    Line search: initial step 20 m along the unit direction, halved on
    failure, Armijo constant 1e-4.  Every objective call (finite-difference
    probes included) counts against max_evals.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    x = _clip(start, bounds)
    if strategy == "ip":
        interior_pad = min(1e-6, (bounds[1] - bounds[0]) / 4.0)
        x = np.clip(x, bounds[0] + interior_pad, bounds[1] - interior_pad)
    f = _Counted(objective, max_evals, x, f_start if np.array_equal(x, _clip(start, bounds)) else None)
    reason = "evaluation cap"
    converged = False
    try:
        fx = f.best_value if f.best_value is not None else f(x)
        mu = 1e-3 * abs(fx)
        h_inv = np.eye(2)
        prev_grad = None
        prev_x = None
        while True:
            grad = fd_gradient(f, x, bounds, f_center=fx)
            if strategy == "as":
                direction = grad.copy()
                for axis in range(2):
                    at_low = x[axis] - bounds[0] <= ACTIVE_TOL and grad[axis] < 0
                    at_high = bounds[1] - x[axis] <= ACTIVE_TOL and grad[axis] > 0
                    if at_low or at_high:
                        direction[axis] = 0.0
                merit = fx
                merit_grad = direction
            elif strategy == "sqp":
                if prev_grad is not None:
                    s = x - prev_x
                    y = -(grad - prev_grad)       # BFGS on the negated objective
                    sy = float(s @ y)
                    if sy > 1e-12:
                        rho = 1.0 / sy
                        eye = np.eye(2)
                        h_inv = ((eye - rho * np.outer(s, y)) @ h_inv
                                 @ (eye - rho * np.outer(y, s)) + rho * np.outer(s, s))
                direction = h_inv @ grad
                if float(direction @ grad) <= 0.0:
                    direction = grad.copy()        # safeguard: fall back to ascent
                merit = fx
                merit_grad = grad
            else:  # ip
                bval, bgrad = _barrier_terms(x, bounds, mu)
                direction = grad + bgrad
                merit = fx + bval
                merit_grad = direction

            norm = float(np.linalg.norm(direction))
            if norm < 1e-10:
                converged = True
                reason = "stationary point"
                break
            unit = direction / norm
            slope = float(merit_grad @ unit)

            alpha = INITIAL_STEP
            accepted = False
            for _ in range(MAX_BACKTRACKS):
                trial = _clip(x + alpha * unit, bounds)
                if strategy == "ip":
                    trial = np.clip(trial, bounds[0] + interior_pad, bounds[1] - interior_pad)
                if np.linalg.norm(trial - x) < 1e-12:
                    alpha /= 2.0
                    continue
                f_trial = f(trial)
                merit_trial = f_trial
                if strategy == "ip":
                    bval_t, _ = _barrier_terms(trial, bounds, mu)
                    merit_trial = f_trial + bval_t
                if merit_trial >= merit + ARMIJO_C * alpha * slope:
                    prev_grad, prev_x = grad, x.copy()
                    x, fx = trial, f_trial
                    if strategy == "ip":
                        mu /= 2.0
                    accepted = True
                    break
                alpha /= 2.0
            if not accepted:
                converged = True
                reason = "line search exhausted"
                break
    except _CapReached:
        pass
    return RefinerResult(best_point=f.best_point, best_value=f.best_value,
                         evaluations_used=f.used, converged=converged,
                         termination_reason=reason)


def max_distance_point(placed, bounds, rng=None, max_evals: int = 20) -> np.ndarray:
    """Point maximising the minimum distance to already placed buoys.

    Proxy solve used by the fast placement variant: 20 evaluations of the
    "sqp" ascent from the best of three random interior starts.  The proxy is
    free relative to hydrodynamic evaluations, so nothing here touches the
    farm budget.
    """
    pos = np.asarray(placed, dtype=float).reshape(-1, 2)
    if pos.shape[0] < 1:
        raise ValueError("placed must contain at least one position")
    rng = rng if rng is not None else np.random.default_rng(0)

    def min_dist(p):
        return float(np.min(np.linalg.norm(pos - np.asarray(p, dtype=float), axis=1)))

    span = bounds[1] - bounds[0]
    starts = bounds[0] + span * rng.uniform(0.05, 0.95, size=(3, 2))
    best_start = max(starts, key=min_dist)
    result = constrained_descent(min_dist, best_start, bounds, "sqp", max_evals=max_evals)
    return result.best_point
