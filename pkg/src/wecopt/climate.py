"""Wave scenarios and spectral power integration.

A scenario bundles a scatter table of sea states (Hs, Tp, occurrence), a
directional spreading grid and a frequency grid.  Regular-wave power from the
hydrodynamic model is integrated against a Bretschneider spectrum and the
directional weights to give sea-state power, then weighted by occurrence
probabilities to give the annual average power of a layout:

    P_state = sum_beta sum_omega 2 S(omega) D(beta) P(beta, omega) dOmega dBeta
    P_annual = sum_states O_state * P_state

Quadrature is trapezoidal in both omega and beta, summed in ascending beta
then ascending omega order so results are bit-reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ScenarioFormatError
from .hydro import Layout, PointAbsorberKernel, WecParameters, regular_power_grid

# Declared defaults: 50 frequencies spanning the energetic band of the design
# sea states, 7 headings uniform over the half circle with uniform spreading.
DEFAULT_OMEGA_RANGE = (0.25, 3.5)
DEFAULT_OMEGA_COUNT = 50
DEFAULT_DIRECTION_COUNT = 7

BUILTIN_SCENARIOS = ("simplified", "sydney", "perth", "adelaide", "tasmania")


@dataclass(frozen=True)
class SeaState:
    hs: float           # significant wave height, m
    tp: float           # peak period, s
    occurrence: float   # probability

    def __post_init__(self):
        if not self.hs > 0:
            raise ValueError("hs must be strictly positive")
        if not self.tp > 0:
            raise ValueError("tp must be strictly positive")
        if not 0.0 <= self.occurrence <= 1.0:
            raise ValueError("occurrence must lie in [0, 1]")


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Trapezoid quadrature weights for a strictly increasing grid.

    A single-point grid gets weight 1 so that degenerate grids collapse the
    integral to a plain evaluation.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 1:
        return np.ones(1)
    w = np.empty_like(x)
    w[0] = (x[1] - x[0]) / 2.0
    w[-1] = (x[-1] - x[-2]) / 2.0
    w[1:-1] = (x[2:] - x[:-2]) / 2.0
    return w


@dataclass
class WaveScenario:
    """Sea states plus the directional and frequency discretisation."""

    name: str
    sea_states: tuple[SeaState, ...]
    direction_rad: np.ndarray       # (nb,) ascending
    spreading: np.ndarray           # (nb,) D(beta), 1/rad, integrates to 1
    omega: np.ndarray               # (nw,) ascending
    omega_weights: np.ndarray = field(default=None)  # trapezoid, computed if omitted
    direction_weights: np.ndarray = field(default=None)

    def __post_init__(self):
        self.direction_rad = np.asarray(self.direction_rad, dtype=float)
        self.spreading = np.asarray(self.spreading, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        if self.omega_weights is None:
            self.omega_weights = trapezoid_weights(self.omega)
        if self.direction_weights is None:
            self.direction_weights = trapezoid_weights(self.direction_rad)
        self.validate()

    def validate(self):
        if len(self.sea_states) < 1:
            raise ScenarioFormatError("sea_states: at least one sea state is required")
        occ = sum(s.occurrence for s in self.sea_states)
        if abs(occ - 1.0) > 1e-9:
            raise ScenarioFormatError(f"occurrence: probabilities sum to {occ!r}, expected 1")
        if self.direction_rad.size < 1:
            raise ScenarioFormatError("directions: at least one heading is required")
        if self.direction_rad.size > 1 and not np.all(np.diff(self.direction_rad) > 0):
            raise ScenarioFormatError("directions: headings must be strictly increasing")
        if np.any(self.spreading < 0):
            raise ScenarioFormatError("spreading: weights must be non-negative")
        dsum = float(np.sum(self.spreading * self.direction_weights))
        if abs(dsum - 1.0) > 1e-6:
            raise ScenarioFormatError(f"spreading: integral is {dsum!r}, expected 1")
        if self.omega.size < 1 or np.any(self.omega <= 0):
            raise ScenarioFormatError("frequencies: grid must be positive")
        if self.omega.size > 1 and not np.all(np.diff(self.omega) > 0):
            raise ScenarioFormatError("frequencies: grid must be strictly increasing")


def bretschneider_spectrum(hs: float, tp: float, omega) -> np.ndarray:
    """Two-parameter Bretschneider spectral density, m^2 s/rad.

    S(omega) = (5/16) Hs^2 (omega_p^4 / omega^5) exp(-5 omega_p^4 / (4 omega^4))
    with omega_p = 2 pi / Tp.  Its zeroth moment is Hs^2 / 16.
    """
    w = np.asarray(omega, dtype=float)
    if not hs > 0 or not tp > 0 or np.any(w <= 0):
        raise ValueError("hs, tp and omega must be strictly positive")
    wp = 2.0 * np.pi / tp
    return (5.0 / 16.0) * hs**2 * (wp**4 / w**5) * np.exp(-5.0 * wp**4 / (4.0 * w**4))


# -- power integration ------------------------------------------------------

def _spectral_row_weights(scenario: WaveScenario, states: tuple[SeaState, ...]) -> np.ndarray:
    """Combined per-frequency weights 2 sum_s O_s S_s(omega) dOmega."""
    c = np.zeros_like(scenario.omega)
    for s in states:
        c += s.occurrence * bretschneider_spectrum(s.hs, s.tp, scenario.omega)
    return 2.0 * c * scenario.omega_weights


def _integrate(grid: np.ndarray, scenario: WaveScenario, row_weights: np.ndarray) -> np.ndarray:
    """Reduce a (n_omega, N, n_beta) power grid to per-buoy power."""
    over_omega = np.tensordot(row_weights, grid, axes=(0, 0))        # (N, nb)
    dir_w = scenario.spreading * scenario.direction_weights
    return over_omega @ dir_w                                        # (N,)


def sea_state_power_breakdown(layout, params: WecParameters, sea_state: SeaState,
                              scenario: WaveScenario,
                              kernel: PointAbsorberKernel | None = None) -> np.ndarray:
    positions = layout.positions if isinstance(layout, Layout) else np.asarray(layout, dtype=float)
    grid = regular_power_grid(positions, params, scenario.omega, scenario.direction_rad, kernel)
    unit = SeaState(sea_state.hs, sea_state.tp, 1.0)
    return _integrate(grid, scenario, _spectral_row_weights(scenario, (unit,)))


def sea_state_power(layout, params: WecParameters, sea_state: SeaState,
                    scenario: WaveScenario,
                    kernel: PointAbsorberKernel | None = None) -> float:
    """Farm power in one sea state, W (occurrence not applied)."""
    return float(sea_state_power_breakdown(layout, params, sea_state, scenario, kernel).sum())


def annual_power_breakdown(layout, params: WecParameters, scenario: WaveScenario,
                           kernel: PointAbsorberKernel | None = None) -> np.ndarray:
    """Per-buoy annual average power, W."""
    positions = layout.positions if isinstance(layout, Layout) else np.asarray(layout, dtype=float)
    grid = regular_power_grid(positions, params, scenario.omega, scenario.direction_rad, kernel)
    return _integrate(grid, scenario, _spectral_row_weights(scenario, scenario.sea_states))


def annual_average_power(layout, params: WecParameters, scenario: WaveScenario,
                         kernel: PointAbsorberKernel | None = None) -> float:
    """Occurrence-weighted annual average power of the farm, W."""
    return float(annual_power_breakdown(layout, params, scenario, kernel).sum())


def isolated_annual_power(params: WecParameters, scenario: WaveScenario,
                          kernel: PointAbsorberKernel | None = None) -> float:
    """Annual average power of a single converter (position-independent)."""
    return annual_average_power(np.zeros((1, 2)), params, scenario, kernel)


@dataclass(frozen=True)
class QFactorReport:
    annual_power: float
    isolated_power: float
    n_buoys: int
    q: float


def q_factor(annual_power: float, n_buoys: int, isolated_power: float) -> QFactorReport:
    """Interaction factor q = P_annual / (N * P_isolated); q > 1 is constructive."""
    if n_buoys < 1:
        raise ValueError("n_buoys must be at least 1")
    if not isolated_power > 0:
        raise ValueError("isolated_power must be strictly positive")
    return QFactorReport(annual_power=annual_power, isolated_power=isolated_power,
                         n_buoys=n_buoys, q=annual_power / (n_buoys * isolated_power))


# -- scenario files ----------------------------------------------------------

def _parse_row(text: str, n_fields: int, path: str, lineno: int) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n_fields:
        raise ScenarioFormatError(f"{path}:{lineno}: expected {n_fields} comma-separated values")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ScenarioFormatError(f"{path}:{lineno}: {exc}") from None


def parse_scenario(text: str, name: str, origin: str = "<string>") -> WaveScenario:
    sections = {"seastates": [], "directions": [], "frequencies": []}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in sections:
                raise ScenarioFormatError(f"{origin}:{lineno}: unknown section [{current}]")
            continue
        if current is None:
            raise ScenarioFormatError(f"{origin}:{lineno}: data before any section header")
        n_fields = {"seastates": 3, "directions": 2, "frequencies": 1}[current]
        sections[current].append((lineno, _parse_row(line, n_fields, origin, lineno)))

    if not sections["seastates"]:
        raise ScenarioFormatError(f"{origin}: empty [seastates] table")
    if not sections["directions"]:
        raise ScenarioFormatError(f"{origin}: empty [directions] table")
    if not sections["frequencies"]:
        raise ScenarioFormatError(f"{origin}: empty [frequencies] table")

    occ = np.array([row[2] for _, row in sections["seastates"]], dtype=float)
    if np.any(occ < 0):
        raise ScenarioFormatError(f"{origin}: occurrence: negative probability")
    total = occ.sum()
    if total <= 0:
        raise ScenarioFormatError(f"{origin}: occurrence: probabilities sum to zero")
    if abs(total - 1.0) > 1e-9:
        if abs(total - 1.0) > 1e-6:
            warnings.warn(f"{origin}: occurrence probabilities sum to {total:.6g}; renormalizing")
        occ = occ / total
    states = tuple(SeaState(hs=row[0], tp=row[1], occurrence=float(o))
                   for (_, row), o in zip(sections["seastates"], occ))

    beta_deg = np.array([row[0] for _, row in sections["directions"]], dtype=float)
    spread = np.array([row[1] for _, row in sections["directions"]], dtype=float)
    order = np.argsort(beta_deg, kind="stable")
    beta_rad = np.deg2rad(beta_deg[order])
    spread = spread[order]
    dir_w = trapezoid_weights(beta_rad)
    norm = float(np.sum(spread * dir_w))
    if norm <= 0:
        raise ScenarioFormatError(f"{origin}: spreading: weights integrate to zero")
    spread = spread / norm

    omega = np.array([row[0] for _, row in sections["frequencies"]], dtype=float)

    return WaveScenario(name=name, sea_states=states, direction_rad=beta_rad,
                        spreading=spread, omega=omega)


def load_scenario(path) -> WaveScenario:
    """Load a scenario file (see the shipped files for the format)."""
    if isinstance(path, str) and path in BUILTIN_SCENARIOS:
        return builtin_scenario(path)
    p = Path(path)
    return parse_scenario(p.read_text(encoding="utf-8"), name=p.stem, origin=str(p))


def write_scenario(scenario: WaveScenario, path) -> None:
    lines = ["[seastates]", "# Hs_m,Tp_s,occurrence"]
    lines += [f"{s.hs!r},{s.tp!r},{s.occurrence!r}" for s in scenario.sea_states]
    lines += ["", "[directions]", "# beta_deg,weight"]
    lines += [f"{np.rad2deg(b)!r},{d!r}" for b, d in zip(scenario.direction_rad, scenario.spreading)]
    lines += ["", "[frequencies]", "# omega_rad_s"]
    lines += [f"{w!r}" for w in scenario.omega]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def default_omega_grid() -> np.ndarray:
    return np.linspace(*DEFAULT_OMEGA_RANGE, DEFAULT_OMEGA_COUNT)


def default_direction_grid() -> tuple[np.ndarray, np.ndarray]:
    """Headings uniform over [0, 180) degrees with uniform spreading."""
    beta = np.deg2rad(np.arange(DEFAULT_DIRECTION_COUNT) * 180.0 / DEFAULT_DIRECTION_COUNT)
    spread = np.ones_like(beta)
    spread /= np.sum(spread * trapezoid_weights(beta))
    return beta, spread


def simplified_scenario() -> WaveScenario:
    """Single design sea state (Hs = 2 m, Tp = 9 s) on the default grids."""
    beta, spread = default_direction_grid()
    return WaveScenario(name="simplified",
                        sea_states=(SeaState(hs=2.0, tp=9.0, occurrence=1.0),),
                        direction_rad=beta, spreading=spread,
                        omega=default_omega_grid())


def builtin_scenario(name: str) -> WaveScenario:
    """One of the shipped scenarios: simplified or a synthetic example site."""
    if name not in BUILTIN_SCENARIOS:
        raise ScenarioFormatError(
            f"unknown builtin scenario {name!r}; choose from {', '.join(BUILTIN_SCENARIOS)}")
    text = resources.files("wecopt.scenarios").joinpath(f"{name}.csv").read_text(encoding="utf-8")
    return parse_scenario(text, name=name, origin=f"builtin:{name}")
