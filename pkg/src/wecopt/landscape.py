"""Two-buoy surrogate power landscape and search-sector extraction.

The sequential placement heuristics steer each new buoy using a table of
annual power for a pair of buoys: one at the origin of an unbounded plane,
the other at every (angle, distance) cell of a polar grid.  The table is
cheap (two-buoy evaluations only), built once per wave scenario, and metered
separately from the optimizer budget.

Sector extraction comes in two flavours: the coarse pattern spans the region
between the best and second-best cells mirrored to both sides of the anchor
buoy; the automated variant returns a single sector between the two best
cells of a fine table, capped at 300 m radially.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .climate import WaveScenario, annual_average_power, bretschneider_spectrum
from .errors import DegenerateLandscapeError, ScenarioFormatError
from .fitness import DEFAULT_MIN_SEPARATION
from .hydro import GRAVITY, PointAbsorberKernel, WecParameters

MAX_SECTOR_RADIUS = 300.0

COARSE_ANGULAR_RES = 45.0
COARSE_RADIAL_RES = 5.0
FINE_ANGULAR_RES = 5.0
FINE_RADIAL_RES = 5.0
DEFAULT_RADIAL_RANGE = (50.0, 300.0)


@dataclass
class SurrogateLandscape:
    angles_deg: np.ndarray          # (na,) ascending, in [0, 360)
    distances_m: np.ndarray         # (nd,) ascending, >= R'
    power: np.ndarray               # (na, nd) W, >= 0
    scenario_name: str
    evaluations: int = 0            # two-buoy evaluations spent building it

    @property
    def angular_res(self) -> float:
        return float(self.angles_deg[1] - self.angles_deg[0]) if self.angles_deg.size > 1 else 360.0

    @property
    def radial_res(self) -> float:
        return float(self.distances_m[1] - self.distances_m[0]) if self.distances_m.size > 1 else 0.0


@dataclass(frozen=True)
class SearchSector:
    """Angular/radial region relative to the most recently placed buoy."""

    angle_low: float      # degrees; may be negative or exceed 360 to express wrap
    angle_high: float
    radial_low: float     # m
    radial_high: float
    anchor_relative: bool = True

    def __post_init__(self):
        if not self.angle_low < self.angle_high:
            raise ValueError("angle range must have positive width")
        if not self.radial_low < self.radial_high:
            raise ValueError("radial range must have positive width")
        if self.radial_low < DEFAULT_MIN_SEPARATION:
            raise ValueError("radial range must start at or above the safety distance")

    def mirrored(self) -> "SearchSector":
        return SearchSector(self.angle_low + 180.0, self.angle_high + 180.0,
                            self.radial_low, self.radial_high)


@dataclass(frozen=True)
class SectorExtraction:
    sectors: tuple[SearchSector, ...]
    best_angle: float      # degrees, in [0, 360)
    best_distance: float   # m


def build_two_buoy_landscape(params: WecParameters, scenario: WaveScenario,
                             angular_res: float = COARSE_ANGULAR_RES,
                             radial_res: float = COARSE_RADIAL_RES,
                             r_range: tuple[float, float] = DEFAULT_RADIAL_RANGE,
                             kernel: PointAbsorberKernel | None = None) -> SurrogateLandscape:
    """Sample annual power of a two-buoy pair over a polar grid.

    The first buoy sits at the origin of an unbounded plane; the second visits
    every (angle, distance) cell.  Cells are evaluated with the same annual
    power pipeline the optimizers use, so the table is exact for pairs.
    """
    if not angular_res > 0 or not radial_res > 0:
        raise ValueError("resolutions must be strictly positive")
    if r_range[0] < DEFAULT_MIN_SEPARATION:
        raise ValueError("radial range must start at or above the safety distance")
    if not r_range[0] <= r_range[1]:
        raise ValueError("radial range must be ordered")

    angles = np.arange(0.0, 360.0, angular_res)
    n_rad = int(round((r_range[1] - r_range[0]) / radial_res)) + 1
    distances = r_range[0] + radial_res * np.arange(n_rad)

    table = np.empty((angles.size, distances.size))
    for i, ang in enumerate(np.deg2rad(angles)):
        for j, d in enumerate(distances):
            pair = np.array([[0.0, 0.0], [d * np.cos(ang), d * np.sin(ang)]])
            table[i, j] = annual_average_power(pair, params, scenario, kernel)
    return SurrogateLandscape(angles_deg=angles, distances_m=distances, power=table,
                              scenario_name=scenario.name,
                              evaluations=int(angles.size * distances.size))


def two_buoy_power_map(params: WecParameters, scenario: WaveScenario,
                       angles_deg: np.ndarray, distances_m: np.ndarray) -> np.ndarray:
    """Closed-form two-buoy power table for the point-absorber kernel.

    Independent route used as an oracle and for dense brute-force sweeps: the
    per-DOF 2x2 system has eigenvectors (1, 1) and (1, -1), giving the summed
    squared response

        |y1|^2 + |y2|^2 = f0^2 [ (1 + cos psi) / |hd + hc|^2
                               + (1 - cos psi) / |hd - hc|^2 ]

    with psi = k d cos(angle - beta), hd the isolated dynamics and hc the
    cross-coupling.  No linear solves are involved.
    """
    kernel = PointAbsorberKernel()
    ang = np.deg2rad(np.asarray(angles_deg, dtype=float))
    d = np.asarray(distances_m, dtype=float)
    w = scenario.omega
    k = w**2 / GRAVITY

    a_iso = kernel.isolated_added_mass(params)
    b_iso = kernel.isolated_damping(params, w)
    f0 = kernel.excitation_magnitude(params, w)
    hd = (-(params.mass + a_iso) * w**2
          + 1j * w * (b_iso + params.pto_damping) + params.pto_stiffness)

    kd = k[:, None] * d[None, :]                    # (nw, nd)
    b_c = b_iso[:, None] * np.sinc(kd / np.pi)
    a_c = -(b_iso / w)[:, None] * np.cos(kd) / kd
    hc = -a_c * w[:, None]**2 + 1j * w[:, None] * b_c

    c = np.zeros_like(w)
    for s in scenario.sea_states:
        c += s.occurrence * bretschneider_spectrum(s.hs, s.tp, w)
    row_w = 2.0 * c * scenario.omega_weights * w**2 * params.pto_damping

    inv_plus = 1.0 / np.abs(hd[:, None] + hc) ** 2   # (nw, nd)
    inv_minus = 1.0 / np.abs(hd[:, None] - hc) ** 2

    table = np.zeros((ang.size, d.size))
    dir_w = scenario.spreading * scenario.direction_weights
    for beta, wt in zip(scenario.direction_rad, dir_w):
        cospsi = np.cos(kd[:, :, None] * np.cos(ang - beta)[None, None, :])
        s2 = (f0[:, None]**2)[:, :, None] * ((1.0 + cospsi) * inv_plus[:, :, None]
                                             + (1.0 - cospsi) * inv_minus[:, :, None])
        table += wt * np.tensordot(row_w, s2, axes=(0, 0)).T
    return table


def _top_two_cells(landscape: SurrogateLandscape):
    """Best and second-best cells, quotienting the pair-exchange symmetry.

    Swapping the two buoys maps a cell at angle a to a + 180 with identical
    power, so every cell in the lower half plane duplicates one in the upper
    half.  Candidates are therefore restricted to angles in [0, 180); without
    this the second-best cell is always the mirror of the best and the sector
    degenerates to a half plane.
    """
    half = landscape.angles_deg < 180.0
    if not np.any(half):
        half = np.ones(landscape.angles_deg.size, dtype=bool)
    table = landscape.power[half]
    if np.max(table) - np.min(table) <= 0.0:
        raise DegenerateLandscapeError("two-buoy power table is flat")
    best_flat = int(np.argmax(table))                # first max: lowest angle, then distance
    i1, j1 = np.unravel_index(best_flat, table.shape)
    masked = table.copy()
    masked[i1, j1] = -np.inf
    i2, j2 = np.unravel_index(int(np.argmax(masked)), table.shape)
    return (int(i1), int(j1)), (int(i2), int(j2))


def _angle_span(a1: float, a2: float) -> tuple[float, float]:
    """Shortest-way angular interval between two grid angles, degrees."""
    lo, hi = sorted((a1, a2))
    if hi - lo > 180.0:
        lo, hi = hi, lo + 360.0
    return lo, hi


def extract_search_sectors(landscape: SurrogateLandscape, mode: str) -> SectorExtraction:
    """Derive search sectors from the two top cells of the table.

    mode "sls" returns the sector and its 180-degree mirror on the other side
    of the anchor; mode "auto" returns the single sector, radially capped at
    300 m.  The angular range always gets a one-grid-step margin on each side
    so that even two cells sharing an angle induce a sector with area; the
    radial range is widened only when degenerate.
    """
    if mode not in ("sls", "auto"):
        raise ValueError(f"unknown sector mode {mode!r}")
    (i1, j1), (i2, j2) = _top_two_cells(landscape)
    angles = landscape.angles_deg
    dists = landscape.distances_m
    a_step = landscape.angular_res
    r_step = landscape.radial_res if landscape.radial_res > 0 else 5.0

    best_angle = float(angles[i1])
    best_distance = float(dists[j1])

    lo, hi = _angle_span(float(angles[i1]), float(angles[i2]))
    lo, hi = lo - a_step, hi + a_step

    r_lo, r_hi = sorted((float(dists[j1]), float(dists[j2])))
    if r_hi - r_lo <= 0.0:
        r_lo, r_hi = r_lo - r_step, r_hi + r_step
    r_lo = max(DEFAULT_MIN_SEPARATION, r_lo)
    r_hi = min(MAX_SECTOR_RADIUS, r_hi)
    if r_hi <= r_lo:  # clipping collapsed the range
        r_lo = max(DEFAULT_MIN_SEPARATION, min(r_lo, MAX_SECTOR_RADIUS - r_step))
        r_hi = r_lo + r_step

    sector = SearchSector(lo, hi, r_lo, r_hi)
    sectors = (sector, sector.mirrored()) if mode == "sls" else (sector,)
    return SectorExtraction(sectors=sectors, best_angle=best_angle % 360.0,
                            best_distance=best_distance)


# -- cache file ---------------------------------------------------------------

def save_landscape(landscape: SurrogateLandscape, path) -> None:
    """Dump the table as angle_deg,distance_m,power_w rows with a metadata header."""
    lines = [f"# scenario={landscape.scenario_name} evaluations={landscape.evaluations}",
             "angle_deg,distance_m,power_w"]
    for i, ang in enumerate(landscape.angles_deg):
        for j, d in enumerate(landscape.distances_m):
            lines.append(f"{ang!r},{d!r},{landscape.power[i, j]!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_landscape(path) -> SurrogateLandscape:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise ScenarioFormatError(f"{path}:1: missing landscape metadata header")
    meta = dict(item.split("=", 1) for item in text[0][1:].split())
    rows = [line for line in text[1:] if line and not line.startswith(("angle_deg", "#"))]
    data = np.array([[float(v) for v in line.split(",")] for line in rows])
    angles = np.unique(data[:, 0])
    dists = np.unique(data[:, 1])
    if angles.size * dists.size != data.shape[0]:
        raise ScenarioFormatError(f"{path}: landscape table has holes")
    table = np.empty((angles.size, dists.size))
    ai = np.searchsorted(angles, data[:, 0])
    dj = np.searchsorted(dists, data[:, 1])
    table[ai, dj] = data[:, 2]
    return SurrogateLandscape(angles_deg=angles, distances_m=dists, power=table,
                              scenario_name=meta.get("scenario", "unknown"),
                              evaluations=int(meta.get("evaluations", 0)))
