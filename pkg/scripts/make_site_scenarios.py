#!/usr/bin/env python3
"""Regenerate the scenario files shipped in src/wecopt/scenarios/.

The simplified scenario is the single design sea state on the default grids.
The four site files are synthetic examples shaped like southern-Australian
wave climates (multi-modal direction roses, 20-entry scatter tables); they
are NOT measured data.  Real site files in the same format load the same way.
"""

from pathlib import Path

import numpy as np

from wecopt.climate import (default_direction_grid, default_omega_grid,
                            simplified_scenario)

OUT = Path(__file__).resolve().parent.parent / "src" / "wecopt" / "scenarios"


def _rose(centers_deg, widths_deg, heights, n_dirs, span=(0.0, 360.0)):
    """Multi-modal directional rose from Gaussian bumps, unnormalized."""
    beta = np.linspace(span[0], span[1], n_dirs, endpoint=False)
    weight = np.full_like(beta, 0.02)
    for c, w, h in zip(centers_deg, widths_deg, heights):
        d = (beta - c + 180.0) % 360.0 - 180.0
        weight += h * np.exp(-0.5 * (d / w) ** 2)
    return beta, weight


def _scatter(rng, hs_mode, tp_mode, hs_spread, tp_spread, n=20):
    """Synthetic 20-entry scatter table around a modal sea state."""
    hs = np.round(np.clip(rng.normal(hs_mode, hs_spread, n), 0.5, 8.0), 2)
    tp = np.round(np.clip(rng.normal(tp_mode, tp_spread, n), 4.0, 18.0), 2)
    occ = rng.gamma(2.0, 1.0, n)
    occ = occ / occ.sum()
    return hs, tp, occ


def _write(path, hs, tp, occ, beta, weight, omega, note):
    lines = [f"# {note}", "# synthetic example data, not measurements", "",
             "[seastates]", "# Hs_m,Tp_s,occurrence"]
    lines += [f"{float(h)!r},{float(t)!r},{float(o)!r}" for h, t, o in zip(hs, tp, occ)]
    lines += ["", "[directions]", "# beta_deg,weight"]
    lines += [f"{b:.2f},{w:.6f}" for b, w in zip(beta, weight)]
    lines += ["", "[frequencies]", "# omega_rad_s"]
    lines += [f"{w:.10g}" for w in omega]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    omega = default_omega_grid()

    simple = simplified_scenario()
    beta, weight = default_direction_grid()
    _write(OUT / "simplified.csv",
           [s.hs for s in simple.sea_states], [s.tp for s in simple.sea_states],
           [s.occurrence for s in simple.sea_states],
           np.rad2deg(beta), weight, omega,
           "single design sea state, uniform spreading over a half circle")

    sites = {
        # name: (rose bumps, scatter mode, rng seed)
        "sydney": (([135.0, 190.0], [25.0, 40.0], [1.0, 0.6]), (2.0, 9.0, 0.7, 1.8), 11),
        "perth": (([232.5], [18.0], [1.0]), (2.4, 10.5, 0.5, 1.2), 12),
        "adelaide": (([210.0, 250.0], [15.0, 20.0], [1.0, 0.8]), (2.2, 10.0, 0.5, 1.5), 13),
        "tasmania": (([240.0], [12.0], [1.0]), (3.4, 11.5, 0.8, 1.5), 14),
    }
    for name, (bumps, scatter, seed) in sites.items():
        rng = np.random.default_rng(seed)
        beta, weight = _rose(*bumps, n_dirs=15)
        hs, tp, occ = _scatter(rng, *scatter)
        _write(OUT / f"{name}.csv", hs, tp, occ, beta, weight, omega,
               f"synthetic site shaped like a {name} wave climate")


if __name__ == "__main__":
    main()
