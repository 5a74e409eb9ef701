"""Single-scattering maps for several projectile/target mass ratios.

Writes one ``mass_ratio_<r>.csv`` per ratio and ``mass_ratio_summary.json``
with the optimal momentum and the angular width where max_p C > 0.5.
"""

import sys
from pathlib import Path

from helicity_cascade.serialize import write_grid_csv, write_report_json
from helicity_cascade.sweep import DEFAULT_RATIOS, mass_ratio_scan


def main(outdir="."):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    grids = mass_ratio_scan(DEFAULT_RATIOS)
    rows = []
    for grid in grids:
        ratio = grid.metadata["ratio"]
        write_grid_csv(grid, out / f"mass_ratio_{ratio:.6g}.csv")
        rows.append({"ratio": ratio, "p_opt": grid.metadata["p_opt"],
                     "width": grid.metadata["width"]})
        print(f"m/M = {ratio:.6g}: p_opt = {rows[-1]['p_opt']:.2f} MeV, "
              f"width = {rows[-1]['width']:.3f} rad")
    write_report_json({"kind": "mass-scan", "ratios": rows}, out / "mass_ratio_summary.json")


if __name__ == "__main__":
    main(*sys.argv[1:])
