"""Concurrence after one e-p scattering over beam momentum and polar angle.

Writes ``single_map.csv`` (p, theta, concurrence) and prints the reflected
optimum.  Usage: python scripts/single_map.py [outdir]
"""

import math
import sys
from pathlib import Path

from helicity_cascade.relkin import ScatterGeometry
from helicity_cascade.serialize import write_grid_csv
from helicity_cascade.sweep import (Scenario, default_p_axis, default_theta_axis,
                                    optimize_momentum, single_scatter_map)


def main(outdir="."):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for label, initial in (("01", (1, -1)), ("00", (1, 1))):
        grid = single_scatter_map(default_p_axis(), default_theta_axis(), initial)
        write_grid_csv(grid, out / f"single_map_{label}.csv")
        print(f"|{label}>: grid max {grid.max():.6f} at {grid.argmax()}")
    rep = optimize_momentum(Scenario(ScatterGeometry.single(math.pi), (1, -1)), (1.0, 100.0))
    print(f"reflected optimum p = {rep.p_opt:.4f} MeV, C = {rep.c_max:.12f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
