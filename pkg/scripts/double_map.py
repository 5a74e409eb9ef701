"""Electron-electron concurrence after two scatterings at fixed momentum.

Scans (theta1, theta2, dphi) near reflection at the two-scattering optimum
and writes ``double_map.csv``.  Pass a point count per axis as the second
argument (default 41; 101 reproduces the full-resolution grid).
"""

import math
import sys
from pathlib import Path

import numpy as np

from helicity_cascade.relkin import ScatterGeometry
from helicity_cascade.serialize import write_grid_csv
from helicity_cascade.sweep import Scenario, double_scatter_map, optimize_momentum


def main(outdir=".", points="41"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    n = int(points)
    rep = optimize_momentum(Scenario(ScatterGeometry.reflected(2), (1, -1, -1)), (5.0, 150.0))
    print(f"two-scattering optimum p = {rep.p_opt:.4f} MeV, C[p1,p2] = {rep.c_max:.5f}")
    theta = np.linspace(0.9 * math.pi, math.pi, n)
    grid = double_scatter_map(rep.p_opt, theta, theta, np.linspace(0.0, math.pi, n))
    write_grid_csv(grid, out / "double_map.csv")
    print(f"grid max {grid.max():.5f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
