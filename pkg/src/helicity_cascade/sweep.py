"""Parameter scans and momentum optimisation over scattering scenarios."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .cascade import (CoefficientTensor, cascade_coefficients, density_matrix,
                      partial_trace, register_labels)
from .entangle import concurrence, pure_bipartite_concurrence, pure_pair_concurrence
from .errors import KinematicallyForbidden, NoInteriorMaximum
from .relkin import M_ELECTRON, M_PROTON, ScatterGeometry, build_cascade

THREADS_ENV = "HELICITY_CASCADE_THREADS"
PARALLEL_THRESHOLD = 2000

DEFAULT_P_POINTS = 200
DEFAULT_ANGLE_POINTS = 101
DEFAULT_RATIOS = (M_ELECTRON / M_PROTON, 0.1, 0.5, 1.0)


@dataclass(frozen=True)
class Measure:
    """Which entanglement quantity to read off a cascade state.

    ``side_a`` of length two with ``bipartition=False`` is a Wootters pair;
    otherwise the I-concurrence of ``side_a`` against the rest.
    """

    side_a: tuple[str, ...]
    bipartition: bool = False

    @classmethod
    def parse(cls, text: str) -> "Measure":
        """``"p1,p2"`` for a pair, ``"t|rest"`` or ``"t|p1,p2"`` for a cut."""
        text = text.strip().removeprefix("C[").removesuffix("]")
        if "|" in text:
            left = tuple(x.strip() for x in text.split("|", 1)[0].split(",") if x.strip())
            if not left:
                raise ValueError(f"empty side in measure {text!r}")
            return cls(left, True)
        labels = tuple(x.strip() for x in text.split(",") if x.strip())
        if len(labels) != 2:
            raise ValueError(f"pair measure needs two labels, got {text!r}")
        return cls(labels, False)

    @classmethod
    def default(cls, n: int) -> "Measure":
        if n == 1:
            return cls(("t", "p1"))
        if n == 2:
            return cls(("p1", "p2"))
        return cls(("t",), True)

    def validate(self, n: int) -> None:
        labels = set(register_labels(n))
        missing = set(self.side_a) - labels
        if missing:
            raise ValueError(f"measure labels {sorted(missing)} not in register {sorted(labels)}")
        if self.bipartition and set(self.side_a) == labels:
            raise ValueError("bipartition side must leave a complement")

    def label(self, n: int) -> str:
        if not self.bipartition:
            return f"C[{self.side_a[0]},{self.side_a[1]}]"
        rest = [x for x in register_labels(n) if x not in self.side_a]
        return f"C[{','.join(self.side_a)}|{','.join(rest)}]"

    def evaluate(self, state) -> float:
        """Value on a CoefficientTensor (preferred, pure) or a DensityMatrix."""
        if self.bipartition:
            return pure_bipartite_concurrence(state, self.side_a)
        if isinstance(state, CoefficientTensor):
            return pure_pair_concurrence(state, *self.side_a)
        return concurrence(partial_trace(state, set(self.side_a)))


@dataclass(frozen=True)
class Scenario:
    geometry: ScatterGeometry
    initial: tuple[int, ...]
    m: float = M_ELECTRON
    M: float = M_PROTON
    measure: Measure | None = None

    @property
    def n(self) -> int:
        return self.geometry.n

    @property
    def resolved_measure(self) -> Measure:
        return self.measure or Measure.default(self.n)

    def coefficients(self, p: float) -> CoefficientTensor:
        kin = build_cascade(p, self.m, self.M, self.geometry)
        return cascade_coefficients(kin, self.initial)

    def state(self, p: float):
        return density_matrix(self.coefficients(p))

    def value(self, p: float) -> float:
        """Concurrence at beam momentum ``p``; NaN where the geometry is forbidden."""
        try:
            coeffs = self.coefficients(p)
        except KinematicallyForbidden:
            return math.nan
        return self.resolved_measure.evaluate(coeffs)


@dataclass
class ScanGrid:
    axes: dict[str, np.ndarray]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axes = {k: np.asarray(v, dtype=float) for k, v in self.axes.items()}
        shape = tuple(len(v) for v in self.axes.values())
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} != axes {shape}")
        for name, ax in self.axes.items():
            if len(ax) == 0:
                raise ValueError(f"axis {name} is empty")
            if np.any(np.diff(ax) <= 0):
                raise ValueError(f"axis {name} is not strictly increasing")

    def max(self) -> float:
        return float(np.nanmax(self.values))

    def argmax(self) -> dict[str, float]:
        idx = np.unravel_index(np.nanargmax(self.values), self.values.shape)
        return {name: float(ax[i]) for (name, ax), i in zip(self.axes.items(), idx)}


@dataclass
class OptimumReport:
    p_opt: float
    c_max: float
    geometry: ScatterGeometry
    measure: str
    bracket_widths: list[float]
    coarse_bracket: tuple[float, float]


def worker_count() -> int:
    cpus = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, min(int(raw), cpus))
        except ValueError:
            pass
    return cpus


def _eval_point(point: tuple[float, tuple[tuple[float, float], ...]],
                initial, m, M, measure) -> float:
    p, angles = point
    return Scenario(ScatterGeometry(angles), initial, m, M, measure).value(p)


def parallel_map(func: Callable, points: Sequence, workers: int | None = None) -> list:
    """Order-preserving map, split across processes for large inputs."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(points) < PARALLEL_THRESHOLD:
        return [func(x) for x in points]
    chunk = max(1, len(points) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, points, chunksize=chunk))


def _scan(points, shape, initial, m, M, measure, workers=None) -> np.ndarray:
    func = partial(_eval_point, initial=tuple(initial), m=m, M=M, measure=measure)
    return np.array(parallel_map(func, points, workers), dtype=float).reshape(shape)


def default_p_axis(points: int = DEFAULT_P_POINTS, stop: float = 100.0) -> np.ndarray:
    return np.linspace(stop / points, stop, points)


def default_theta_axis(points: int = DEFAULT_ANGLE_POINTS) -> np.ndarray:
    return np.linspace(0.9 * math.pi, math.pi, points)


def _meta(initial, m, M, **extra) -> dict:
    return {"initial": list(initial), "m": m, "M": M, **extra}


def single_scatter_map(p_axis, theta_axis, initial=(1, -1), m=M_ELECTRON,
                       M=M_PROTON, workers=None) -> ScanGrid:
    """Concurrence of the two-qubit state after one scattering on a (p, theta) grid."""
    p_axis = np.asarray(p_axis, dtype=float)
    theta_axis = np.asarray(theta_axis, dtype=float)
    points = [(float(p), ((float(th), 0.0),)) for p in p_axis for th in theta_axis]
    values = _scan(points, (len(p_axis), len(theta_axis)), initial, m, M,
                   Measure(("t", "p1")), workers)
    return ScanGrid({"p": p_axis, "theta": theta_axis}, values,
                    _meta(initial, m, M, scenario="single", measure="C[t,p1]"))


def double_scatter_map(p, theta1_axis, theta2_axis, dphi_axis, initial=(1, -1, -1),
                       m=M_ELECTRON, M=M_PROTON, workers=None) -> ScanGrid:
    """C[p1,p2] after two scatterings, over (theta1, theta2, delta phi) at fixed p."""
    axes = [np.asarray(a, dtype=float) for a in (theta1_axis, theta2_axis, dphi_axis)]
    points = [(float(p), ((float(t1), 0.0), (float(t2), float(dp) % (2 * math.pi))))
              for t1 in axes[0] for t2 in axes[1] for dp in axes[2]]
    values = _scan(points, tuple(len(a) for a in axes), initial, m, M,
                   Measure(("p1", "p2")), workers)
    return ScanGrid({"theta1": axes[0], "theta2": axes[1], "dphi": axes[2]}, values,
                    _meta(initial, m, M, scenario="double", p=float(p),
                          measure="C[p1,p2]"))


def momentum_curve(scenario: Scenario, p_axis, workers=None) -> np.ndarray:
    p_axis = np.asarray(p_axis, dtype=float)
    points = [(float(p), scenario.geometry.angles) for p in p_axis]
    return _scan(points, (len(p_axis),), scenario.initial, scenario.m, scenario.M,
                 scenario.resolved_measure, workers)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-4, max_iter: int = 200):
    """Maximise a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x), widths)`` where ``widths`` records the bracket width
    before each shrink.
    """
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    widths = [b - a]
    for _ in range(max_iter):
        if b - a < tol:
            break
        # ties keep the lower half: deterministic preference for smaller p
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        widths.append(b - a)
    x = c if fc >= fd else d
    return x, max(fc, fd), widths


def optimize_momentum(scenario: Scenario, p_bracket: tuple[float, float],
                      coarse_points: int = 41, tol: float = 1e-4) -> OptimumReport:
    """Coarse momentum scan followed by golden-section refinement."""
    lo, hi = map(float, p_bracket)
    if not 0 < lo < hi:
        raise ValueError(f"bad momentum bracket {p_bracket}")
    if coarse_points < 3:
        raise ValueError("coarse scan needs at least 3 points")
    grid = np.linspace(lo, hi, coarse_points)
    coarse = np.array([scenario.value(p) for p in grid])
    if np.all(np.isnan(coarse)):
        raise KinematicallyForbidden("geometry forbidden across the whole bracket")
    filled = np.where(np.isnan(coarse), -np.inf, coarse)
    i = int(np.argmax(filled))
    if i == 0 or i == coarse_points - 1:
        raise NoInteriorMaximum(
            f"concurrence peaks at the bracket edge p={grid[i]:.6g} MeV")

    def objective(p):
        v = scenario.value(p)
        return -math.inf if math.isnan(v) else v

    sub = (float(grid[i - 1]), float(grid[i + 1]))
    p_opt, c_max, widths = golden_section_max(objective, *sub, tol=tol)
    if filled[i] > c_max:
        p_opt, c_max = float(grid[i]), float(filled[i])
    return OptimumReport(float(p_opt), float(c_max), scenario.geometry,
                         scenario.resolved_measure.label(scenario.n), widths, sub)


def analytic_popt(m: float, M: float) -> float:
    """Small-mass-ratio expansion of the optimal beam momentum for reflection."""
    if not 0 < m <= M:
        raise ValueError("need 0 < m <= M")
    return math.sqrt(M * m / 2) * (1 - math.sqrt(m / (2 * M)))


def angular_width(theta_axis: np.ndarray, peak: np.ndarray, level: float = 0.5) -> float:
    """Angular aperture below pi where the best concurrence over p exceeds ``level``."""
    above = np.asarray(theta_axis)[np.nan_to_num(peak, nan=0.0) > level]
    return float(math.pi - above.min()) if above.size else 0.0


def mass_ratio_scan(ratios=DEFAULT_RATIOS, theta_set=None, p_axis=None, M=M_PROTON,
                    initial=(1, -1), workers=None) -> list[ScanGrid]:
    """One (p, theta) grid per projectile/target mass ratio.

    Each grid's metadata carries the optimal momentum of the reflected
    geometry and the angular width where ``max_p C > 0.5``.
    """
    theta_set = (np.linspace(0.5 * math.pi, math.pi, 26)
                 if theta_set is None else np.asarray(theta_set, dtype=float))
    p_axis = (np.geomspace(0.5, 20000.0, 200)
              if p_axis is None else np.asarray(p_axis, dtype=float))
    grids = []
    for ratio in ratios:
        if not 0 < ratio <= 1:
            raise ValueError(f"mass ratio {ratio} outside (0, 1]")
        m = ratio * M
        grid = single_scatter_map(p_axis, theta_set, initial, m, M, workers)
        peak = np.nanmax(np.where(np.isnan(grid.values), -1.0, grid.values), axis=0)
        row = grid.values[:, -1]
        j = int(np.nanargmax(row))
        lo, hi = p_axis[max(j - 1, 0)], p_axis[min(j + 1, len(p_axis) - 1)]
        scenario = Scenario(ScatterGeometry.single(float(theta_set[-1])), tuple(initial), m, M)
        # the grid neighbours of the row maximum bracket the true peak
        p_opt, _, _ = golden_section_max(
            lambda p: np.nan_to_num(scenario.value(p), nan=-1.0), float(lo), float(hi),
            tol=1e-4 * max(1.0, float(hi - lo)))
        grid.metadata.update(scenario="mass-ratio", ratio=float(ratio),
                             p_opt=p_opt, width=angular_width(theta_set, peak),
                             peak_over_p=[float(x) for x in peak])
        grids.append(grid)
    return grids


def triple_scatter_curves(p_axis, initial=(1, -1, -1, -1), m=M_ELECTRON, M=M_PROTON,
                          dphi: float = math.pi, workers=None) -> dict[str, ScanGrid]:
    """Every projectile-pair concurrence and the target-vs-projectiles curve.

    All three projectiles are reflected (theta = pi).
    """
    p_axis = np.asarray(p_axis, dtype=float)
    geometry = ScatterGeometry.reflected(3, dphi)
    labels = register_labels(3)
    measures = [Measure(pair) for pair in
                [(a, b) for i, a in enumerate(labels[1:]) for b in labels[i + 2:]]]
    measures.append(Measure(("t",), True))
    out = {}
    for measure in measures:
        sc = Scenario(geometry, tuple(initial), m, M, measure)
        name = measure.label(3)
        out[name] = ScanGrid({"p": p_axis}, momentum_curve(sc, p_axis, workers),
                             _meta(initial, m, M, scenario="triple", measure=name))
    return out

