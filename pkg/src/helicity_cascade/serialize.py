"""CSV and JSON writers for scan grids, optimum reports and state dumps."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from .errors import HelicityCascadeError
from .relkin import CascadeKinematics, FourMomentum
from .sweep import OptimumReport, ScanGrid


class OutputError(HelicityCascadeError, OSError):
    pass


def format_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        with open(path, "w", newline="") as fh:
            yield fh
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


def grid_rows(grid: ScanGrid):
    names = list(grid.axes)
    yield names + ["concurrence"]
    axes = list(grid.axes.values())
    for idx in itertools.product(*(range(len(a)) for a in axes)):
        coords = [format_real(float(a[i])) for a, i in zip(axes, idx)]
        yield coords + [format_real(float(grid.values[idx]))]


def grid_to_csv(grid: ScanGrid) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(grid_rows(grid))
    return buf.getvalue()


def write_grid_csv(grid: ScanGrid, path) -> None:
    """Header of axis names then ``concurrence``; one row per point, last axis fastest."""
    with _open_out(path) as fh:
        fh.write(grid_to_csv(grid))


def read_grid_csv(path) -> ScanGrid:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    names = header[:-1]
    data = np.array([[float(x) for x in row] for row in body])
    axes = {}
    for j, name in enumerate(names):
        # first-occurrence order equals the original axis order
        axes[name] = np.array(list(dict.fromkeys(data[:, j])))
    shape = tuple(len(a) for a in axes.values())
    return ScanGrid(axes, data[:, -1].reshape(shape))


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _clean(obj):
    """Recursively turn numpy/complex/tuple values into JSON-ready data."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps_report(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report_json(doc: dict, path) -> None:
    with _open_out(path) as fh:
        fh.write(dumps_report(doc))


def momentum_doc(p: FourMomentum) -> list[float]:
    return [p.E, p.px, p.py, p.pz]


def kinematics_doc(kin: CascadeKinematics) -> list[dict]:
    return [{"k_in": momentum_doc(s.k_in), "p_in": momentum_doc(s.p_in),
             "k_out": momentum_doc(s.k_out), "p_out": momentum_doc(s.p_out)}
            for s in kin]


def optimum_doc(report: OptimumReport, config: dict | None = None) -> dict:
    return {
        "kind": "optimum",
        "p_opt": report.p_opt,
        "c_max": report.c_max,
        "measure": report.measure,
        "geometry": [list(a) for a in report.geometry.angles],
        "coarse_bracket": list(report.coarse_bracket),
        "bracket_widths": report.bracket_widths,
        "config": config or {},
    }


def grid_summary_doc(grid: ScanGrid) -> dict:
    return {"axes": {k: v for k, v in grid.axes.items()},
            "max": grid.max(), "argmax": grid.argmax(), "metadata": grid.metadata}
