"""Command-line entry point: ``helicity-cascade <command> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 kinematically infeasible
fixed-point scenario.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import selftest
from .cascade import cascade_coefficients, density_matrix, partial_trace, purity
from .config import ScenarioConfig, build_config, index_to_helicity, load_config_file
from .entangle import monogamy_residual, pairwise_concurrences
from .errors import (ConfigError, KinematicallyForbidden, NoInteriorMaximum,
                     SingularKinematics)
from .relkin import ScatterGeometry, build_cascade
from .serialize import (OutputError, format_real, grid_to_csv, kinematics_doc,
                        optimum_doc, write_grid_csv, write_report_json)
from .sweep import (DEFAULT_ANGLE_POINTS, DEFAULT_RATIOS, Measure, Scenario, default_p_axis,
                    default_theta_axis, double_scatter_map, mass_ratio_scan,
                    optimize_momentum, single_scatter_map, triple_scatter_curves)

EXIT_OK, EXIT_CONFIG, EXIT_KINEMATICS = 0, 2, 3

COMMANDS = ("single-map", "double-map", "triple-curves", "mass-scan",
            "optimize", "state", "selftest")

_OPT_BRACKETS = {1: (1.0, 100.0), 2: (5.0, 150.0), 3: (1.0, 60.0)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


def _add_scenario_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="YAML or JSON file of scenario keys; flags override it")
    sp.add_argument("--n", help="number of scatterings (1-6)")
    sp.add_argument("--m", help="projectile mass in MeV")
    sp.add_argument("--M", dest="M", help="target mass in MeV")
    sp.add_argument("--initial", help="qubit indices, target first, e.g. 0,1,1")
    sp.add_argument("--theta", help="polar angle shared by all scatterings (e.g. pi, 0.95pi)")
    for i in range(1, 7):
        sp.add_argument(f"--theta{i}", help=argparse.SUPPRESS)
    sp.add_argument("--dphi", help="azimuth difference between consecutive projectiles")
    for i in range(2, 7):
        sp.add_argument(f"--dphi{i}", help=argparse.SUPPRESS)
    sp.add_argument("--p", help="beam momentum in MeV")
    sp.add_argument("--p-axis", dest="p_axis", help="start:stop:count or comma list (MeV)")
    sp.add_argument("--theta-axis", dest="theta_axis")
    sp.add_argument("--theta1-axis", dest="theta1_axis")
    sp.add_argument("--theta2-axis", dest="theta2_axis")
    sp.add_argument("--dphi-axis", dest="dphi_axis")
    sp.add_argument("--p-bracket", dest="p_bracket", help="lo,hi momentum bracket (MeV)")
    sp.add_argument("--coarse-points", dest="coarse_points")
    sp.add_argument("--measure", help="pair 'p1,p2' or cut 't|rest'")
    sp.add_argument("--ratios", help="mass ratios m/M for mass-scan")
    sp.add_argument("--theta-set", dest="theta_set", help="angles for mass-scan")
    sp.add_argument("--summary", help="mass-scan: JSON path for per-ratio optima")
    sp.add_argument("--out", help="output path, '-' for stdout")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="helicity-cascade",
                     description="Helicity entanglement from consecutive QED scatterings.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "selftest":
            sp.add_argument("--seed", type=int, default=12345)
        else:
            _add_scenario_flags(sp)
    return parser


def _merged_raw(args: argparse.Namespace) -> dict:
    raw = load_config_file(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if key in ("command", "config", "summary") or value is None:
            continue
        raw[key] = value
    return raw


def _helicities(cfg: ScenarioConfig) -> tuple[int, ...]:
    return index_to_helicity(cfg.initial)


def _measure(cfg: ScenarioConfig) -> Measure:
    return Measure.parse(cfg.measure) if cfg.measure else Measure.default(cfg.n)


def _require(cfg: ScenarioConfig, key: str, value=None):
    value = getattr(cfg, key) if value is None else value
    if value is None:
        raise ConfigError(key, f"required for {cfg.command}")
    return value


def run_single_map(cfg: ScenarioConfig, args) -> int:
    p_axis = cfg.p_axis if cfg.p_axis is not None else default_p_axis()
    theta_axis = cfg.theta_axis if cfg.theta_axis is not None else default_theta_axis()
    grid = single_scatter_map(p_axis, theta_axis, _helicities(cfg), cfg.m, cfg.M)
    write_grid_csv(grid, cfg.out)
    return EXIT_OK


def run_double_map(cfg: ScenarioConfig, args) -> int:
    p = cfg.p if cfg.p is not None else 47.16
    t1 = cfg.theta1_axis if cfg.theta1_axis is not None else default_theta_axis()
    t2 = cfg.theta2_axis if cfg.theta2_axis is not None else default_theta_axis()
    dphi = (cfg.dphi_axis if cfg.dphi_axis is not None
            else np.linspace(0.0, math.pi, DEFAULT_ANGLE_POINTS))
    grid = double_scatter_map(p, t1, t2, dphi, _helicities(cfg), cfg.m, cfg.M)
    write_grid_csv(grid, cfg.out)
    return EXIT_OK


def run_triple_curves(cfg: ScenarioConfig, args) -> int:
    p_axis = cfg.p_axis if cfg.p_axis is not None else default_p_axis(stop=200.0)
    dphi = cfg.dphis[0] if cfg.dphis else math.pi
    curves = triple_scatter_curves(p_axis, _helicities(cfg), cfg.m, cfg.M, dphi)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["measure", "p", "concurrence"])
    for name, grid in curves.items():
        for p, c in zip(grid.axes["p"], grid.values):
            writer.writerow([name, format_real(float(p)), format_real(float(c))])
    _write_text(buf.getvalue(), cfg.out)
    return EXIT_OK


def run_mass_scan(cfg: ScenarioConfig, args) -> int:
    ratios = cfg.ratios if cfg.ratios is not None else DEFAULT_RATIOS
    grids = mass_ratio_scan(ratios, cfg.theta_set, cfg.p_axis, cfg.M, _helicities(cfg))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ratio", "p", "theta", "concurrence"])
    for grid in grids:
        ratio = format_real(grid.metadata["ratio"])
        body = grid_to_csv(grid).splitlines()[1:]
        for line in body:
            writer.writerow([ratio, *line.split(",")])
    _write_text(buf.getvalue(), cfg.out)
    if args.summary:
        doc = {"kind": "mass-scan", "config": cfg.echo(),
               "ratios": [{"ratio": g.metadata["ratio"], "p_opt": g.metadata["p_opt"],
                           "width": g.metadata["width"]} for g in grids]}
        write_report_json(doc, args.summary)
    return EXIT_OK


def _scenario(cfg: ScenarioConfig) -> Scenario:
    try:
        geometry = ScatterGeometry(cfg.angles())
    except ValueError as exc:
        raise ConfigError("geometry", str(exc)) from None
    return Scenario(geometry, _helicities(cfg), cfg.m, cfg.M, _measure(cfg))


def run_optimize(cfg: ScenarioConfig, args) -> int:
    scenario = _scenario(cfg)
    bracket = cfg.p_bracket or _OPT_BRACKETS.get(cfg.n, (1.0, 200.0))
    try:
        report = optimize_momentum(scenario, bracket, cfg.coarse_points)
    except NoInteriorMaximum as exc:
        raise ConfigError("p_bracket", str(exc)) from None
    write_report_json(optimum_doc(report, cfg.echo()), cfg.out)
    return EXIT_OK


def state_document(cfg: ScenarioConfig) -> dict:
    """Full dump for one scenario point: kinematics, state, reduced matrices, measures."""
    p = _require(cfg, "p")
    kin = build_cascade(p, cfg.m, cfg.M, ScatterGeometry(cfg.angles()))
    coeffs = cascade_coefficients(kin, _helicities(cfg))
    rho = density_matrix(coeffs)
    reduced = {}
    for label in rho.labels:
        r = partial_trace(rho, {label})
        reduced[label] = {"matrix": r.to_document(), "purity": purity(r)}
    reports = pairwise_concurrences(rho)
    doc = {
        "kind": "state",
        "config": cfg.echo(),
        "p": p,
        "kinematics": kinematics_doc(kin),
        "coefficients": [complex(z) for z in coeffs.vector()],
        "density_matrix": rho.to_document(),
        "reduced": reduced,
        "concurrences": {rep.name: {"value": rep.value, "spectrum": list(rep.spectrum)}
                         for rep in reports},
    }
    if cfg.n == 2:
        doc["monogamy_residual"] = {lab: monogamy_residual(rho, lab) for lab in rho.labels}
    return doc


def run_state(cfg: ScenarioConfig, args) -> int:
    write_report_json(state_document(cfg), cfg.out)
    return EXIT_OK


def _write_text(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


RUNNERS = {
    "single-map": run_single_map,
    "double-map": run_double_map,
    "triple-curves": run_triple_curves,
    "mass-scan": run_mass_scan,
    "optimize": run_optimize,
    "state": run_state,
}


def run_command(argv=None) -> int:
    parser = make_parser()
    context = "arguments"
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ConfigError("command", f"choose one of {', '.join(COMMANDS)}")
        if args.command == "selftest":
            return EXIT_OK if selftest.run(args.seed, sys.stdout) else 1
        context = args.config or "arguments"
        cfg = build_config(args.command, _merged_raw(args))
        return RUNNERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"helicity-cascade: config error ({context}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KinematicallyForbidden, SingularKinematics) as exc:
        print(f"helicity-cascade: infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_KINEMATICS
    except OutputError as exc:
        print(f"helicity-cascade: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command())
