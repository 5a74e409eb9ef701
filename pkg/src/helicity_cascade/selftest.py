"""Fast in-process invariant checks, run by ``helicity-cascade selftest``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.linalg import sqrtm

from .amplitude import amplitude_table, unpolarized_oracle
from .cascade import cascade_coefficients, density_matrix, pure_density
from .dirac import GAMMA_MU, METRIC, adjoint, helicity_pair, slash
from .entangle import concurrence, monogamy_residual, spin_flip, wootters_lambdas
from .relkin import (M_ELECTRON, M_PROTON, FourMomentum, ScatterGeometry,
                     build_cascade, first_scattering_magnitude)


def _random_cascade(rng, n):
    p = rng.uniform(1.0, 200.0)
    angles = [(rng.uniform(0.2, math.pi), 0.0 if i == 0 else rng.uniform(0, 2 * math.pi))
              for i in range(n)]
    return build_cascade(p, M_ELECTRON, M_PROTON, ScatterGeometry(tuple(angles)))


def check_clifford(rng) -> float:
    worst = 0.0
    for mu in range(4):
        for nu in range(4):
            anti = GAMMA_MU[mu] @ GAMMA_MU[nu] + GAMMA_MU[nu] @ GAMMA_MU[mu]
            worst = max(worst, np.max(np.abs(anti - 2 * METRIC[mu, nu] * np.eye(4))))
    return worst


def check_completeness(rng) -> float:
    worst = 0.0
    for _ in range(20):
        m = rng.uniform(0.1, 1000.0)
        p = FourMomentum.on_shell(rng.normal(size=3) * rng.uniform(0.1, 500), m)
        u = helicity_pair(p, m)
        s = sum(np.outer(row, adjoint(row)) for row in u)
        worst = max(worst, np.max(np.abs(s - slash(p) - m * np.eye(4))) / p.E)
    return worst


def check_spin_sum(rng) -> float:
    worst = 0.0
    for _ in range(20):
        kin = _random_cascade(rng, 1)[0]
        table = amplitude_table(kin, M_PROTON, M_ELECTRON)
        oracle = unpolarized_oracle(kin, M_PROTON, M_ELECTRON)
        worst = max(worst, abs(table.spin_sum() - oracle) / oracle)
    return worst


def check_conservation(rng) -> float:
    worst = 0.0
    for n in (1, 2, 3):
        for _ in range(10):
            kin = _random_cascade(rng, n)
            worst = max(worst, kin.conservation_residual())
            for s in kin:
                worst = max(worst, s.k_out.shell_residual(kin.m), s.p_out.shell_residual(kin.M))
    return worst


def check_closed_form(rng) -> float:
    worst = 0.0
    for _ in range(20):
        p, theta = rng.uniform(0.5, 300), rng.uniform(0, math.pi)
        kin = build_cascade(p, M_ELECTRON, M_PROTON, ScatterGeometry.single(theta))
        ref = first_scattering_magnitude(p, M_ELECTRON, M_PROTON, theta)
        worst = max(worst, abs(kin[0].k_out.p - ref) / ref)
    return worst


def check_bell(rng) -> float:
    bell = pure_density(np.array([1, 0, 0, 1]) / math.sqrt(2), ("a", "b"))
    return abs(concurrence(bell) - 1.0)


def check_monogamy(rng) -> float:
    worst = 0.0
    for _ in range(10):
        kin = _random_cascade(rng, 2)
        rho = density_matrix(cascade_coefficients(kin, (1, -1, -1)))
        for focus in rho.labels:
            worst = min(worst, monogamy_residual(rho, focus))
    return max(0.0, -worst)


def check_lambda_shortcut(rng) -> float:
    worst = 0.0
    for _ in range(10):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        s = sqrtm(rho)
        literal = np.sort(np.linalg.eigvalsh(sqrtm(s @ spin_flip(rho) @ s)).real)[::-1]
        worst = max(worst, np.max(np.abs(literal - wootters_lambdas(rho))))
    return worst


CHECKS: dict[str, tuple[Callable, float]] = {
    "gamma anticommutators": (check_clifford, 1e-14),
    "spinor completeness": (check_completeness, 1e-10),
    "spin sum vs trace oracle": (check_spin_sum, 1e-10),
    "cascade conservation and mass shell": (check_conservation, 1e-10),
    "closed-form first scattering": (check_closed_form, 1e-12),
    "Bell concurrence": (check_bell, 1e-10),
    "CKW monogamy (negativity)": (check_monogamy, 1e-8),
    "lambda shortcut vs nested sqrt": (check_lambda_shortcut, 1e-10),
}


def run(seed: int = 12345, stream=None) -> bool:
    rng = np.random.default_rng(seed)
    ok = True
    for name, (check, tol) in CHECKS.items():
        worst = check(rng)
        passed = worst <= tol
        ok &= passed
        line = f"{'PASS' if passed else 'FAIL'}  {name}: worst {worst:.3e} (tol {tol:.0e})"
        if stream is not None:
            print(line, file=stream)
    return ok
