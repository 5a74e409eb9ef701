"""Chiral-representation gamma matrices and helicity-basis Dirac spinors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .relkin import FourMomentum

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GammaSet:
    gamma0: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray
    gamma5: np.ndarray

    @classmethod
    def chiral(cls) -> "GammaSet":
        g0 = np.block([[_Z2, _I2], [_I2, _Z2]])
        gi = [np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI]
        g5 = 1j * g0 @ gi[0] @ gi[1] @ gi[2]
        return cls(*(_frozen(g) for g in (g0, *gi, g5)))

    @property
    def mu(self) -> np.ndarray:
        """Stacked upper-index matrices, shape (4, 4, 4)."""
        return np.stack([self.gamma0, self.gamma1, self.gamma2, self.gamma3])


GAMMA = GammaSet.chiral()
GAMMA_MU = _frozen(GAMMA.mu)
GAMMA_LOWER = _frozen(np.einsum("mn,nab->mab", METRIC, GAMMA_MU))


def slash(p) -> np.ndarray:
    """gamma^mu p_mu for a 4-vector given with upper indices."""
    if isinstance(p, FourMomentum):
        p = p.as_array()
    return np.einsum("m,mab->ab", np.asarray(p, dtype=float), GAMMA_LOWER)


@dataclass(frozen=True)
class DiracSpinor:
    components: np.ndarray
    helicity: int
    momentum: FourMomentum
    mass: float
    kind: str = "particle-u"


def two_spinor(h: int, theta: float, phi: float) -> np.ndarray:
    if h == 1:
        return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    if h == -1:
        return np.array([-np.exp(-1j * phi) * math.sin(theta / 2), math.cos(theta / 2)])
    raise ValueError(f"helicity must be +1 or -1, got {h}")


def _direction(p: FourMomentum) -> tuple[float, float, float]:
    """(|p|, theta, phi); a particle at rest gets the spin-z basis."""
    rho = math.hypot(p.px, p.py)
    mag = math.hypot(rho, p.pz)
    if mag < 1e-14:
        return 0.0, 0.0, 0.0
    return mag, math.atan2(rho, p.pz), math.atan2(p.py, p.px)


def spinor_components(p: FourMomentum, h: int, m: float | None = None) -> np.ndarray:
    """Chiral-basis components of u_h(p).

    With the mass given, the small factor ``E - |p|`` is taken as
    ``m^2 / (E + |p|)``, which stays exact for light or massless particles.
    """
    mag, theta, phi = _direction(p)
    chi = two_spinor(h, theta, phi)
    big = p.E + mag
    if m is None:
        # clip: E - |p| can round to a tiny negative for massless momenta
        small = max(p.E - mag, 0.0)
    else:
        small = m * m / big if big > 0 else 0.0
    left, right = (small, big) if h == 1 else (big, small)
    return np.concatenate([math.sqrt(left) * chi, math.sqrt(right) * chi])


def helicity_pair(p: FourMomentum, m: float | None = None) -> np.ndarray:
    """Rows are u_{+1}(p) and u_{-1}(p), shape (2, 4)."""
    return np.stack([spinor_components(p, 1, m), spinor_components(p, -1, m)])


def helicity_spinor(p: FourMomentum, m: float, h: int) -> DiracSpinor:
    return DiracSpinor(spinor_components(p, h, m), int(h), p, float(m))


def _components(u) -> np.ndarray:
    return u.components if isinstance(u, DiracSpinor) else np.asarray(u)


def adjoint(u) -> np.ndarray:
    """Dirac adjoint u^dagger gamma^0 as a row vector."""
    return _components(u).conj() @ GAMMA.gamma0


def current(u_out, u_in) -> np.ndarray:
    """j^mu = ubar_out gamma^mu u_in, upper index."""
    return np.einsum("a,mab,b->m", adjoint(u_out), GAMMA_MU, _components(u_in))


def lower(v) -> np.ndarray:
    return METRIC @ np.asarray(v)
