"""Tree-level one-photon-exchange amplitude between two distinguishable fermions.

Line 1 -> 3 is the target, line 2 -> 4 the projectile.  The coupling is set
to one and the photon propagator is taken in Feynman gauge; every overall
constant drops out of normalised helicity states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import GAMMA_MU, METRIC, helicity_pair, slash
from .errors import OffShellInput, SingularKinematics
from .relkin import FourMomentum, Scattering

HELICITIES = (1, -1)

_T_MIN = 1e-12
_SHELL_TOL = 1e-8


def helicity_index(h: int) -> int:
    """Qubit index for a helicity: +1 -> 0, -1 -> 1."""
    if h == 1:
        return 0
    if h == -1:
        return 1
    raise ValueError(f"helicity must be +1 or -1, got {h}")


def index_helicity(i: int) -> int:
    if i not in (0, 1):
        raise ValueError(f"qubit index must be 0 or 1, got {i}")
    return 1 - 2 * i


def mandelstam_t(p_in: FourMomentum, p_out: FourMomentum) -> float:
    return (p_in - p_out).minkowski_square()


def _check_inputs(p1, p2, p3, p4, m_target, m_projectile):
    for name, p, m in (("p1", p1, m_target), ("p2", p2, m_projectile),
                       ("p3", p3, m_target), ("p4", p4, m_projectile)):
        if p.shell_residual(m) > _SHELL_TOL:
            raise OffShellInput(f"{name} is off shell for mass {m}")
    diff = (p1 + p2 - p3 - p4).as_array()
    scale = max(p1.E + p2.E, 1e-300)
    if np.max(np.abs(diff)) / scale > _SHELL_TOL:
        raise OffShellInput("4-momentum not conserved")
    t = mandelstam_t(p1, p3)
    if abs(t) < _T_MIN:
        raise SingularKinematics("t = 0: exactly forward scattering")
    return t


def _currents(u_out: np.ndarray, u_in: np.ndarray) -> np.ndarray:
    """J[a, c, mu] = ubar_a(out) gamma^mu u_c(in) for two stacked spinor sets."""
    bar = u_out.conj() @ GAMMA_MU[0]
    return np.einsum("ai,mij,cj->acm", bar, GAMMA_MU, u_in)


def _table(p1, p2, p3, p4, t, coupling, gauge_xi, m_target, m_projectile):
    j_t = _currents(helicity_pair(p3, m_target), helicity_pair(p1, m_target))
    j_p = _currents(helicity_pair(p4, m_projectile), helicity_pair(p2, m_projectile))
    entries = np.einsum("acm,mn,bdn->abcd", j_t, METRIC, j_p)
    if gauge_xi:
        q = METRIC @ (p1 - p3).as_array()
        entries = entries - gauge_xi * np.einsum(
            "ac,bd->abcd", j_t @ q, j_p @ q) / t
    return coupling**2 * entries / t


def t_channel_amplitude(p1: FourMomentum, h1: int, p2: FourMomentum, h2: int,
                        p3: FourMomentum, h3: int, p4: FourMomentum, h4: int,
                        m_target: float, m_projectile: float,
                        coupling: float = 1.0, gauge_xi: float = 0.0) -> complex:
    """M(h3, h4 | h1, h2) for target 1 -> 3 and projectile 2 -> 4.

    ``gauge_xi`` adds ``xi q^mu q^nu / q^2`` to the propagator numerator; the
    result must not depend on it.
    """
    t = _check_inputs(p1, p2, p3, p4, m_target, m_projectile)
    entries = _table(p1, p2, p3, p4, t, coupling, gauge_xi, m_target, m_projectile)
    return complex(entries[helicity_index(h3), helicity_index(h4),
                           helicity_index(h1), helicity_index(h2)])


@dataclass(frozen=True)
class HelicityAmplitudeTable:
    """All 16 amplitudes at fixed kinematics.

    ``entries[a, b, c, d]`` is M(h3, h4 | h1, h2) with qubit indices
    ``a, b, c, d`` (0 for helicity +1).
    """

    entries: np.ndarray
    kinematics: Scattering

    def __getitem__(self, hel: tuple[int, int, int, int]) -> complex:
        return complex(self.entries[tuple(helicity_index(h) for h in hel)])

    def column(self, h_target: int, h_projectile: int) -> np.ndarray:
        """Final-state amplitudes over (h3, h4) for one initial helicity pair."""
        return self.entries[:, :, helicity_index(h_target),
                            helicity_index(h_projectile)].copy()

    def spin_sum(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))


def amplitude_table(kin: Scattering, m_target: float, m_projectile: float,
                    coupling: float = 1.0, gauge_xi: float = 0.0
                    ) -> HelicityAmplitudeTable:
    p1, p2, p3, p4 = kin.p_in, kin.k_in, kin.p_out, kin.k_out
    t = _check_inputs(p1, p2, p3, p4, m_target, m_projectile)
    entries = _table(p1, p2, p3, p4, t, coupling, gauge_xi, m_target, m_projectile)
    entries.setflags(write=False)
    return HelicityAmplitudeTable(entries, kin)


def _lepton_tensor(p_out: FourMomentum, p_in: FourMomentum, m: float) -> np.ndarray:
    """Tr[(pslash_out + m) gamma^mu (pslash_in + m) gamma^nu], upper indices."""
    a = slash(p_out) + m * np.eye(4)
    b = slash(p_in) + m * np.eye(4)
    return np.array([[np.trace(a @ GAMMA_MU[mu] @ b @ GAMMA_MU[nu])
                      for nu in range(4)] for mu in range(4)])


def unpolarized_oracle(kin: Scattering, m_target: float, m_projectile: float,
                       coupling: float = 1.0) -> float:
    """Sum over all 16 helicity configurations of |M|^2, from trace identities.

    Built only from slashed momenta and gamma-matrix products, never from
    spinors, so it checks the helicity table independently.
    """
    p1, p2, p3, p4 = kin.p_in, kin.k_in, kin.p_out, kin.k_out
    t = mandelstam_t(p1, p3)
    if abs(t) < _T_MIN:
        raise SingularKinematics("t = 0: exactly forward scattering")
    lt = _lepton_tensor(p3, p1, m_target)
    lp = _lepton_tensor(p4, p2, m_projectile)
    lp_lower = METRIC @ lp @ METRIC
    return float(np.real(np.sum(lt * lp_lower))) * coupling**4 / t**2
