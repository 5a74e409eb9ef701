import itertools
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from helicity_cascade.amplitude import amplitude_table
from helicity_cascade.dirac import GAMMA, GAMMA_MU, METRIC, slash
from helicity_cascade.errors import KinematicallyForbidden
from helicity_cascade.relkin import M_ELECTRON, M_PROTON, ScatterGeometry, build_cascade


def random_density(rng, dim=4, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim=2):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_cascade(rng, n, m=M_ELECTRON, M=M_PROTON, pmax=200.0, tries=1000):
    """A feasible random cascade; forbidden draws are redrawn."""
    for _ in range(tries):
        p = rng.uniform(1.0, pmax)
        angles = [(rng.uniform(0.2, math.pi), 0.0 if i == 0 else rng.uniform(0, 2 * math.pi))
                  for i in range(n)]
        try:
            return build_cascade(p, m, M, ScatterGeometry(tuple(angles)))
        except KinematicallyForbidden:
            continue
    raise RuntimeError(f"no feasible cascade in {tries} draws (m={m}, M={M}, n={n})")


@pytest.fixture
def rng():
    return np.random.default_rng(20231014)


@pytest.fixture
def ep_backscatter():
    return build_cascade(15.1, M_ELECTRON, M_PROTON, ScatterGeometry.single(math.pi))


momenta = st.floats(0.5, 500.0)
polar = st.floats(0.05, math.pi)
azimuth = st.floats(0.0, 2 * math.pi, exclude_max=True)
masses = st.floats(0.01, 2000.0)


def spin_projector(p, m, h):
    """u ubar for a massive helicity state, built only from gamma matrices."""
    mag = p.p
    n = np.asarray(p.p3) / mag if mag > 0 else np.array([0.0, 0.0, 1.0])
    s = h * np.array([mag / m, *(p.E / m * n)])
    return 0.5 * (slash(p) + m * np.eye(4)) @ (np.eye(4) + GAMMA.gamma5 @ slash(s))


def polarized_square(scat, m_target, m_projectile, h1, h2, h3, h4):
    """|M(h3, h4 | h1, h2)|^2 as a product of two traces of spin projectors."""
    t = (scat.p_in - scat.p_out).minkowski_square()
    a3, a1 = spin_projector(scat.p_out, m_target, h3), spin_projector(scat.p_in, m_target, h1)
    a4, a2 = spin_projector(scat.k_out, m_projectile, h4), spin_projector(scat.k_in, m_projectile, h2)
    lt = np.array([[np.trace(a3 @ GAMMA_MU[i] @ a1 @ GAMMA_MU[j]) for j in range(4)]
                   for i in range(4)])
    lp = np.array([[np.trace(a4 @ GAMMA_MU[i] @ a2 @ GAMMA_MU[j]) for j in range(4)]
                   for i in range(4)])
    return float(np.real(np.sum(lt * (METRIC @ lp @ METRIC)))) / t**2


def full_register_oracle(kin, hel, m=M_ELECTRON, M=M_PROTON):
    """Evolve the whole (n+1)-qubit ket with embedded two-qubit operators."""
    n = len(kin)
    dim = 2 ** (n + 1)
    ket = np.zeros(dim, dtype=complex)
    ket[int("".join(str((1 - h) // 2) for h in hel), 2)] = 1.0
    for i, scat in enumerate(kin, start=1):
        t = amplitude_table(scat, M, m).entries
        op = np.zeros((dim, dim), dtype=complex)
        for a, b, c, d in itertools.product((0, 1), repeat=4):
            factors = [np.eye(2)] * (n + 1)
            factors[0] = np.outer(np.eye(2)[a], np.eye(2)[c])
            factors[i] = np.outer(np.eye(2)[b], np.eye(2)[d])
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            op += t[a, b, c, d] * term
        ket = op @ ket
    return ket
