import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helicity_cascade.amplitude import amplitude_table, helicity_index
from helicity_cascade.cascade import (DensityMatrix, cascade_coefficients, density_matrix,
                                      parse_initial, partial_trace, pure_density, purity,
                                      register_labels)
from helicity_cascade.entangle import pairwise_concurrences
from helicity_cascade.errors import NullState, UnknownLabel, WrongDimension
from helicity_cascade.relkin import M_ELECTRON, M_PROTON, build_cascade

from conftest import full_register_oracle, random_cascade


def _path_sum(kin, hel):
    """D[r_n, f_1..f_n] summed explicitly over every intermediate target helicity."""
    tables = [amplitude_table(s, M_PROTON, M_ELECTRON).entries for s in kin]
    n = len(kin)
    out = np.zeros((2,) * (n + 1), dtype=complex)
    r0 = helicity_index(hel[0])
    for finals in itertools.product((0, 1), repeat=n):
        for targets in itertools.product((0, 1), repeat=n):
            amp = 1.0 + 0j
            prev = r0
            for i in range(n):
                amp *= tables[i][targets[i], finals[i], prev, helicity_index(hel[i + 1])]
                prev = targets[i]
            out[(targets[-1],) + finals] += amp
    return out


def test_labels_and_initial_parsing():
    assert register_labels(3) == ("t", "p1", "p2", "p3")
    assert parse_initial("0,1,1") == (1, -1, -1)
    assert parse_initial((1, -1)) == (1, -1)
    assert parse_initial((1, 1, 1)) == (1, 1, 1)
    with pytest.raises(ValueError):
        parse_initial((0, 1))
    with pytest.raises(ValueError):
        parse_initial("0,2")
    with pytest.raises(ValueError):
        parse_initial((0, 1), 2)


def test_single_scattering_equals_table_column(ep_backscatter):
    d = cascade_coefficients(ep_backscatter, (1, -1))
    column = amplitude_table(ep_backscatter[0], M_PROTON, M_ELECTRON).column(1, -1)
    np.testing.assert_array_equal(d.coeffs, column)


@pytest.mark.parametrize("n", [2, 3])
def test_against_path_sum_and_full_register(rng, n):
    for _ in range(4):
        kin = random_cascade(rng, n)
        hel = tuple(int(x) for x in rng.choice([1, -1], size=n + 1))
        d = cascade_coefficients(kin, hel)
        scale = np.max(np.abs(d.coeffs))
        np.testing.assert_allclose(d.coeffs, _path_sum(kin, hel), atol=1e-10 * scale)
        np.testing.assert_allclose(d.vector(), full_register_oracle(kin, hel), atol=1e-10 * scale)


def test_reduced_projectile_pair_matches_explicit_formula(rng):
    kin = random_cascade(rng, 2)
    d = cascade_coefficients(kin, (1, -1, -1))
    c = d.coeffs
    rho_pp = np.einsum("rab,rcd->abcd", c, c.conj()).reshape(4, 4) / d.norm2()
    reduced = partial_trace(density_matrix(d), {"p1", "p2"})
    np.testing.assert_allclose(reduced.entries, rho_pp, atol=1e-12)


def test_density_matrix_properties(rng):
    for n in (1, 2, 3):
        rho = density_matrix(cascade_coefficients(random_cascade(rng, n), (1,) + (-1,) * n))
        rho.check()
        assert purity(rho) == pytest.approx(1.0, abs=1e-12)
        assert rho.labels == register_labels(n)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=8, max_size=8),
       st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False,
                          allow_infinity=False))
def test_pure_density_is_scale_invariant(vec, scale):
    v = np.array(vec)
    if np.vdot(v, v).real < 1e-6:
        return
    labels = ("a", "b", "c")
    a = pure_density(v, labels).entries
    b = pure_density(scale * v, labels).entries
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_null_state():
    with pytest.raises(NullState):
        pure_density(np.zeros(4), ("a", "b"))


def test_partial_trace_examples():
    up, down = np.array([1, 0]), np.array([0, 1])
    plus = (up + down) / math.sqrt(2)
    prod = pure_density(np.kron(up, plus), ("a", "b"))
    np.testing.assert_allclose(partial_trace(prod, {"a"}).entries, np.diag([1, 0]))
    np.testing.assert_allclose(partial_trace(prod, {"b"}).entries, 0.5 * np.ones((2, 2)))
    bell = pure_density(np.array([1, 0, 0, 1]) / math.sqrt(2), ("a", "b"))
    np.testing.assert_allclose(partial_trace(bell, {"b"}).entries, np.eye(2) / 2, atol=1e-15)
    ghz = np.zeros(8)
    ghz[0] = ghz[7] = 1 / math.sqrt(2)
    reduced = partial_trace(pure_density(ghz, ("a", "b", "c")), {"a", "c"})
    np.testing.assert_allclose(reduced.entries, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)
    assert reduced.labels == ("a", "c")
    assert partial_trace(bell, {"a", "b"}).entries.shape == (4, 4)


def test_partial_trace_keeps_register_order(rng):
    up, down = np.array([1, 0]), np.array([0, 1])
    rho = pure_density(np.kron(np.kron(up, down), up), ("a", "b", "c"))
    r = partial_trace(rho, {"c", "b"})
    assert r.labels == ("b", "c")
    np.testing.assert_allclose(r.entries, np.outer(np.kron(down, up), np.kron(down, up)))


def test_partial_trace_errors():
    bell = pure_density(np.array([1, 0, 0, 1]) / math.sqrt(2), ("a", "b"))
    with pytest.raises(UnknownLabel):
        partial_trace(bell, {"z"})
    with pytest.raises(WrongDimension):
        DensityMatrix(np.eye(3), ("a", "b"))


def test_document_round_trip(rng):
    rho = density_matrix(cascade_coefficients(random_cascade(rng, 2), (1, -1, -1)))
    back = DensityMatrix.from_document(rho.to_document())
    np.testing.assert_array_equal(back.entries, rho.entries)
    assert back.labels == rho.labels


@settings(max_examples=15, deadline=None)
@given(p=st.floats(5, 150), t1=st.floats(0.3, math.pi), t2=st.floats(0.3, math.pi),
       dphi=st.floats(0, 2 * math.pi), alpha=st.floats(0, 2 * math.pi))
def test_global_azimuthal_rotation_preserves_entanglement(p, t1, t2, dphi, alpha):
    base = build_cascade(p, M_ELECTRON, M_PROTON, [(t1, 0.0), (t2, dphi)])
    turned = build_cascade(p, M_ELECTRON, M_PROTON,
                           [(t1, alpha), (t2, (dphi + alpha) % (2 * math.pi))])
    hel = (1, -1, -1)
    a = [r.value for r in pairwise_concurrences(cascade_coefficients(base, hel))]
    b = [r.value for r in pairwise_concurrences(cascade_coefficients(turned, hel))]
    # concurrence is only Holder-1/2 in rho near rank deficiency: sqrt(eps) floor
    np.testing.assert_allclose(a, b, atol=1e-7)


def test_too_many_scatterings():
    kin = build_cascade(10.0, M_ELECTRON, M_PROTON, [(math.pi, 0.0)] * 7)
    with pytest.raises(ValueError):
        cascade_coefficients(kin, (1,) * 8)
