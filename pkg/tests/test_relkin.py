import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from helicity_cascade.errors import KinematicallyForbidden, ZeroMomentum
from helicity_cascade.relkin import (M_ELECTRON, M_PROTON, FourMomentum, ScatterGeometry,
                                     beam, build_cascade, first_scattering_magnitude,
                                     on_shell_energy, outgoing_projectile_magnitude,
                                     polar_of, solve_scattering)

from conftest import momenta, polar

# energy-conservation bisection at 40 digits (mpmath), independent of the a/b closed form
K_OUT_EP_BACK = 14.628864876922366
P_OUT_EP_BACK = 29.728864876922366


def test_on_shell_energy_examples():
    assert on_shell_energy((0, 0, 0), 938.272) == 938.272
    assert on_shell_energy((0, 0, 7.5), 0) == 7.5
    assert on_shell_energy((0, 0, 15.1), 0.511) == pytest.approx(15.108643916645862, rel=1e-15)


def test_forward_direction_keeps_beam_momentum():
    k = outgoing_projectile_magnitude(beam(15.1, M_ELECTRON), FourMomentum.at_rest(M_PROTON),
                                      M_ELECTRON, M_PROTON, 0.0, 0.0)
    assert k == pytest.approx(15.1, rel=1e-12)


def test_equal_mass_head_on_stops_projectile():
    m = 3.0
    k = outgoing_projectile_magnitude(beam(10.0, m), FourMomentum.at_rest(m), m, m, math.pi, 0.0)
    assert abs(k) < 1e-12


def test_electron_backscatter_matches_bisection_oracle():
    k = outgoing_projectile_magnitude(beam(15.1, 0.511), FourMomentum.at_rest(938.272),
                                      0.511, 938.272, math.pi, 0.0)
    assert k == pytest.approx(K_OUT_EP_BACK, rel=1e-10)
    _, p_out = solve_scattering(beam(15.1, 0.511), FourMomentum.at_rest(938.272),
                                0.511, 938.272, math.pi, 0.0)
    assert p_out.pz == pytest.approx(P_OUT_EP_BACK, rel=1e-10)
    assert abs(p_out.px) < 1e-12 and abs(p_out.py) < 1e-12


def test_solve_scattering_identities():
    k_in, p_in = beam(20.0, M_ELECTRON), FourMomentum.at_rest(M_PROTON)
    k_out, p_out = solve_scattering(k_in, p_in, M_ELECTRON, M_PROTON, 0.0, 0.0)
    np.testing.assert_allclose(k_out.as_array(), k_in.as_array(), rtol=0, atol=1e-12 * k_in.E)
    np.testing.assert_allclose(p_out.as_array(), p_in.as_array(), rtol=0, atol=1e-12 * p_in.E)

    m = 5.0
    k_in, p_in = beam(12.0, m), FourMomentum.at_rest(m)
    k_out, p_out = solve_scattering(k_in, p_in, m, m, math.pi, 0.0)
    np.testing.assert_allclose(k_out.as_array(), [m, 0, 0, 0], atol=1e-12 * k_in.E)
    np.testing.assert_allclose(p_out.as_array(), k_in.as_array(), atol=1e-12 * k_in.E)


def test_heavy_projectile_outside_cone_is_forbidden():
    m, M = 2.0, 1.0
    with pytest.raises(KinematicallyForbidden):
        outgoing_projectile_magnitude(beam(5.0, m), FourMomentum.at_rest(M), m, M,
                                      math.pi / 2, 0.0)


def test_cascade_tags_failing_scattering():
    with pytest.raises(KinematicallyForbidden) as info:
        build_cascade(5.0, 2.0, 1.0, ScatterGeometry(((0.1, 0.0), (math.pi / 2, 0.0))))
    assert info.value.index == 2
    assert "scattering 2" in str(info.value)


def test_cascade_base_case_matches_solver():
    kin = build_cascade(15.1, M_ELECTRON, M_PROTON, ScatterGeometry.single(math.pi))
    k_out, p_out = solve_scattering(beam(15.1, M_ELECTRON), FourMomentum.at_rest(M_PROTON),
                                    M_ELECTRON, M_PROTON, math.pi, 0.0)
    assert kin[0].k_out == k_out and kin[0].p_out == p_out


def test_two_reflections_target_recoils_with_about_twice_beam():
    p = 47.16
    kin = build_cascade(p, M_ELECTRON, M_PROTON, ScatterGeometry.reflected(2))
    assert kin[1].p_in == kin[0].p_out
    recoil = kin[0].p_out
    assert 2 * p * (1 - 10 * p / M_PROTON) < recoil.pz < 2 * p
    assert math.hypot(recoil.px, recoil.py) < 1e-10
    assert kin[1].k_in == kin[0].k_in


def test_three_reflections_conserve_total_momentum():
    kin = build_cascade(12.06, M_ELECTRON, M_PROTON, ScatterGeometry.reflected(3))
    assert kin.conservation_residual() < 1e-12


def test_polar_of_examples():
    assert polar_of(FourMomentum.on_shell((0, 0, 3), 1)) == (0.0, 0.0)
    assert polar_of(FourMomentum.on_shell((0, 0, -3), 1)) == (math.pi, 0.0)
    theta, phi = polar_of(FourMomentum.on_shell((1, 1, 0), 1))
    assert theta == pytest.approx(math.pi / 2) and phi == pytest.approx(math.pi / 4)
    with pytest.raises(ZeroMomentum):
        polar_of(FourMomentum.at_rest(1.0))


def test_geometry_validation():
    with pytest.raises(ValueError):
        ScatterGeometry(((math.pi, 0.3),))
    with pytest.raises(ValueError):
        ScatterGeometry(())
    with pytest.raises(ValueError):
        ScatterGeometry(((4.0, 0.0),))
    assert ScatterGeometry.reflected(3).angles == ((math.pi, 0.0), (math.pi, math.pi),
                                                   (math.pi, 0.0))


@settings(max_examples=60, deadline=None)
@given(p=momenta, n=st.integers(1, 3), data=st.data())
def test_cascade_conservation_and_mass_shell(p, n, data):
    angles = [(data.draw(polar), 0.0 if i == 0 else data.draw(st.floats(0, 6.28)))
              for i in range(n)]
    kin = build_cascade(p, M_ELECTRON, M_PROTON, ScatterGeometry(tuple(angles)))
    assert kin.conservation_residual() < 1e-10
    for s in kin:
        assert s.k_out.shell_residual(M_ELECTRON) < 1e-10
        assert s.p_out.shell_residual(M_PROTON) < 1e-10
        assert s.k_out.E > 0 and s.p_out.E > 0
        lhs = (s.k_in + s.p_in).as_array()
        rhs = (s.k_out + s.p_out).as_array()
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * lhs[0]


@settings(max_examples=60, deadline=None)
@given(p=momenta, pz=st.floats(-300, 0), m=st.floats(0.01, 100), ratio=st.floats(1.0, 50))
def test_forward_identity_for_head_on_targets(p, pz, m, ratio):
    M = m * ratio
    target = FourMomentum.on_shell((0, 0, pz), M)
    # co-moving with equal velocity is a double root with no collision
    assume(abs(pz / target.E - p / beam(p, m).E) > 1e-3)
    k = outgoing_projectile_magnitude(beam(p, m), target, m, M, 0.0, 0.0)
    assert k == pytest.approx(p, rel=1e-9)


@settings(max_examples=80, deadline=None)
@given(p=momenta, m=st.floats(0.01, 100), ratio=st.floats(1.0, 2000), theta=st.floats(0, math.pi))
def test_closed_form_first_scattering(p, m, ratio, theta):
    M = m * ratio
    kin = build_cascade(p, m, M, ScatterGeometry.single(theta))
    ref = first_scattering_magnitude(p, m, M, theta)
    assert kin[0].k_out.p == pytest.approx(ref, rel=1e-12, abs=1e-12 * p)


@settings(max_examples=40, deadline=None)
@given(p=momenta, m=st.floats(0.01, 100), ratio=st.floats(1.0, 2000))
def test_magnitude_non_increasing_in_theta(p, m, ratio):
    M = m * ratio
    thetas = np.linspace(0, math.pi, 60)
    ks = [build_cascade(p, m, M, ScatterGeometry.single(float(t)))[0].k_out.p for t in thetas]
    assert np.all(np.diff(ks) <= 1e-9 * p)
