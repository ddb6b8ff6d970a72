import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinbrink.oracle import brinkman_bvp_1d, brinkman_bvp_richardson, flow_factor_quadrature
from thinbrink.profile import (darcy_limit, flow_factor, flow_factor_dh, poiseuille_limit, profile_coeffs,
                               profile_dz3, profile_velocity, shape)

PHI_11 = 0.07576568547998053  # phi_1(1), frozen from the oracle check below


def test_coeffs_wall_identities():
    c = profile_coeffs(1.0, 1.0)
    assert c.A1 + c.A2 + 1 == pytest.approx(0.0, abs=1e-15)
    assert c.A1 * np.e + c.A2 / np.e + 1 == pytest.approx(0.0, abs=1e-15)


def test_coeffs_large_M():
    c = profile_coeffs(50.0, 1.0)
    assert c.A2 == pytest.approx(-1.0, abs=1e-15)
    assert c.A1 == pytest.approx(-np.exp(-50.0), rel=1e-12)
    bvp = brinkman_bvp_1d(50.0, 1.0, 16384)
    assert profile_velocity(c, 0.5) == pytest.approx(bvp.at(0.5), abs=1e-8)
    c = profile_coeffs(1e4, 2.0)
    assert np.isfinite([c.A1, c.A2]).all()


def test_profile_against_bvp():
    c = profile_coeffs(2.0, 0.5)
    ref = brinkman_bvp_richardson(2.0, 0.5, 4096)
    np.testing.assert_allclose(profile_velocity(c, ref.z), ref.u, atol=1e-8)
    c = profile_coeffs(1.0, 1.0)
    assert profile_velocity(c, 0.5) == pytest.approx(brinkman_bvp_richardson(1.0, 1.0).at(0.5), abs=1e-8)


def test_profile_rejects_outside():
    c = profile_coeffs(1.0, 1.0)
    for z in (-1e-3, 1.001):
        with pytest.raises(ValueError):
            profile_velocity(c, z)
        with pytest.raises(ValueError):
            profile_dz3(c, z)
    with pytest.raises(ValueError):
        profile_coeffs(0.0, 1.0)
    with pytest.raises(ValueError):
        flow_factor(1.0, -1.0)


def test_derivative():
    c = profile_coeffs(1.0, 1.0)
    assert profile_dz3(c, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert profile_dz3(c, 0.0) == pytest.approx(c.M * (c.A1 - c.A2))
    assert profile_dz3(c, 0.0) > 0
    d = 1e-4
    for z in (0.1, 0.3, 0.77):
        fd = (profile_velocity(c, z + d) - profile_velocity(c, z - d)) / (2 * d)
        assert abs(fd - profile_dz3(c, z)) <= 1e-8


def test_flow_factor_frozen_and_quadrature():
    assert flow_factor(1.0, 1.0) == pytest.approx(PHI_11, rel=1e-15)
    assert flow_factor_quadrature(1.0, 1.0) == pytest.approx(PHI_11, rel=1e-13)
    z = np.linspace(0, 1, 100_001)
    s = profile_velocity(profile_coeffs(1.0, 1.0), z)
    assert np.trapezoid(s, z) == pytest.approx(PHI_11, rel=1e-8)


def test_limits():
    assert flow_factor(1e-2, 1.0) / poiseuille_limit(1e-2, 1.0) == pytest.approx(1.0, rel=1e-4)
    assert abs(flow_factor(100.0, 1.0) - 0.98) < 1e-6
    assert flow_factor(100.0, 1.0) / darcy_limit(100.0, 1.0) == pytest.approx(1.0, rel=1e-4)
    assert np.isfinite(flow_factor(1e4, 1.0)) and flow_factor(1e4, 1.0) > 0
    # series branch and tanh branch meet smoothly
    assert flow_factor(1.01e-2, 1.0) / flow_factor(0.99e-2, 1.0) == pytest.approx((1.01 / 0.99) ** 2, rel=1e-4)


LOG_M = st.floats(-3, 3)
LOG_H = st.floats(-1, 1)


@settings(max_examples=80, deadline=None)
@given(LOG_M, LOG_H, st.floats(0.01, 0.99))
def test_wall_vanishing_and_positivity(lm, lh, t):
    M, h = 10.0**lm, 10.0**lh
    assert abs(shape(M, h, 0.0)) <= 1e-12 and abs(shape(M, h, h)) <= 1e-12
    assert shape(M, h, t * h) > 0
    assert flow_factor(M, h) > 0


@settings(max_examples=60, deadline=None)
@given(LOG_M, LOG_H, st.floats(1e-3, 0.5))
def test_monotone_in_h(lm, lh, dh):
    M, h = 10.0**lm, 10.0**lh
    assert flow_factor(M, h + dh) > flow_factor(M, h)
    assert flow_factor_dh(M, h) > 0


def test_flow_factor_dh_matches_difference():
    for M, h in ((1.0, 1.0), (3.0, 0.4), (0.2, 2.0)):
        d = 1e-5
        fd = (flow_factor(M, h + d) - flow_factor(M, h - d)) / (2 * d)
        assert flow_factor_dh(M, h) == pytest.approx(fd, rel=1e-7)
