import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinbrink.params import (CellGrid, MacroGrid, PhysicalParams, RoughnessProfile, eval_h, grad_h,
                              make_params, periodic_bilinear)


def test_make_params_examples():
    assert make_params(1, 1, 1, 1).M == 1.0
    assert make_params(4, 1, 1, 1, b=1).M == 2.0
    assert make_params(1e-3, 2e-3, 0.5, 0.6, b=10).M == pytest.approx(1.0, rel=1e-15)


def test_make_params_rejects_named_constant():
    with pytest.raises(ValueError, match="mu_eff"):
        make_params(1, 0, 1, 1)
    with pytest.raises(ValueError, match="K"):
        make_params(1, 1, -2, 1)
    with pytest.raises(TypeError):
        PhysicalParams(1.0, 1.0, 1.0, 1.0, 0.0, 3.0)


def test_M_recomputed_bitwise():
    p = make_params(0.37, 1.9, 0.23, 2.0)
    assert p.M == math.sqrt(p.mu / (p.K * p.mu_eff))
    assert p.mobility_scale == pytest.approx(1 / (p.M**2 * p.mu_eff), rel=1e-14)


def test_eval_h_examples():
    const = RoughnessProfile.constant(1.0)
    assert eval_h(const, 0.3, -0.2) == 1.0
    egg = RoughnessProfile.sinusoidal(1.0, 0.3)
    assert eval_h(egg, 0.0, 0.0) == pytest.approx(1.3)
    assert eval_h(egg, 1.0, 0.0) == pytest.approx(eval_h(egg, 0.0, 0.0), abs=1e-12)
    assert eval_h(egg, (0.5, 0.0)) == pytest.approx(0.7)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(-4, 4), st.integers(-4, 4))
def test_periodicity(z1, z2, m1, m2):
    p = RoughnessProfile.sinusoidal(1.2, 0.3, (0.1, -0.2), (2, 1))
    assert abs(eval_h(p, z1 + m1, z2 + m2) - eval_h(p, z1, z2)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.4), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.integers(0, 3), st.integers(0, 3))
def test_analytic_bounds_respected(a0, a1, a2, k1, k2):
    if abs(a0) + abs(a1) + abs(a2) >= 0.9:
        return
    p = RoughnessProfile.sinusoidal(1.0, a0, (a1, a2), (k1, k2))
    z = np.linspace(-0.5, 0.5, 81)
    H = eval_h(p, *np.meshgrid(z, z, indexing="ij"))
    assert H.min() >= p.h_min - 1e-12 and H.max() <= p.h_max + 1e-12
    # extrema of the bilinear form are attained on this grid (corners are grid points)
    assert H.min() == pytest.approx(p.h_min, abs=1e-12)
    assert H.max() == pytest.approx(p.h_max, abs=1e-12)


def test_sampled_profile():
    g = np.arange(16.0).reshape(4, 4) + 1.0
    p = RoughnessProfile.sampled(g)
    assert p.h_min == 1.0 and p.h_max == 16.0
    z = -0.5 + (np.arange(4) + 0.5) / 4
    Z1, Z2 = np.meshgrid(z, z, indexing="ij")
    np.testing.assert_array_equal(eval_h(p, Z1, Z2), g)
    assert eval_h(p, z[1] + 3, z[2] - 2) == g[1, 2]
    # halfway between samples 0 and 3 through the periodic seam
    assert eval_h(p, -0.5, z[0]) == pytest.approx(0.5 * (g[0, 0] + g[3, 0]))
    with pytest.raises(ValueError):
        RoughnessProfile.sampled(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        RoughnessProfile.sampled(np.zeros((4, 4)))


def test_profile_validation_and_roundtrip():
    with pytest.raises(ValueError, match="kind"):
        RoughnessProfile("wavy")
    with pytest.raises(ValueError, match="positive"):
        RoughnessProfile.sinusoidal(1.0, 1.2)
    with pytest.raises(ValueError):
        RoughnessProfile.sinusoidal(1.0, 0.1, wavenumbers=(1.5, 1))
    for p in (RoughnessProfile.constant(2.0), RoughnessProfile.sinusoidal(1.0, 0.2, (0.1, 0.0), (1, 2)),
              RoughnessProfile.sampled(np.ones((4, 4)))):
        q = RoughnessProfile.from_dict(p.to_dict())
        assert q.to_dict() == p.to_dict()


def test_rotation():
    p = RoughnessProfile.sinusoidal(1.0, 0.1, (0.3, 0.05), (1, 2))
    r = p.rotated()
    for z1, z2 in ((0.1, 0.2), (-0.33, 0.41)):
        assert eval_h(r, z1, z2) == pytest.approx(eval_h(p, z2, -z1), abs=1e-14)
    g = np.random.default_rng(1).random((6, 6)) + 1
    s = RoughnessProfile.sampled(g)
    z = -0.5 + (np.arange(6) + 0.5) / 6
    assert eval_h(s.rotated(), z[1], z[4]) == pytest.approx(eval_h(s, z[4], -z[1]))


def test_grad_h_and_bilinear():
    p = RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0))
    d1, d2 = grad_h(p, 0.125, 0.0)
    assert d1 == pytest.approx(-0.3 * 2 * np.pi * np.sin(2 * np.pi * 0.125), rel=1e-6)
    assert d2 == pytest.approx(0.0, abs=1e-8)
    samples = np.arange(16.0).reshape(4, 4)
    assert periodic_bilinear(samples, -0.375, -0.375) == 0.0


def test_grids():
    g = CellGrid(8, 4)
    assert g.d1 == 1 / 8 and g.z1[0] == pytest.approx(-0.5 + 1 / 16)
    for bad in ((3, 4), (6, 2), (5, 8)):
        with pytest.raises(ValueError):
            CellGrid(*bad)
    with pytest.raises(ValueError, match="h_max"):
        CellGrid(8, 8, 8, height=1.0).box_height(RoughnessProfile.constant(1.5))
    m = MacroGrid((0, 2, 0, 1), 4, 3)
    assert m.dx == 0.5 and m.boundary_mask.sum() == 10
    with pytest.raises(ValueError):
        MacroGrid((0, 0, 0, 1), 4, 4)
    with pytest.raises(ValueError):
        MacroGrid((0, 1, 0, 1), 2, 4)
