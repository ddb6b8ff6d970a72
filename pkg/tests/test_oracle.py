import warnings

import numpy as np
import pytest

from thinbrink import oracle
from thinbrink.params import RoughnessProfile

LAMINATE = (0.0583743501883815, 0.08388071501513703)  # harmonic, arithmetic for 1 + 0.3 cos(2 pi z1), M = 1


def test_brinkman_bvp():
    r = oracle.brinkman_bvp_1d(1.0, 1.0, 4096)
    assert r.u[0] == 0.0 and r.u[-1] == 0.0
    assert r.residual < 1e-9
    assert oracle.brinkman_bvp_richardson(1.0, 1.0).at(0.5) == pytest.approx(1 - 1 / np.cosh(0.5), abs=1e-7)
    with pytest.raises(ValueError):
        oracle.brinkman_bvp_1d(1.0, 1.0, 64)


def test_brinkman_bvp_properties():
    for M in (0.1, 1.0, 30.0):
        assert oracle.brinkman_bvp_1d(M, 1.0, 512).u.max() <= 1.0
    M, h = 0.01, 1.0
    r = oracle.brinkman_bvp_1d(M, h)
    ref = M**2 / 2 * r.z * (h - r.z)
    assert np.abs(r.u - ref).max() / ref.max() < 1e-3


def test_heat_bvp():
    r = oracle.heat_bvp_1d(lambda z: 0 * z, 0.0, 1.0, 1.0, 256)
    np.testing.assert_array_equal(r.u, 0.0)
    r = oracle.heat_bvp_1d(lambda z: 0 * z, 2.0, 4.0, 1.5, 256)
    np.testing.assert_allclose(r.u, 0.5 * (1.5 - r.z), atol=1e-12)
    # constant source: T = (S/2k)(h^2 - z^2) exactly for the ghost-node scheme
    r = oracle.heat_bvp_1d(np.ones(257), 0.0, 1.0, 1.0, 256)
    np.testing.assert_allclose(r.u, 0.5 * (1 - r.z**2), atol=1e-12)
    with pytest.raises(ValueError):
        oracle.heat_bvp_1d(np.ones(10), 0.0, 1.0, 1.0, 256)


def test_quadrature_helpers():
    assert oracle.integrate(np.sin, 0, np.pi, 64) == pytest.approx(2.0, abs=1e-7)
    assert oracle.integrate(lambda x: x**3, 0, 1, 3) == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError):
        oracle.simpson(np.ones(4), 0.1)
    assert oracle.trapezoid(np.array([0.0, 1.0, 2.0]), 0.5) == pytest.approx(1.0)


def test_laminate():
    const = oracle.laminate_tensor_1d(RoughnessProfile.constant(1.0), 1.0, 1000)
    np.testing.assert_allclose(np.diag(const), [0.07576568547998053] * 2, rtol=1e-13)
    lam = RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0))
    A = oracle.laminate_tensor_1d(lam, 1.0)
    np.testing.assert_allclose(np.diag(A), LAMINATE, rtol=1e-12)
    B = oracle.laminate_tensor_1d(lam.rotated(), 1.0)
    np.testing.assert_allclose(np.diag(B), LAMINATE[::-1], rtol=1e-12)
    with pytest.raises(ValueError, match="one direction"):
        oracle.laminate_tensor_1d(RoughnessProfile.sinusoidal(1.0, 0.3), 1.0)


def test_laminate_small_amplitude():
    phi1 = 0.07576568547998053
    errs = []
    for a in (0.04, 0.02, 0.01):
        A = oracle.laminate_tensor_1d(RoughnessProfile.sinusoidal(1.0, 0.0, (a, 0.0), (1, 0)), 1.0, 4096)
        errs.append(np.abs(np.diag(A) - phi1).max())
    assert oracle.convergence_order(errs) == pytest.approx(2.0, abs=0.05)


def test_convergence_order():
    assert oracle.convergence_order([1.0, 0.25, 0.0625]) == pytest.approx(2.0)
    with pytest.warns(UserWarning):
        assert oracle.convergence_order([1.0, 1.0, 1.0]) == 0.0
    with pytest.raises(ValueError):
        oracle.convergence_order([1.0])


def test_voigt_reuss_and_manufactured():
    lo, hi = oracle.voigt_reuss_bounds(RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0)), 1.0)
    assert (lo, hi) == pytest.approx(LAMINATE, rel=1e-12)
    p, grad = oracle.manufactured_pressure((0, 2, 0, 1))
    assert p(0.0, 0.0) == 1.0
    gx, gy = grad(np.array([0.0, 2.0, 1.0]), np.array([0.3, 0.7, 0.0]))
    np.testing.assert_allclose(gx[:2], 0.0, atol=1e-15)
    assert gy[2] == pytest.approx(0.0, abs=1e-15)
    assert oracle.l2_error(np.ones(4) + 3, np.ones(4), 0.25) == 0.0


def test_oracle_is_independent():
    import ast
    import inspect

    tree = ast.parse(inspect.getsource(oracle))
    imported = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom)}
    assert imported <= {"__future__", "dataclasses", "scipy.linalg", "params"}
