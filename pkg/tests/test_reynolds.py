import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinbrink import oracle
from thinbrink.params import MacroGrid, RoughnessProfile, make_params
from thinbrink.profile import flow_factor
from thinbrink.reynolds import (MacroForcing, average_velocity, boundary_flux, face_fluxes, flux_divergence,
                                mobility, mobility_field, named_forcing, pressure_gradient, solve_pressure)
from thinbrink.tensor import EffectiveTensor, TensorQualityError

G = MacroGrid((0.0, 2.0, 0.0, 1.0), 24, 12)
P = make_params(2.0, 0.5, 1.0, 1.0)


def _const_B(B, g=G):
    return np.broadcast_to(np.asarray(B, dtype=float), (g.m1, g.m2, 2, 2)).copy()


def test_mobility_regimes():
    prof = RoughnessProfile.constant(1.0)
    phi = flow_factor(P.M, 1.0)
    T = EffectiveTensor(phi * np.eye(2), "subcritical", P.M)
    np.testing.assert_allclose(mobility("subcritical", prof, P, 0.3, 0.4, tensor=T), P.K / P.mu * phi * np.eye(2))
    wavy = RoughnessProfile.sinusoidal(1.0, 0.0, (0.2, 0.0), (1, 0))
    B = mobility("smooth", wavy, P, np.array([0.0, 0.5]), 0.0)
    np.testing.assert_allclose(B[:, 0, 0], P.K / P.mu * flow_factor(P.M, np.array([1.2, 0.8])))
    Bmin = mobility("smooth", wavy, P, 0.1, 0.1, use_h_min=True)
    assert Bmin[0, 0] == pytest.approx(P.K / P.mu * flow_factor(P.M, 0.8))
    Bc = mobility("critical", None, P, tensor=EffectiveTensor([[2, 0.5], [0.5, 1]], "critical", P.M))
    np.testing.assert_allclose(Bc, P.K / P.mu * np.array([[2, 0.5], [0.5, 1]]))
    with pytest.raises(TensorQualityError):
        mobility("critical", None, P, tensor=EffectiveTensor([[1, 2], [2, 1]], "critical", P.M))
    with pytest.raises(ValueError):
        mobility("subcritical", prof, P)
    with pytest.raises(ValueError):
        mobility("hyper", prof, P, tensor=T)


def test_zero_forcing():
    S = solve_pressure(_const_B(np.eye(2)), MacroForcing.zero(G), G)
    np.testing.assert_array_equal(S.p, 0.0)
    np.testing.assert_array_equal(average_velocity(S), 0.0)


def test_constant_forcing_linear_pressure():
    f = (0.3, -1.1)
    S = solve_pressure(_const_B([[1.0, 0.4], [0.4, 2.0]]), MacroForcing.constant(G, f), G)
    X, Y = G.nodes()
    lin = f[0] * X + f[1] * Y
    np.testing.assert_allclose(S.p, lin - lin.mean(), atol=1e-11)
    g1, g2 = pressure_gradient(S)
    np.testing.assert_allclose(g1, f[0], atol=1e-10)
    np.testing.assert_allclose(g2, f[1], atol=1e-10)
    np.testing.assert_allclose(average_velocity(S), 0.0, atol=1e-10)
    assert abs(S.mean) <= 1e-10 * np.abs(S.p).max()


def test_manufactured_second_order_full_tensor():
    errs = []
    for m in (16, 32, 64):
        g = MacroGrid((0.0, 2.0, 0.0, 1.0), m, m)
        p, grad = oracle.manufactured_pressure(g.bounds)
        S = solve_pressure(_const_B([[1.0, 0.3], [0.3, 0.7]], g), MacroForcing.from_function(g, grad), g)
        errs.append(oracle.l2_error(S.p, p(*g.nodes()), g.dx * g.dy))
    np.testing.assert_allclose(errs, [0.002273226759639055, 0.0005680326764653512, 0.00014199105801625828],
                               rtol=1e-6)
    assert oracle.convergence_order(errs) >= 1.8


def test_variable_mobility_manufactured():
    # B = beta(x) I with beta varying; f chosen so that p* solves the problem
    errs = []
    for m in (16, 32, 64):
        g = MacroGrid((0.0, 1.0, 0.0, 1.0), m, m)
        X, Y = g.nodes()
        beta = 1.0 + 0.5 * np.sin(np.pi * X) * np.sin(np.pi * Y)
        B = np.zeros((m, m, 2, 2))
        B[..., 0, 0] = B[..., 1, 1] = beta
        p, grad = oracle.manufactured_pressure(g.bounds)
        gx, gy = grad(X, Y)
        S = solve_pressure(B, MacroForcing(gx, gy), g)
        errs.append(oracle.l2_error(S.p, p(X, Y), g.dx * g.dy))
    assert oracle.convergence_order(errs) >= 1.8


def test_rotational_forcing_conserves():
    S = solve_pressure(_const_B(0.7 * np.eye(2)), named_forcing(G, "rotational", amplitude=2.0), G)
    assert S.divergence <= 1e-9
    assert np.abs(flux_divergence(S)).max() <= 1e-9
    assert boundary_flux(S) == 0.0
    q1, q2 = face_fluxes(S)
    # net flux through every interior vertical line vanishes
    np.testing.assert_allclose(q1.sum(axis=1), 0.0, atol=1e-10)
    np.testing.assert_allclose(q2.sum(axis=0), 0.0, atol=1e-10)
    assert np.abs(average_velocity(S)).max() > 0.1


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_gauge_invariance(c1, c2):
    base = named_forcing(G, "mixed")
    B = _const_B([[1.0, 0.2], [0.2, 0.5]])
    S0 = solve_pressure(B, base, G)
    S1 = solve_pressure(B, MacroForcing(base.f1 + c1, base.f2 + c2), G)
    np.testing.assert_allclose(average_velocity(S1), average_velocity(S0), atol=1e-10)


def test_forcing_families_and_validation():
    for name in ("zero", "constant", "gradient", "rotational", "mixed"):
        f = named_forcing(G, name)
        assert f.f1.shape == (G.m1, G.m2)
    with pytest.raises(ValueError, match="unknown forcing"):
        named_forcing(G, "vortex")
    with pytest.raises(ValueError):
        MacroForcing(np.zeros((3, 3)), np.zeros((3, 4)))
    with pytest.raises(ValueError):
        MacroForcing(np.full((3, 3), np.nan), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        solve_pressure(np.zeros((3, 3, 2, 2)), MacroForcing.zero(G), G)


def test_mobility_field_smooth_matches_pointwise():
    wavy = RoughnessProfile.sinusoidal(1.0, 0.2, (0.0, 0.0), (1, 1))
    B = mobility_field("smooth", G, wavy, P)
    X, Y = G.nodes()
    np.testing.assert_allclose(B[5, 3, 0, 0], mobility("smooth", wavy, P, X[5, 3], Y[5, 3])[0, 0])
