import numpy as np
import pytest

from thinbrink import oracle
from thinbrink.cell_subcritical import (assemble_tensor_subcritical, effective_tensor_subcritical,
                                        solve_cell_subcritical, solve_corrector)
from thinbrink.params import CellGrid, RoughnessProfile, make_params
from thinbrink.profile import flow_factor

P = make_params(1.0, 1.0, 1.0, 1.0)
LAM = RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0))
EGG = RoughnessProfile.sinusoidal(1.0, 0.3)
# a11 of the egg-crate profile on the 32 / 64 / 128 ladder, frozen from the solver
EGG_A11 = (0.07317771, 0.07322614, 0.07323829)


def test_constant_profile():
    A, sol = effective_tensor_subcritical(RoughnessProfile.constant(1.3), P, CellGrid(16, 16))
    np.testing.assert_array_equal(sol.pi1, 0.0)
    np.testing.assert_allclose(A.matrix, flow_factor(1.0, 1.3) * np.eye(2), rtol=1e-14)


def test_laminate_matches_series_parallel():
    A, sol = effective_tensor_subcritical(LAM, P, CellGrid(64, 64))
    np.testing.assert_allclose(A.matrix, oracle.laminate_tensor_1d(LAM, 1.0), rtol=1e-10, atol=1e-14)
    assert np.abs(sol.pi2).max() < 1e-14
    # pi^1 depends on z1 only and gives a constant flux
    assert np.ptp(sol.pi1, axis=1).max() < 1e-13
    q1, _ = sol.face_fluxes(1)
    assert np.ptp(q1) < 1e-12


def test_corrector_is_zero_mean_and_conservative():
    sol = solve_cell_subcritical(EGG, P, CellGrid(32, 32), tol=1e-10)
    for i in (1, 2):
        assert abs(sol.corrector(i).mean()) < 1e-10
        assert sol.divergence[i - 1] <= 10 * 1e-10 * 32**2
    pi = solve_corrector(EGG, P, CellGrid(32, 32), 1)
    np.testing.assert_allclose(pi, sol.pi1, atol=1e-8)
    with pytest.raises(ValueError):
        solve_corrector(EGG, P, CellGrid(32, 32), 3)
    with pytest.raises(ValueError):
        solve_cell_subcritical(EGG, P, CellGrid(32, 32), tol=0.0)


def test_egg_crate_ladder_and_bounds():
    vals = []
    for n in (32, 64, 128):
        A, _ = effective_tensor_subcritical(EGG, P, CellGrid(n, n))
        assert A.a11 == pytest.approx(A.a22, rel=1e-10)
        vals.append(A.a11)
    np.testing.assert_allclose(vals, EGG_A11, atol=1e-8)
    d = np.abs(np.diff(vals))
    assert np.log2(d[0] / d[1]) >= 1.5
    lo, hi = oracle.voigt_reuss_bounds(EGG, 1.0)
    assert lo <= vals[-1] <= hi


def test_rotation_swaps_entries():
    prof = RoughnessProfile.sinusoidal(1.0, 0.1, (0.2, 0.0), (1, 1))
    A, _ = effective_tensor_subcritical(prof, P, CellGrid(32, 32))
    B, _ = effective_tensor_subcritical(prof.rotated(), P, CellGrid(32, 32))
    assert B.a11 == pytest.approx(A.a22, rel=1e-8)
    assert B.a22 == pytest.approx(A.a11, rel=1e-8)


def test_sampled_profile_is_spd_and_threads_agree():
    g = 1.0 + 0.3 * np.random.default_rng(3).random((16, 16))
    prof = RoughnessProfile.sampled(g)
    A, _ = effective_tensor_subcritical(prof, P, CellGrid(32, 32))
    B, _ = effective_tensor_subcritical(prof, P, CellGrid(32, 32), workers=2)
    np.testing.assert_array_equal(A.matrix, B.matrix)
    assert A.is_spd() and A.asymmetry <= 1e-8 * np.abs(A.matrix).max()
    assert A.a12 != 0.0


def test_grid_mismatch_rejected():
    sol = solve_cell_subcritical(EGG, P, CellGrid(8, 8))
    with pytest.raises(ValueError, match="different grid"):
        assemble_tensor_subcritical(EGG, P, sol, grid=CellGrid(16, 16))
