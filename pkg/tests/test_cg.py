import numpy as np
import pytest
import scipy.sparse as sp

from thinbrink._cg import ConvergenceError, mean_projector, pcg


def _periodic_laplacian(n):
    return sp.diags([2 * np.ones(n), -np.ones(n - 1), -np.ones(n - 1), [-1.0], [-1.0]],
                    [0, 1, -1, n - 1, -(n - 1)]).tocsr()


def test_pcg_spd():
    A = sp.diags([4 * np.ones(50), -np.ones(49), -np.ones(49)], [0, 1, -1]).tocsr()
    b = np.random.default_rng(0).random(50)
    x, info = pcg(lambda v: A @ v, b, tol=1e-12)
    assert np.linalg.norm(A @ x - b) <= 1e-12 * np.linalg.norm(b)
    assert info.residual <= 1e-12


def test_pcg_singular_with_projection():
    A = _periodic_laplacian(64)
    b = np.random.default_rng(1).random(64)
    b -= b.mean()
    x, info = pcg(lambda v: A @ v, b, project=mean_projector(), tol=1e-12)
    assert abs(x.mean()) < 1e-14
    assert np.linalg.norm(A @ x - b) <= 1e-11 * np.linalg.norm(b)


def test_pcg_zero_rhs_and_failure():
    A = _periodic_laplacian(16)
    x, info = pcg(lambda v: A @ v, np.zeros(16))
    np.testing.assert_array_equal(x, 0.0)
    b = np.random.default_rng(2).random(200)
    B = sp.diags(np.linspace(1, 1e6, 200))
    with pytest.raises(ConvergenceError) as err:
        pcg(lambda v: B @ v, b, tol=1e-14, maxiter=3)
    assert err.value.residual > 1e-14 and len(err.value.history) >= 3
