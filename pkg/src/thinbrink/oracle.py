"""Brute-force reference computations used to check the closed forms and solvers.

Nothing here imports the solver modules; the only shared code is the
profile/geometry data layer in :mod:`thinbrink.params`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .params import RoughnessProfile, eval_h


@dataclass(frozen=True)
class BVPResult:
    z: np.ndarray
    u: np.ndarray
    residual: float

    def at(self, z3):
        return np.interp(z3, self.z, self.u)


def _tridiag_solve(lower, diag, upper, rhs):
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs)


def brinkman_bvp_1d(M, h, n=4096) -> BVPResult:
    """Second-order finite differences for -(1/M^2) u'' + u = 1, u(0) = u(h) = 0."""
    if n < 128:
        raise ValueError("brinkman_bvp_1d needs n >= 128 intervals")
    z = np.linspace(0.0, h, n + 1)
    dz = h / n
    c = 1.0 / (M * dz) ** 2
    m = n - 1
    diag = np.full(m, 2 * c + 1.0)
    off = np.full(m - 1, -c)
    u_int = _tridiag_solve(off, diag, off, np.ones(m))
    u = np.concatenate([[0.0], u_int, [0.0]])
    res = -c * (u[2:] - 2 * u[1:-1] + u[:-2]) + u[1:-1] - 1.0
    return BVPResult(z, u, float(np.abs(res).max()))


def brinkman_bvp_richardson(M, h, n=4096) -> BVPResult:
    """Richardson extrapolation of two brinkman_bvp_1d solves (n and 2n intervals)."""
    coarse = brinkman_bvp_1d(M, h, n)
    fine = brinkman_bvp_1d(M, h, 2 * n)
    u = (4 * fine.u[::2] - coarse.u) / 3
    return BVPResult(coarse.z, u, max(coarse.residual, fine.residual))


def heat_bvp_1d(source, b, k, h, n=8192) -> BVPResult:
    """-k T'' = S on (0, h), T(h) = 0, -k T'(0) = b.

    ``source`` is a callable S(z3) or an array of n + 1 nodal samples. The
    flux condition uses a ghost node, so the scheme is second order.
    """
    if n < 128:
        raise ValueError("heat_bvp_1d needs n >= 128 intervals")
    z = np.linspace(0.0, h, n + 1)
    dz = h / n
    S = source(z) if callable(source) else np.asarray(source, dtype=float)
    if S.shape != z.shape:
        raise ValueError(f"source needs {n + 1} samples, got {S.shape}")
    # unknowns T_0..T_{n-1}; T_n = 0
    m = n
    diag = np.full(m, 2.0)
    upper = np.full(m - 1, -1.0)
    lower = np.full(m - 1, -1.0)
    upper[0] = -2.0
    rhs = S[:m] * dz**2 / k
    rhs[0] += 2 * dz * b / k
    T_int = _tridiag_solve(lower, diag, upper, rhs)
    T = np.concatenate([T_int, [0.0]])
    res = -k * (T[2:] - 2 * T[1:-1] + T[:-2]) / dz**2 - S[1:-1]
    return BVPResult(z, T, float(np.abs(res).max()))


def simpson(y, dx):
    """Composite Simpson rule on an odd number of equally spaced samples."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] % 2 == 0:
        raise ValueError("composite Simpson needs an even number of intervals")
    return dx / 3 * (y[..., 0] + y[..., -1] + 4 * y[..., 1:-1:2].sum(-1) + 2 * y[..., 2:-1:2].sum(-1))


def integrate(f, a, b, n=1000):
    """Simpson quadrature of a vectorised callable; n is bumped to even."""
    n += n % 2
    x = np.linspace(a, b, n + 1)
    return simpson(f(x), (b - a) / n)


def trapezoid(y, dx):
    y = np.asarray(y, dtype=float)
    return dx * (y[..., 1:-1].sum(-1) + 0.5 * (y[..., 0] + y[..., -1]))


# Gauss-Legendre rule for the flow factor by quadrature of the literal
# exponential profile; independent of any closed form for its integral.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def literal_profile(M, h, z3):
    """A1 e^{M z3} + A2 e^{-M z3} + 1 with the coefficients written out literally."""
    em, ep = np.exp(-M * h), np.exp(M * h)
    A1 = -(1 - em) / (ep - em)
    A2 = (1 - ep) / (ep - em)
    return A1 * np.exp(M * z3) + A2 * np.exp(-M * z3) + 1


def flow_factor_quadrature(M, h):
    """int_0^h of the literal profile by 64-point Gauss-Legendre (valid for 0.05 < M h < 300)."""
    h = np.asarray(h, dtype=float)
    z = 0.5 * h[..., None] * (_GL_NODES + 1)
    vals = literal_profile(M, h[..., None], z)
    return 0.5 * h * (vals * _GL_WEIGHTS).sum(-1)


def laminate_tensor_1d(profile: RoughnessProfile, M, n=100_000):
    """diag(harmonic mean, arithmetic mean) of phi for a profile varying in one direction.

    Rows/columns are in the (z1, z2) frame: if h varies with z1, the z1 entry
    is the harmonic mean; if it varies with z2, the roles swap.
    """
    s = np.linspace(-0.5, 0.5, 257)
    S1, S2 = np.meshgrid(s, s, indexing="ij")
    H = eval_h(profile, S1, S2)
    var1 = np.ptp(H, axis=0).max()   # variation along z1
    var2 = np.ptp(H, axis=1).max()   # variation along z2
    if var1 > 1e-13 and var2 > 1e-13:
        raise ValueError("laminate_tensor_1d needs a profile that varies in one direction only")
    # periodic midpoint rule (spectrally accurate for smooth periodic h)
    t = -0.5 + (np.arange(n) + 0.5) / n
    along_z2 = var2 > var1
    h = eval_h(profile, np.zeros(n), t) if along_z2 else eval_h(profile, t, np.zeros(n))
    phi = flow_factor_quadrature(M, h)
    harmonic = 1.0 / np.mean(1.0 / phi)
    arithmetic = np.mean(phi)
    if harmonic > arithmetic * (1 + 1e-14):
        raise AssertionError("harmonic mean exceeds arithmetic mean")
    return np.diag([arithmetic, harmonic]) if along_z2 else np.diag([harmonic, arithmetic])


def voigt_reuss_bounds(profile: RoughnessProfile, M, n=512):
    """(harmonic mean, arithmetic mean) of phi over Z' by the periodic midpoint rule."""
    t = -0.5 + (np.arange(n) + 0.5) / n
    Z1, Z2 = np.meshgrid(t, t, indexing="ij")
    phi = flow_factor_quadrature(M, eval_h(profile, Z1, Z2))
    return 1.0 / np.mean(1.0 / phi), np.mean(phi)


def convergence_order(errors, sizes=None):
    """Least-squares slope of log(error) against log(mesh size).

    ``sizes`` defaults to a halving ladder 1, 1/2, 1/4, ... Non-monotone or
    flat error sequences yield order 0 with a warning.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size < 3:
        raise ValueError("convergence_order needs at least 3 ladder points")
    sizes = 0.5 ** np.arange(errors.size) if sizes is None else np.asarray(sizes, dtype=float)
    order = np.argsort(sizes)[::-1]
    e = errors[order]
    if np.any(e <= 0) or np.any(np.diff(e) >= 0):
        warnings.warn(f"errors are not strictly decreasing under refinement: {e}")
        return 0.0
    slope = np.polyfit(np.log(sizes[order]), np.log(e), 1)[0]
    return float(slope)


def manufactured_pressure(bounds):
    """p*(x) = cos(pi x1'/L1) cos(pi x2'/L2) (shifted to the box) and its gradient."""
    x0, x1, y0, y1 = bounds
    L1, L2 = x1 - x0, y1 - y0

    def p(X, Y):
        return np.cos(np.pi * (X - x0) / L1) * np.cos(np.pi * (Y - y0) / L2)

    def grad(X, Y):
        gx = -np.pi / L1 * np.sin(np.pi * (X - x0) / L1) * np.cos(np.pi * (Y - y0) / L2)
        gy = -np.pi / L2 * np.cos(np.pi * (X - x0) / L1) * np.sin(np.pi * (Y - y0) / L2)
        return gx, gy

    return p, grad


def l2_error(numeric, exact, cell_area):
    """Discrete L2 error after removing the mean difference (pressures are up to a constant)."""
    d = np.asarray(numeric) - np.asarray(exact)
    d = d - d.mean()
    return float(np.sqrt(np.sum(d**2) * cell_area))
