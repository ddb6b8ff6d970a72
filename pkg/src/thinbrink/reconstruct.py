"""Velocity and temperature fields rebuilt from the macro pressure and the cell data.

Subcritical regime:  u(x', z) = (K/mu) s(z3; h(z')) sum_i F_i(x') (e_i + grad pi^i(z')),
with F = f' - grad p and s the Brinkman shape. The temperature in each column
solves  -k T'' = S,  T(h) = 0,  -k T'(0) = b,  with S = (mu/K)|u|^2 + mu_eff |d_z3 u|^2,
and is written as a double integral evaluated by cumulative Simpson quadrature.

Smooth regime: the same formulas with no corrector and h = h(x') (or h_min).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import RegularGridInterpolator

from .params import PhysicalParams, RoughnessProfile, eval_h, periodic_bilinear
from .profile import shape, shape_dz
from .reynolds import MacroPressure, driving_force

MIN_QUAD = 64


def _check_quad(quad_n):
    if int(quad_n) < MIN_QUAD:
        raise ValueError(f"quad_n must be >= {MIN_QUAD}, got {quad_n}")
    return int(quad_n) + int(quad_n) % 2


def force_at(pressure, x1, x2):
    """f' - grad p at arbitrary x' (bilinear between nodes, constant in the boundary half-cells).

    ``pressure`` may also be a plain 2-vector, taken as a uniform local drive.
    """
    if not isinstance(pressure, MacroPressure):
        F = np.asarray(pressure, dtype=float).reshape(2)
        shp = np.broadcast(np.asarray(x1), np.asarray(x2)).shape
        return np.broadcast_to(F, shp + (2,)).copy()
    g = pressure.grid
    F = driving_force(pressure)
    x1 = np.clip(np.asarray(x1, dtype=float), g.x[0], g.x[-1])
    x2 = np.clip(np.asarray(x2, dtype=float), g.y[0], g.y[-1])
    pts = np.stack(np.broadcast_arrays(x1, x2), axis=-1)
    out = np.stack([RegularGridInterpolator((g.x, g.y), F[..., c])(pts.reshape(-1, 2)) for c in (0, 1)], axis=-1)
    return out.reshape(pts.shape)


def _corrector_gradients(correctors, z1, z2):
    """(G^1, G^2) with G^i = e_i + grad pi^i at z', each of shape z.shape + (2,)."""
    out = []
    for i in (1, 2):
        c1, c2 = correctors.center_gradient(i)
        out.append(np.stack([periodic_bilinear(c1, z1, z2), periodic_bilinear(c2, z1, z2)], axis=-1))
    return out


def reconstruct_velocity_subcritical(x1, x2, z1, z2, z3, pressure: MacroPressure, correctors,
                                     profile: RoughnessProfile, params: PhysicalParams):
    """u'(x', z) as an array of shape broadcast(...) + (2,); zero above the rough top."""
    x1, x2, z1, z2, z3 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, z1, z2, z3)))
    if np.any(z3 < 0):
        raise ValueError("z3 must be non-negative")
    F = force_at(pressure, x1, x2)
    G1, G2 = _corrector_gradients(correctors, z1, z2)
    h = np.asarray(eval_h(profile, z1, z2), dtype=float)
    s = np.where(z3 <= h, shape(params.M, h, np.minimum(z3, h)), 0.0)
    return params.K / params.mu * s[..., None] * (F[..., :1] * G1 + F[..., 1:] * G2)


@dataclass(frozen=True)
class TemperatureProfile:
    z3: np.ndarray
    T: np.ndarray
    h: float
    bottom_flux_error: float

    def at(self, z3):
        return np.interp(z3, self.z3, self.T)


def _column_temperature(h, G2, params: PhysicalParams, quad_n):
    """T on quad_n + 1 equispaced nodes of (0, h) for squared driving magnitude G2 = |sum F_i G^i|^2.

    ``h`` and ``G2`` may be arrays of columns; the z3 axis is appended last.
    """
    M, K, mu = params.M, params.K, params.mu
    h = np.asarray(h, dtype=float)[..., None]
    t = np.linspace(0.0, 1.0, quad_n + 1)
    dt = 1.0 / quad_n
    z = h * t
    scale = (K / mu) ** 2 * np.asarray(G2, dtype=float)[..., None]
    S = scale * (mu / K * shape(M, h, z) ** 2 + params.mu_eff * shape_dz(M, h, z) ** 2)
    inner = h * cumulative_simpson(S, dx=dt, initial=0.0)        # int_0^xi S
    outer = h * cumulative_simpson(inner, dx=dt, initial=0.0)    # int_0^z3 (int_0^xi S)
    T = params.b / params.k * (h - z) + (outer[..., -1:] - outer) / params.k
    T[..., -1] = 0.0
    dT0 = (-3 * T[..., 0] + 4 * T[..., 1] - T[..., 2]) / (2 * h[..., 0] * dt)
    return z, T, np.abs(-params.k * dT0 - params.b)


def reconstruct_temperature_subcritical(x1, x2, z1, z2, pressure: MacroPressure, correctors,
                                        profile: RoughnessProfile, params: PhysicalParams,
                                        quad_n=1024) -> TemperatureProfile:
    """T(x', z', .) on the column above a single point z'."""
    quad_n = _check_quad(quad_n)
    F = force_at(pressure, x1, x2).reshape(2)
    G1, G2 = _corrector_gradients(correctors, z1, z2)
    v = F[0] * np.reshape(G1, 2) + F[1] * np.reshape(G2, 2)
    h = float(eval_h(profile, z1, z2))
    z, T, err = _column_temperature(h, float(v @ v), params, quad_n)
    return TemperatureProfile(z, T, h, float(err))


def _h_at(h_of_x, x1, x2):
    if callable(h_of_x):
        return np.asarray(h_of_x(x1, x2), dtype=float)
    if isinstance(h_of_x, RoughnessProfile):
        return np.asarray(eval_h(h_of_x, x1, x2), dtype=float)
    return np.full(np.broadcast(np.asarray(x1), np.asarray(x2)).shape, float(h_of_x))


def smooth_velocity(x1, x2, z3, pressure: MacroPressure, h_of_x, params: PhysicalParams):
    """u*(x', z3) = (K/mu) s(z3; h(x')) (f' - grad p). ``h_of_x``: callable, profile or a number."""
    x1, x2, z3 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, z3)))
    h = _h_at(h_of_x, x1, x2) * np.ones(z3.shape)
    if np.any(z3 < 0) or np.any(z3 > h * (1 + 1e-14)):
        raise ValueError("z3 must lie in [0, h(x')]")
    F = force_at(pressure, x1, x2)
    return params.K / params.mu * shape(params.M, h, np.minimum(z3, h))[..., None] * F


def smooth_temperature(x1, x2, pressure: MacroPressure, h_of_x, params: PhysicalParams,
                       quad_n=1024) -> TemperatureProfile:
    """T*(x', .) on the column above x' by the same quadrature route as the subcritical case."""
    quad_n = _check_quad(quad_n)
    F = force_at(pressure, x1, x2).reshape(2)
    h = float(_h_at(h_of_x, x1, x2))
    z, T, err = _column_temperature(h, float(F @ F), params, quad_n)
    return TemperatureProfile(z, T, h, float(err))


@dataclass(frozen=True)
class ReconstructedFields:
    """Averaged fields on the macro nodes.

    ``V_av`` has shape (m1, m2, 2); ``T_av`` (m1, m2). ``flux_tensor`` and
    ``heat_tensor`` are the column-quadrature weights that map F to V_av and
    to the dissipation part of T_av; ``T_b`` is the b-driven part of T_av.
    """

    regime: str
    force: np.ndarray
    V_av: np.ndarray
    T_av: np.ndarray
    flux_tensor: np.ndarray
    heat_tensor: np.ndarray
    T_b: float
    checks: dict
    _u_tilde: object = dataclasses.field(default=None, repr=False)

    def u_tilde(self, i, j, z3):
        """Horizontal average over Z' of u' at node (i, j), at heights z3 (shape z3.shape + (2,))."""
        if self._u_tilde is None:
            raise ValueError("no z3 profile available for this regime")
        return self._u_tilde(self.force[i, j], np.asarray(z3, dtype=float))


def _column_weights(h, params, quad_n):
    """Per column: (int s dz3, int T dz3 for unit G and b = 0, int (b/k)(h - z3) dz3)."""
    h = np.asarray(h, dtype=float).ravel()
    t = np.linspace(0.0, 1.0, quad_n + 1)
    z = h[:, None] * t
    phi = h * simpson(shape(params.M, h[:, None], z), dx=1.0 / quad_n)
    _, T, _ = _column_temperature(h, np.ones_like(h), dataclasses.replace(params, b=0.0), quad_n)
    heat = h * simpson(T, dx=1.0 / quad_n)
    bpart = h * simpson(params.b / params.k * (h[:, None] - z), dx=1.0 / quad_n)
    return phi, heat, bpart


def _assemble(regime, F, flux_tensor, heat_tensor, T_b, params, checks, u_tilde=None):
    scale = params.K / params.mu
    V = scale * np.einsum("ij,...j->...i", flux_tensor, F)
    T = T_b + np.einsum("...i,ij,...j->...", F, heat_tensor, F)
    return ReconstructedFields(regime, F, V, T, flux_tensor, heat_tensor, T_b, checks, u_tilde)


def averages_subcritical(pressure: MacroPressure, correctors, profile: RoughnessProfile,
                         params: PhysicalParams, quad_n=256) -> ReconstructedFields:
    """V_av and T_av at every macro node by quadrature of the reconstructed fields over Z.

    Both fields are linear (velocity) or quadratic (temperature) in F, so the
    cell quadrature is done once per column and contracted with F per node.
    """
    quad_n = _check_quad(quad_n)
    g = correctors.grid
    Z1, Z2 = g.centers()
    h = eval_h(profile, Z1, Z2)
    phi, heat, bpart = _column_weights(h, params, quad_n)
    G = [np.stack(correctors.center_gradient(i), axis=-1).reshape(-1, 2) for i in (1, 2)]
    flux = np.array([[np.mean(phi * G[i][:, j]) for j in (0, 1)] for i in (0, 1)])
    heat_t = np.array([[np.mean(heat * np.sum(G[i] * G[j], axis=1)) for j in (0, 1)] for i in (0, 1)])
    F = driving_force(pressure)

    def u_tilde(Fn, z3):
        s = shape(params.M, h.ravel()[:, None], np.minimum(z3.ravel()[None, :], h.ravel()[:, None]))
        s = np.where(z3.ravel()[None, :] <= h.ravel()[:, None], s, 0.0)
        v = Fn[0] * G[0] + Fn[1] * G[1]
        return (params.K / params.mu * (s[:, :, None] * v[:, None, :]).mean(0)).reshape(z3.shape + (2,))

    checks = {"vertical_flux": 0.0, "bottom_flux_error": 0.0}
    return _assemble("subcritical", F, flux, heat_t, float(np.mean(bpart)), params, checks, u_tilde)


def averages_smooth(pressure: MacroPressure, h_of_x, params: PhysicalParams, quad_n=256) -> ReconstructedFields:
    """Node-wise column quadrature with h = h(x') (per node; no cell variable)."""
    quad_n = _check_quad(quad_n)
    g = pressure.grid
    X, Y = g.nodes()
    h = _h_at(h_of_x, X, Y) * np.ones(X.shape)
    phi, heat, bpart = (a.reshape(X.shape) for a in _column_weights(h, params, quad_n))
    F = driving_force(pressure)
    V = params.K / params.mu * phi[..., None] * F
    T = bpart + heat * np.sum(F * F, axis=-1)
    # tensors reported for a uniform film only; zero otherwise
    uniform = np.ptp(h) == 0
    flux = phi.flat[0] * np.eye(2) if uniform else np.zeros((2, 2))
    heat_t = heat.flat[0] * np.eye(2) if uniform else np.zeros((2, 2))

    def u_tilde(Fn, z3):
        raise ValueError("use smooth_velocity for the smooth regime")

    return ReconstructedFields("smooth", F, V, T, flux, heat_t, float(bpart.mean()),
                               {"vertical_flux": 0.0, "bottom_flux_error": 0.0})


def averages_critical(pressure: MacroPressure, solution, params: PhysicalParams, tol=1e-10) -> ReconstructedFields:
    """V_av from the cell velocities, T_av from cell temperature solves.

    T is affine in b and quadratic in F, so four cell solves (b alone, then
    F = e1, e2, e1 + e2 with b = 0) give T_av at every node by polarization.
    """
    from .cell_critical import average_temperature, solve_cell_temperature, vertical_flux

    cell = solution.cell
    flux = np.zeros((2, 2))
    for i in (1, 2):
        u, v, _ = cell.split(solution.velocities[i])
        flux[i - 1] = u.sum() * cell.volume, v.sum() * cell.volume
    flux = 0.5 * (flux + flux.T)
    b_free = dataclasses.replace(params, b=0.0)
    t = {}
    for key, f in (("11", (1.0, 0.0)), ("22", (0.0, 1.0)), ("s", (1.0, 1.0))):
        t[key] = average_temperature(solve_cell_temperature(solution, b_free, f, tol=tol), solution)
    t12 = 0.5 * (t["s"] - t["11"] - t["22"])
    heat_t = np.array([[t["11"], t12], [t12, t["22"]]])
    Tb = solve_cell_temperature(solution, params, (0.0, 0.0), tol=tol)
    checks = {"vertical_flux": max(abs(vertical_flux(solution, i)) for i in (1, 2)),
              "bottom_flux_error": Tb.bottom_flux_error}
    F = driving_force(pressure)
    return _assemble("critical", F, flux, heat_t, average_temperature(Tb, solution), params, checks)
