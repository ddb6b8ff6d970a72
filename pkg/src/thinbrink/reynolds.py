"""Macroscopic Reynolds problem for the zero-mean limit pressure on a rectangle.

    -div( B(x') (grad p - f') ) = 0  in omega,   B (grad p - f') . n = 0  on the boundary,

with B = (K/mu) A_M (rough regimes, constant) or B = (K/mu) phi_M(h(x')) I
(smooth regime). The average velocity is V' = B (f' - grad p).

Cell-centred finite volumes: two-point fluxes with harmonic face averages for
the diagonal of B, a corner-gradient term for its off-diagonal part. The
scheme is the exact minimiser of a discrete energy, so the matrix is
symmetric and the no-flux condition is natural.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._cg import mean_projector, pcg
from .params import MacroGrid, PhysicalParams, RoughnessProfile, eval_h
from .profile import flow_factor
from .tensor import EffectiveTensor, check_spd


@dataclass(frozen=True)
class MacroForcing:
    """f' sampled at the macro nodes (cell centres)."""

    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        f1, f2 = np.asarray(self.f1, dtype=float), np.asarray(self.f2, dtype=float)
        if f1.shape != f2.shape or f1.ndim != 2:
            raise ValueError("forcing components must be 2D arrays of equal shape")
        if not (np.all(np.isfinite(f1)) and np.all(np.isfinite(f2))):
            raise ValueError("forcing must be finite")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    @classmethod
    def from_function(cls, grid: MacroGrid, func):
        X, Y = grid.nodes()
        f1, f2 = func(X, Y)
        return cls(np.broadcast_to(f1, X.shape).astype(float), np.broadcast_to(f2, X.shape).astype(float))

    @classmethod
    def zero(cls, grid: MacroGrid):
        return cls(np.zeros((grid.m1, grid.m2)), np.zeros((grid.m1, grid.m2)))

    @classmethod
    def constant(cls, grid: MacroGrid, value):
        return cls(np.full((grid.m1, grid.m2), float(value[0])), np.full((grid.m1, grid.m2), float(value[1])))


def named_forcing(grid: MacroGrid, name: str, **kw) -> MacroForcing:
    """Analytic forcing families usable from a JSON config.

    ``zero``; ``constant`` (value=[f1, f2]); ``gradient`` (grad of the cosine
    mode, amplitude=a); ``rotational`` (curl of psi = a sin^2 sin^2, which is
    divergence-free and tangential on the boundary); ``mixed`` (sum of the
    last two).
    """
    x0, x1, y0, y1 = grid.bounds
    L1, L2 = x1 - x0, y1 - y0
    a = float(kw.get("amplitude", 1.0))

    def grad(X, Y):
        s, t = np.pi * (X - x0) / L1, np.pi * (Y - y0) / L2
        return -a * np.pi / L1 * np.sin(s) * np.cos(t), -a * np.pi / L2 * np.cos(s) * np.sin(t)

    def rot(X, Y):
        s, t = np.pi * (X - x0) / L1, np.pi * (Y - y0) / L2
        # psi = a sin^2(s) sin^2(t);  f = (-d psi/dy, d psi/dx)
        dpsi_dx = a * np.pi / L1 * np.sin(2 * s) * np.sin(t) ** 2
        dpsi_dy = a * np.pi / L2 * np.sin(s) ** 2 * np.sin(2 * t)
        return -dpsi_dy, dpsi_dx

    if name == "zero":
        return MacroForcing.zero(grid)
    if name == "constant":
        return MacroForcing.constant(grid, kw.get("value", (1.0, 0.0)))
    if name == "gradient":
        return MacroForcing.from_function(grid, grad)
    if name == "rotational":
        return MacroForcing.from_function(grid, rot)
    if name == "mixed":
        return MacroForcing.from_function(grid, lambda X, Y: tuple(g + r for g, r in zip(grad(X, Y), rot(X, Y))))
    raise ValueError(f"unknown forcing family {name!r}; expected zero, constant, gradient, rotational, mixed")


def mobility(regime, profile: RoughnessProfile | None, params: PhysicalParams, x1=0.0, x2=0.0,
             tensor: EffectiveTensor | None = None, use_h_min=False, macro_height=None):
    """2x2 mobility B at x' (broadcast over array inputs: result shape (..., 2, 2)).

    Rough regimes use the constant (K/mu) A_M; note 1/(M^2 mu_eff) == K/mu.
    The smooth regime uses (K/mu) phi_M(h(x')) I with h taken from
    ``macro_height(x1, x2)``, the profile evaluated at x', or h_min.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    scale = params.K / params.mu
    if regime in ("subcritical", "critical"):
        if tensor is None:
            raise ValueError(f"{regime} mobility needs the effective tensor")
        A = check_spd(tensor.matrix, what=f"{regime} A_M")
        return np.broadcast_to(scale * A, x1.shape + (2, 2)).copy()
    if regime == "smooth":
        if use_h_min:
            if profile is None:
                raise ValueError("use_h_min needs a roughness profile")
            h = np.full(x1.shape, profile.h_min)
        elif macro_height is not None:
            h = np.asarray(macro_height(x1, x2), dtype=float) * np.ones(x1.shape)
        else:
            h = eval_h(profile, x1, x2) * np.ones(x1.shape)
        beta = scale * flow_factor(params.M, h)
        B = np.zeros(x1.shape + (2, 2))
        B[..., 0, 0] = B[..., 1, 1] = beta
        return B
    raise ValueError(f"unknown regime {regime!r}")


def mobility_field(regime, grid: MacroGrid, profile, params, **kw):
    X, Y = grid.nodes()
    return mobility(regime, profile, params, X, Y, **kw)


@dataclass(frozen=True)
class MacroPressure:
    grid: MacroGrid
    p: np.ndarray
    mean: float
    residual: float          # relative CG residual
    divergence: float        # max |discrete div of the flux|
    B: np.ndarray            # mobility at the nodes, (m1, m2, 2, 2)
    forcing: MacroForcing


def _diff(m, d):
    # forward difference from m centres to the m-1 interior faces
    return sp.diags([-np.ones(m - 1), np.ones(m - 1)], [0, 1], shape=(m - 1, m)) / d


def _avg(m):
    return sp.diags([0.5 * np.ones(m - 1), 0.5 * np.ones(m - 1)], [0, 1], shape=(m - 1, m))


class _Discretization:
    def __init__(self, grid: MacroGrid, B):
        m1, m2 = grid.m1, grid.m2
        I1, I2 = sp.identity(m1), sp.identity(m2)
        self.D1 = sp.kron(_diff(m1, grid.dx), I2, format="csr")       # -> x-faces
        self.D2 = sp.kron(I1, _diff(m2, grid.dy), format="csr")       # -> y-faces
        self.A1 = sp.kron(_avg(m1), I2, format="csr")                 # centres -> x-faces
        self.A2 = sp.kron(I1, _avg(m2), format="csr")
        # corner gradients from the four surrounding centres
        self.C1 = sp.kron(_diff(m1, grid.dx), _avg(m2), format="csr")
        self.C2 = sp.kron(_avg(m1), _diff(m2, grid.dy), format="csr")
        self.Cavg = sp.kron(_avg(m1), _avg(m2), format="csr")
        b11, b22 = B[..., 0, 0].ravel(), B[..., 1, 1].ravel()
        b12 = 0.5 * (B[..., 0, 1] + B[..., 1, 0]).ravel()
        self.w1 = self._harmonic(b11, self.A1, m1, m2, axis=0)
        self.w2 = self._harmonic(b22, self.A2, m1, m2, axis=1)
        self.w12 = self.Cavg @ b12
        self.K = (self.D1.T @ sp.diags(self.w1) @ self.D1 + self.D2.T @ sp.diags(self.w2) @ self.D2
                  + self.C1.T @ sp.diags(self.w12) @ self.C2 + self.C2.T @ sp.diags(self.w12) @ self.C1).tocsr()

    @staticmethod
    def _harmonic(b, A, m1, m2, axis):
        bb = b.reshape(m1, m2)
        lo = bb[:-1, :] if axis == 0 else bb[:, :-1]
        hi = bb[1:, :] if axis == 0 else bb[:, 1:]
        return (2 * lo * hi / (lo + hi)).ravel()

    def rhs(self, f: MacroForcing):
        f1, f2 = f.f1.ravel(), f.f2.ravel()
        return (self.D1.T @ (self.w1 * (self.A1 @ f1)) + self.D2.T @ (self.w2 * (self.A2 @ f2))
                + self.C1.T @ (self.w12 * (self.Cavg @ f2)) + self.C2.T @ (self.w12 * (self.Cavg @ f1)))


def solve_pressure(B, forcing: MacroForcing, grid: MacroGrid, tol=1e-12, maxiter=None) -> MacroPressure:
    """Zero-mean discrete pressure; ``B`` is the (m1, m2, 2, 2) mobility field."""
    B = np.asarray(B, dtype=float)
    if B.shape != (grid.m1, grid.m2, 2, 2) or forcing.f1.shape != (grid.m1, grid.m2):
        raise ValueError("mobility / forcing shapes do not match the macro grid")
    disc = _Discretization(grid, B)
    r = disc.rhs(forcing)
    diag = disc.K.diagonal()
    p, info = pcg(lambda v: disc.K @ v, r, precond=lambda v: v / diag, project=mean_projector(),
                  tol=tol, maxiter=maxiter)
    div = float(np.abs(disc.K @ p - r).max())
    P = p.reshape(grid.m1, grid.m2)
    return MacroPressure(grid, P, float(P.mean()), info.residual, div, B, forcing)


def face_fluxes(pressure: MacroPressure):
    """Normal fluxes B (f' - grad p) . e on interior x-faces and y-faces (two-point part)."""
    g = pressure.grid
    disc = _Discretization(g, pressure.B)
    f1, f2 = pressure.forcing.f1.ravel(), pressure.forcing.f2.ravel()
    p = pressure.p.ravel()
    q1 = disc.w1 * (disc.A1 @ f1 - disc.D1 @ p)
    q2 = disc.w2 * (disc.A2 @ f2 - disc.D2 @ p)
    return q1.reshape(g.m1 - 1, g.m2), q2.reshape(g.m1, g.m2 - 1)


def flux_divergence(pressure: MacroPressure):
    """Discrete divergence of the full flux per cell (shape (m1, m2)); zero for a converged solve."""
    disc = _Discretization(pressure.grid, pressure.B)
    res = disc.K @ pressure.p.ravel() - disc.rhs(pressure.forcing)
    return res.reshape(pressure.grid.m1, pressure.grid.m2)


def boundary_flux(pressure: MacroPressure):
    """Net flux through the boundary of omega; the scheme has no boundary faces, so it is 0."""
    q1, q2 = face_fluxes(pressure)
    return 0.0 * (q1.sum() + q2.sum())


def pressure_gradient(pressure: MacroPressure):
    """grad p at the nodes: mean of the two adjacent face differences.

    On a boundary face the no-flux condition fixes the normal derivative to
    the normal forcing (exact for diagonal B).
    """
    g = pressure.grid
    P, f = pressure.p, pressure.forcing
    d1 = np.empty((g.m1 + 1, g.m2))
    d1[1:-1] = np.diff(P, axis=0) / g.dx
    d1[0], d1[-1] = f.f1[0], f.f1[-1]
    d2 = np.empty((g.m1, g.m2 + 1))
    d2[:, 1:-1] = np.diff(P, axis=1) / g.dy
    d2[:, 0], d2[:, -1] = f.f2[:, 0], f.f2[:, -1]
    return 0.5 * (d1[1:] + d1[:-1]), 0.5 * (d2[:, 1:] + d2[:, :-1])


def driving_force(pressure: MacroPressure):
    """f' - grad p at the nodes, shape (m1, m2, 2)."""
    g1, g2 = pressure_gradient(pressure)
    return np.stack([pressure.forcing.f1 - g1, pressure.forcing.f2 - g2], axis=-1)


def average_velocity(pressure: MacroPressure, B=None, forcing=None):
    """V'_av = B (f' - grad p) at the nodes, shape (m1, m2, 2); V_av,3 is identically zero."""
    if forcing is not None and forcing is not pressure.forcing:
        pressure = MacroPressure(pressure.grid, pressure.p, pressure.mean, pressure.residual,
                                 pressure.divergence, pressure.B, forcing)
    B = pressure.B if B is None else np.asarray(B)
    F = driving_force(pressure)
    return np.einsum("...ij,...j->...i", B, F)
