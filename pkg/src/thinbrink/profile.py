"""Closed-form vertical Brinkman profile of a flat channel of height h.

The shape s(z3) solves -(1/M^2) s'' + s = 1 on (0, h) with s(0) = s(h) = 0:

    s(z3) = A1 exp(M z3) + A2 exp(-M z3) + 1
    A1 = -(1 - exp(-M h)) / (exp(M h) - exp(-M h)) = -1 / (exp(M h) + 1)
    A2 =  (1 - exp(M h))  / (exp(M h) - exp(-M h)) = -1 / (1 + exp(-M h))

The physical velocity is (K/mu) (f' - grad p) s(z3). Everything here is
evaluated in rearranged forms that neither overflow nor cancel for any M h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

# below this M*h the tanh form of the flow factor loses ~ 1e-16 / (Mh)^2 relative
_SERIES_CUTOFF = 1e-2


@dataclass(frozen=True)
class ProfileCoefficients:
    A1: float
    A2: float
    h: float
    M: float


def _check(M, h):
    if not (np.all(np.asarray(M) > 0) and np.all(np.asarray(h) > 0)):
        raise ValueError("M and h must be strictly positive")


def profile_coeffs(M: float, h: float) -> ProfileCoefficients:
    _check(M, h)
    Mh = M * h
    return ProfileCoefficients(A1=-float(expit(-Mh)), A2=-float(expit(Mh)), h=float(h), M=float(M))


def _shape(M, h, z3):
    # 1 - cosh(M(z3 - h/2)) / cosh(M h/2), factored so it never overflows:
    # (1 - e^{-M z3}) (1 - e^{-M (h - z3)}) / (1 + e^{-M h})
    return np.expm1(-M * z3) * np.expm1(-M * (h - z3)) / (1.0 + np.exp(-M * h))


def _shape_dz(M, h, z3):
    e0 = np.exp(-M * z3)
    e1 = np.exp(-M * (h - z3))
    return M * (np.expm1(-M * z3) * e1 - e0 * np.expm1(-M * (h - z3))) / (1.0 + np.exp(-M * h))


def _check_z3(z3, h):
    z3 = np.asarray(z3, dtype=float)
    if np.any(z3 < 0) or np.any(z3 > h):
        raise ValueError(f"z3 must lie in [0, h] = [0, {h}]")
    return z3


def profile_velocity(coeffs: ProfileCoefficients, z3):
    """Dimensionless shape s(z3); zero at both walls, positive in between."""
    z3 = _check_z3(z3, coeffs.h)
    return _shape(coeffs.M, coeffs.h, z3)


def profile_dz3(coeffs: ProfileCoefficients, z3):
    """ds/dz3 = M (A1 exp(M z3) - A2 exp(-M z3))."""
    z3 = _check_z3(z3, coeffs.h)
    return _shape_dz(coeffs.M, coeffs.h, z3)


def shape(M, h, z3):
    """Vectorised s(z3) over broadcastable M, h, z3; zero where z3 is outside (0, h)."""
    M, h, z3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (M, h, z3)))
    inside = (z3 >= 0) & (z3 <= h)
    return np.where(inside, _shape(M, h, np.clip(z3, 0, h)), 0.0)


def shape_dz(M, h, z3):
    """Vectorised ds/dz3, zero outside (0, h)."""
    M, h, z3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (M, h, z3)))
    inside = (z3 >= 0) & (z3 <= h)
    return np.where(inside, _shape_dz(M, h, np.clip(z3, 0, h)), 0.0)


def flow_factor(M, h):
    """Height-integrated shape phi_M(h) = h - (2/M) tanh(M h / 2).

    Equivalently h - (2/M)(e^{Mh} + e^{-Mh} - 2)/(e^{Mh} - e^{-Mh}); tends to
    M^2 h^3 / 12 as M h -> 0 and to h - 2/M as M h -> infinity.
    """
    _check(M, h)
    M = np.asarray(M, dtype=float)
    h = np.asarray(h, dtype=float)
    x = M * h
    small = x < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    # x - 2 tanh(x/2) = x^3/12 - x^5/120 + 17 x^7/20160 - ...
    series = xs**3 / 12 - xs**5 / 120 + 17 * xs**7 / 20160
    direct = x - 2 * np.tanh(x / 2)
    out = np.where(small, series, direct) / M
    return out if out.ndim else float(out)


def flow_factor_dh(M, h):
    """d phi / d h = tanh(M h / 2)^2."""
    _check(M, h)
    return np.tanh(np.asarray(M) * np.asarray(h) / 2) ** 2


def poiseuille_limit(M, h):
    return M**2 * h**3 / 12


def darcy_limit(M, h):
    return h - 2 / M
