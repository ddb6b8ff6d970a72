"""Literal alternative formulas, evaluated against the validated quantities.

Three closed forms circulate for this model that disagree with the boundary
value problems they are meant to solve:

* a flow factor written with ``sinh``-type numerator ``e^{Mh} - e^{-Mh} - 2``;
* a subcritical temperature integrating to the fixed height 1 with a
  constant ``-b/k`` offset;
* a smooth-regime temperature built from two auxiliary functions V1, V2
  (with ``e^{Mz3} - 1`` repeated in V1) and a ``b`` term scaled by |F|^2.

Nothing here is used by the solvers. The functions only quantify how far the
literal expressions are from the implemented ones.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson

from .params import PhysicalParams
from .profile import flow_factor, shape, shape_dz


def _coeffs(M, h):
    em, ep = np.exp(-M * h), np.exp(M * h)
    return -(1 - em) / (ep - em), (1 - ep) / (ep - em)


def literal_flow_factor(M, h):
    """-( (2/M)(e^{Mh} - e^{-Mh} - 2)/(e^{Mh} - e^{-Mh}) - h )."""
    ep, em = np.exp(M * h), np.exp(-M * h)
    return -(2 / M * (ep - em - 2) / (ep - em) - h)


def literal_temperature_fixed_top(z3, h, F2, params: PhysicalParams, n=8192):
    """Temperature with integrals up to 1 and the constant -b/k, for |F|^2 = F2.

    The velocity is extended by zero above h.
    """
    top = max(1.0, h)
    z = np.linspace(0.0, top, n + 1)
    dz = top / n
    inside = z <= h
    zc = np.minimum(z, h)
    u2 = np.where(inside, (params.K / params.mu) ** 2 * F2 * shape(params.M, h, zc) ** 2, 0.0)
    du2 = np.where(inside, (params.K / params.mu) ** 2 * F2 * shape_dz(params.M, h, zc) ** 2, 0.0)

    def part(g):
        # int_{z3}^1 int_xi^1 g dtau dxi - z3 int_0^1 g
        cum = cumulative_simpson(g, dx=dz, initial=0.0)
        i1 = np.interp(1.0, z, cum)
        tail = i1 - cum                         # int_xi^1 g
        cum_tail = cumulative_simpson(tail, dx=dz, initial=0.0)
        outer = np.interp(1.0, z, cum_tail) - np.interp(z3, z, cum_tail)
        return outer - np.asarray(z3) * i1

    return (-params.b / params.k - params.mu / (params.k * params.K) * part(u2)
            - params.mu_eff / params.k * part(du2))


def literal_V1(M, h, z3, corrected=False):
    """V1 as written; ``corrected`` replaces the repeated e^{Mz3}-1 by e^{-Mz3}-1."""
    A1, A2 = _coeffs(M, h)
    second = np.exp(-M * z3) - 1 if corrected else np.exp(M * z3) - 1
    return (1 / (4 * M**2) * (A1**2 * (np.exp(2 * M * z3) - 1) + A2**2 * (np.exp(-2 * M * z3) - 1))
            + 2 / M**2 * (A1 * (np.exp(M * z3) - 1) + A2 * second)
            + (0.5 + A1 * A2) * z3**2 - 1 / (2 * M) * (A1**2 - A2**2) * z3
            - 2 / M * (A1 - A2) * z3)


def literal_V2(M, h, z3):
    A1, A2 = _coeffs(M, h)
    return (0.5 * (A1**2 * (np.exp(2 * M * h) - np.exp(2 * M * z3))
                   - A2**2 * (np.exp(-2 * M * h) - np.exp(-2 * M * z3)))
            + A1 * A2 * (h - z3) ** 2)


def literal_smooth_temperature(z3, h, F2, params: PhysicalParams, corrected=False):
    M, K, mu, k = params.M, params.K, params.mu, params.k
    t1 = -K / (k * mu) * (literal_V1(M, h, z3, corrected) - literal_V1(M, h, h, corrected)) * F2
    t2 = -params.mu_eff * K**2 * M**2 / (k * mu**2) * (literal_V2(M, h, z3) - literal_V2(M, h, h)) * F2
    t3 = -params.b / k * (z3 - h) * F2
    return t1 + t2 + t3


def reference_temperature(z3, h, F2, params: PhysicalParams, n=8192):
    """BVP solution for a uniform film: (b/k)(h - z3) + (1/k) int_{z3}^h int_0^xi S."""
    z = np.linspace(0.0, h, n + 1)
    dz = h / n
    S = (params.K / params.mu) ** 2 * F2 * (params.mu / params.K * shape(params.M, h, z) ** 2
                                            + params.mu_eff * shape_dz(params.M, h, z) ** 2)
    inner = cumulative_simpson(S, dx=dz, initial=0.0)
    outer = cumulative_simpson(inner, dx=dz, initial=0.0)
    return params.b / params.k * (h - np.asarray(z3)) + (outer[-1] - np.interp(z3, z, outer)) / params.k


def discrepancy_report(params: PhysicalParams, h=1.0, F2=1.0, nz=65):
    """Rows (name, literal, reference, max_abs_dev, rel_dev) over a z3 sample or an (M, h) sweep."""
    rows = []
    Ms = np.logspace(-2, 2, 7)
    hs = np.logspace(np.log10(0.25), np.log10(4.0), 7)
    MM, HH = np.meshgrid(Ms, hs, indexing="ij")
    lit, ref = literal_flow_factor(MM, HH), flow_factor(MM, HH)
    dev = np.abs(lit - ref)
    rows.append(("flow_factor_minus2", float(lit.ravel()[np.argmax(dev)]), float(ref.ravel()[np.argmax(dev)]),
                 float(dev.max()), float((dev / ref).max())))
    z3 = np.linspace(0.0, h, nz)
    ref_T = reference_temperature(z3, h, F2, params)
    for name, T in (("temperature_fixed_top", literal_temperature_fixed_top(z3, h, F2, params)),
                    ("smooth_temperature_V1V2", literal_smooth_temperature(z3, h, F2, params)),
                    ("smooth_temperature_V1V2_corrected", literal_smooth_temperature(z3, h, F2, params, True))):
        d = np.abs(T - ref_T)
        i = int(np.argmax(d))
        rows.append((name, float(T[i]), float(ref_T[i]), float(d.max()),
                     float(d.max() / max(np.abs(ref_T).max(), 1e-300))))
    return rows
