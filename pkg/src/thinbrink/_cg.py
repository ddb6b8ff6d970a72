"""Preconditioned conjugate gradients with an optional null-space projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    """Raised when an iterative solve stops above its tolerance."""

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = history or []


@dataclass
class CGInfo:
    iterations: int
    residual: float
    history: list


def mean_projector(weights=None):
    """Projection onto the weighted-mean-zero subspace."""
    if weights is None:
        return lambda v: v - v.mean()
    w = np.asarray(weights, dtype=float)
    wsum = w.sum()
    return lambda v: v - (w @ v) / wsum


def pcg(apply_A, b, precond=None, project=None, tol=1e-10, maxiter=None, x0=None,
        raise_on_fail=True):
    """Solve A x = b for symmetric positive (semi-)definite A.

    ``project`` removes the null space of a singular A; it is applied to the
    right-hand side, the iterate and every residual/search direction, which
    keeps the iteration inside the range of A. ``tol`` is relative to |b|.
    """
    P = project if project is not None else (lambda v: v)
    b = P(np.asarray(b, dtype=float))
    n = b.size
    maxiter = maxiter or 10 * n
    bnorm = np.linalg.norm(b)
    x = np.zeros(n) if x0 is None else P(np.array(x0, dtype=float))
    if bnorm == 0.0:
        return np.zeros(n), CGInfo(0, 0.0, [0.0])
    r = P(b - apply_A(x))
    z = P(precond(r)) if precond is not None else r
    p = z.copy()
    rz = r @ z
    history = [np.linalg.norm(r) / bnorm]
    it = 0
    while it < maxiter:
        if history[-1] <= tol:
            # confirm with the true residual; restart if recursion drifted
            r = P(b - apply_A(x))
            history[-1] = np.linalg.norm(r) / bnorm
            if history[-1] <= tol:
                break
            z = P(precond(r)) if precond is not None else r
            p = z.copy()
            rz = r @ z
        Ap = P(apply_A(p))
        pAp = p @ Ap
        if pAp <= 0:
            break
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        it += 1
        history.append(np.linalg.norm(r) / bnorm)
        z = P(precond(r)) if precond is not None else r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    x = P(x)
    res = np.linalg.norm(P(b - apply_A(x))) / bnorm
    history.append(res)
    if res > tol and raise_on_fail:
        raise ConvergenceError(f"CG stopped after {it} iterations at relative residual {res:.3e} "
                               f"(tol {tol:.1e})", residual=res, history=history)
    return x, CGInfo(it, res, history)
