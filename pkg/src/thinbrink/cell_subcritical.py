"""Periodic Reynolds-type cell problems on Z' for roughness period >> film thickness.

For each direction e_i the corrector pi^i is the zero-mean periodic solution
of  -div( phi_M(h(z')) (e_i + grad pi^i) ) = 0,  and

    (A_M)_ij = int_{Z'} phi_M(h) (e_i + grad pi^i) . e_j dz'.

Discretization: cell-centred finite volumes on the periodic unit square with
harmonic averaging of phi on faces.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._cg import ConvergenceError, mean_projector, pcg
from .params import CellGrid, PhysicalParams, RoughnessProfile, eval_h
from .profile import flow_factor
from .tensor import EffectiveTensor, check_spd


@dataclass(frozen=True)
class SubcriticalCellSolution:
    grid: CellGrid
    phi: np.ndarray          # flow factor at cell centres, (n1, n2)
    phi_x: np.ndarray        # harmonic face values, face (i, j) between cells i and i+1
    phi_y: np.ndarray
    pi1: np.ndarray
    pi2: np.ndarray
    residuals: tuple          # relative CG residuals for i = 1, 2
    divergence: tuple         # max |div flux| for i = 1, 2

    def corrector(self, i):
        return self.pi1 if i == 1 else self.pi2

    def face_gradients(self, i):
        """(e_i + D pi^i) on x-faces (first component) and y-faces (second)."""
        pi = self.corrector(i)
        g1 = (np.roll(pi, -1, axis=0) - pi) / self.grid.d1 + (i == 1)
        g2 = (np.roll(pi, -1, axis=1) - pi) / self.grid.d2 + (i == 2)
        return g1, g2

    def face_fluxes(self, i):
        g1, g2 = self.face_gradients(i)
        return self.phi_x * g1, self.phi_y * g2

    def center_gradient(self, i):
        """e_i + grad pi^i at cell centres, recovered from the averaged face fluxes.

        phi * G equals the mean of the two neighbouring face fluxes, so the
        cell average of phi * G reproduces the assembled tensor exactly.
        """
        q1, q2 = self.face_fluxes(i)
        c1 = 0.5 * (q1 + np.roll(q1, 1, axis=0)) / self.phi
        c2 = 0.5 * (q2 + np.roll(q2, 1, axis=1)) / self.phi
        return c1, c2


def _periodic_diff(n, d):
    # (D u)_i = (u_{i+1} - u_i)/d, periodic
    return sp.diags([-np.ones(n), np.ones(n - 1), np.ones(1)], [0, 1, -(n - 1)],
                    shape=(n, n), format="csr") / d


def _operators(grid):
    n1, n2 = grid.n1, grid.n2
    D1 = sp.kron(_periodic_diff(n1, grid.d1), sp.identity(n2), format="csr")
    D2 = sp.kron(sp.identity(n1), _periodic_diff(n2, grid.d2), format="csr")
    return D1, D2


def cell_flow_factor(profile: RoughnessProfile, params: PhysicalParams, grid: CellGrid):
    Z1, Z2 = grid.centers()
    phi = flow_factor(params.M, eval_h(profile, Z1, Z2))
    if not np.all(phi > 0):
        raise ValueError("flow factor must be strictly positive on the cell")
    phi_x = 2 * phi * np.roll(phi, -1, axis=0) / (phi + np.roll(phi, -1, axis=0))
    phi_y = 2 * phi * np.roll(phi, -1, axis=1) / (phi + np.roll(phi, -1, axis=1))
    return phi, phi_x, phi_y


def _solve_direction(i, L, D1, D2, phi_x, phi_y, tol, maxiter):
    f = phi_x.ravel() if i == 1 else phi_y.ravel()
    D = D1 if i == 1 else D2
    rhs = -(D.T @ f)
    diag = L.diagonal()
    pi, info = pcg(lambda v: L @ v, rhs, precond=lambda r: r / diag, project=mean_projector(),
                   tol=tol, maxiter=maxiter)
    div = np.abs(L @ pi - rhs).max()
    return pi, info, div


def solve_corrector(profile, params, grid, i, tol=1e-10, maxiter=None):
    """Zero-mean periodic corrector pi^i on the cell grid (shape (n1, n2))."""
    if i not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    if not tol > 0:
        raise ValueError("tol must be positive")
    phi, phi_x, phi_y = cell_flow_factor(profile, params, grid)
    D1, D2 = _operators(grid)
    L = (D1.T @ sp.diags(phi_x.ravel()) @ D1 + D2.T @ sp.diags(phi_y.ravel()) @ D2).tocsr()
    pi, info, _ = _solve_direction(i, L, D1, D2, phi_x, phi_y, tol, maxiter)
    return pi.reshape(grid.n1, grid.n2)


def solve_cell_subcritical(profile: RoughnessProfile, params: PhysicalParams, grid: CellGrid,
                           tol=1e-10, maxiter=None, workers=1) -> SubcriticalCellSolution:
    if not tol > 0:
        raise ValueError("tol must be positive")
    phi, phi_x, phi_y = cell_flow_factor(profile, params, grid)
    D1, D2 = _operators(grid)
    L = (D1.T @ sp.diags(phi_x.ravel()) @ D1 + D2.T @ sp.diags(phi_y.ravel()) @ D2).tocsr()
    args = [(i, L, D1, D2, phi_x, phi_y, tol, maxiter) for i in (1, 2)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=2) as ex:
            results = list(ex.map(lambda a: _solve_direction(*a), args))
    else:
        results = [_solve_direction(*a) for a in args]
    shape = (grid.n1, grid.n2)
    (p1, info1, div1), (p2, info2, div2) = results
    return SubcriticalCellSolution(grid, phi, phi_x, phi_y, p1.reshape(shape), p2.reshape(shape),
                                   (info1.residual, info2.residual), (div1, div2))


def assemble_tensor_subcritical(profile, params, solution: SubcriticalCellSolution,
                                grid=None, rtol=1e-8) -> EffectiveTensor:
    """(A_M)_ij as the cell mean of the j-th face flux of corrector i."""
    if grid is not None and grid != solution.grid:
        raise ValueError("correctors were solved on a different grid")
    A = np.empty((2, 2))
    for i in (1, 2):
        q1, q2 = solution.face_fluxes(i)
        A[i - 1] = q1.mean(), q2.mean()
    asym = abs(A[0, 1] - A[1, 0])
    try:
        check_spd(A, rtol=rtol, what="subcritical A_M")
    except ValueError as err:
        raise ConvergenceError(f"discretization-quality failure: {err}") from err
    return EffectiveTensor(A, "subcritical", params.M, profile, asym,
                           {"residuals": list(solution.residuals),
                            "divergence": [float(d) for d in solution.divergence]})


def effective_tensor_subcritical(profile, params, grid, tol=1e-10, workers=1):
    sol = solve_cell_subcritical(profile, params, grid, tol=tol, workers=workers)
    return assemble_tensor_subcritical(profile, params, sol), sol
