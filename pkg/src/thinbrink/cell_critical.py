"""3D Darcy-Brinkman cell problems on the rough cell Z (period comparable to thickness).

For each horizontal direction e_i, (w^i, pi^i) solves on Z = {0 < z3 < h(z')}

    -(2/M^2) div D[w] + grad pi + w = e_i,   div w = 0,
    w = 0 on z3 = 0 and z3 = h(z'),  w, pi Z'-periodic,

and (A_M)_ij = int_Z w^i_j dz.

The rough top is handled by Brinkman penalization on the box Z' x (0, H),
H >= h_max: velocity unknowns that touch a cell whose centre lies above h
get an extra drag ``penalty * w``. Unknowns live on a staggered (MAC) grid;
pressure lives on fluid cells only, so incompressibility is exact there.
For solenoidal fields 2 div D[w] equals the vector Laplacian, and the
discrete MAC operators satisfy the same identity, so the momentum operator
is assembled component-wise from the Laplacian.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pyamg
import scipy.sparse as sp

from ._cg import ConvergenceError, mean_projector, pcg
from .params import CellGrid, PhysicalParams, RoughnessProfile, eval_h
from .tensor import EffectiveTensor

log = logging.getLogger(__name__)

PENALTY = 1e8


def _pf(n, d):
    # periodic forward difference (u_{i+1} - u_i) / d
    return (sp.diags([-np.ones(n), np.ones(n - 1), np.ones(1)], [0, 1, -(n - 1)],
                     shape=(n, n)) / d).tocsr()


def _gz(n, d):
    # cell centres -> the n+1 horizontal edges z = e d, no-slip walls by reflection
    rows = np.concatenate([[0, n], np.arange(1, n), np.arange(1, n)])
    cols = np.concatenate([[0, n - 1], np.arange(1, n), np.arange(0, n - 1)])
    vals = np.concatenate([[2.0, -2.0], np.ones(n - 1), -np.ones(n - 1)]) / d
    return sp.csr_matrix((vals, (rows, cols)), shape=(n + 1, n))


def _dz(n, d):
    # interior faces (w, n-1 of them) -> cell centres; w = 0 on both walls
    return (sp.diags([np.ones(n - 1), -np.ones(n - 1)], [0, -1], shape=(n, n - 1)) / d).tocsr()


def _ez(n):
    # embed the n-1 interior faces into the n+1 edges (zero on the walls)
    return sp.csr_matrix((np.ones(n - 1), (np.arange(1, n), np.arange(n - 1))), shape=(n + 1, n - 1))


def _k3(a, b, c):
    return sp.kron(sp.kron(a, b), c, format="csr")


class StaggeredCell:
    """MAC discretization of the box Z' x (0, H) with a fluid mask from h."""

    def __init__(self, profile: RoughnessProfile, grid: CellGrid):
        if min(grid.n1, grid.n2, grid.n3) < 8:
            raise ValueError("3D cell grid needs at least 8 cells in each direction")
        self.profile = profile
        self.grid = grid
        self.H = grid.box_height(profile)
        n1, n2, n3 = self.shape = (grid.n1, grid.n2, grid.n3)
        self.d = (grid.d1, grid.d2, self.H / n3)
        self.volume = grid.d1 * grid.d2 * self.d[2]
        self.z3 = (np.arange(n3) + 0.5) * self.d[2]
        Z1, Z2 = grid.centers()
        self.h = eval_h(profile, Z1, Z2)
        self.fluid = self.z3[None, None, :] < self.h[:, :, None]
        if not self.fluid[:, :, 0].all():
            raise ValueError("vertical resolution too coarse: some columns have no fluid cell")
        f = self.fluid
        self.free_u = f & np.roll(f, -1, axis=0)
        self.free_v = f & np.roll(f, -1, axis=1)
        self.free_w = f[:, :, :-1] & f[:, :, 1:]
        self.nu, self.nv, self.nw = n1 * n2 * n3, n1 * n2 * n3, n1 * n2 * (n3 - 1)
        self._build()

    def _build(self):
        n1, n2, n3 = self.shape
        d1, d2, d3 = self.d
        I1, I2, I3, I3w = (sp.identity(n, format="csr") for n in (n1, n2, n3, n3 - 1))
        Pf1, Pf2 = _pf(n1, d1), _pf(n2, d2)
        Pb1, Pb2 = (-Pf1.T).tocsr(), (-Pf2.T).tocsr()
        Gz, Dz, Ez = _gz(n3, d3), _dz(n3, d3), _ez(n3)
        wz = np.ones(n3 + 1)
        wz[[0, -1]] = 0.5
        self.edge_weight_z = wz
        # strain pieces, each a map from one velocity component to one location set
        self.op = {
            "d1u": _k3(Pb1, I2, I3), "d2v": _k3(I1, Pb2, I3), "d3w": _k3(I1, I2, Dz),
            "d2u": _k3(I1, Pf2, I3), "d1v": _k3(Pf1, I2, I3),
            "d3u": _k3(I1, I2, Gz), "d1w": _k3(Pf1, I2, Ez),
            "d3v": _k3(I1, I2, Gz), "d2w": _k3(I1, Pf2, Ez),
        }
        Wz = sp.diags(np.tile(wz, n1 * n2))
        lap1 = (Pf1.T @ Pf1).tocsr()
        lap2 = (Pf2.T @ Pf2).tocsr()
        lapz = (Gz.T @ sp.diags(wz) @ Gz).tocsr()
        self.lap = {
            "u": _k3(lap1, I2, I3) + _k3(I1, lap2, I3) + _k3(I1, I2, lapz),
            "v": _k3(lap1, I2, I3) + _k3(I1, lap2, I3) + _k3(I1, I2, lapz),
            "w": _k3(lap1, I2, I3w) + _k3(I1, lap2, I3w) + _k3(I1, I2, (Dz.T @ Dz).tocsr()),
        }
        self._Wz = Wz
        div = sp.hstack([self.op["d1u"], self.op["d2v"], self.op["d3w"]], format="csr")
        self.div_all = div
        self.fluid_index = np.flatnonzero(self.fluid.ravel())
        self.div = div[self.fluid_index]

    def penalized(self):
        return {"u": ~self.free_u.ravel(), "v": ~self.free_v.ravel(), "w": ~self.free_w.ravel()}

    def split(self, x):
        n1, n2, n3 = self.shape
        u = x[: self.nu].reshape(n1, n2, n3)
        v = x[self.nu: self.nu + self.nv].reshape(n1, n2, n3)
        w = x[self.nu + self.nv:].reshape(n1, n2, n3 - 1)
        return u, v, w

    def strain(self, x):
        """Symmetric-gradient components at their natural staggered locations."""
        u, v, w = (c.ravel() for c in self.split(x))
        op = self.op
        return {
            "11": op["d1u"] @ u, "22": op["d2v"] @ v, "33": op["d3w"] @ w,
            "12": 0.5 * (op["d2u"] @ u + op["d1v"] @ v),
            "13": 0.5 * (op["d3u"] @ u + op["d1w"] @ w),
            "23": 0.5 * (op["d3v"] @ v + op["d2w"] @ w),
        }

    def strain_product(self, x, y):
        """int_box D[x] : D[y] dz."""
        ex, ey = self.strain(x), self.strain(y)
        wz = np.tile(self.edge_weight_z, self.shape[0] * self.shape[1])
        total = sum(ex[c] @ ey[c] for c in ("11", "22", "33"))
        total += 2 * (ex["12"] @ ey["12"])
        total += 2 * (wz * ex["13"]) @ ey["13"] + 2 * (wz * ey["23"]) @ ex["23"]
        return total * self.volume

    def strain_density(self, x):
        """|D[x]|^2 averaged to cell centres, shape (n1, n2, n3)."""
        n1, n2, n3 = self.shape
        e = self.strain(x)
        out = (e["11"] ** 2 + e["22"] ** 2 + e["33"] ** 2).reshape(n1, n2, n3)
        # off-diagonal squares averaged from the four surrounding edges; each
        # off-diagonal entry appears twice in D : D
        e12 = (e["12"] ** 2).reshape(n1, n2, n3)
        out += 2 * 0.25 * (e12 + np.roll(e12, 1, 0) + np.roll(e12, 1, 1) + np.roll(np.roll(e12, 1, 0), 1, 1))
        e13 = (e["13"] ** 2).reshape(n1, n2, n3 + 1)
        e13 = e13 + np.roll(e13, 1, 0)
        out += 2 * 0.25 * (e13[:, :, :-1] + e13[:, :, 1:])
        e23 = (e["23"] ** 2).reshape(n1, n2, n3 + 1)
        e23 = e23 + np.roll(e23, 1, 1)
        out += 2 * 0.25 * (e23[:, :, :-1] + e23[:, :, 1:])
        return out

    def speed_squared(self, x):
        """|x|^2 at cell centres (face squares averaged per component)."""
        u, v, w = self.split(x)
        out = 0.5 * (u**2 + np.roll(u, 1, 0) ** 2) + 0.5 * (v**2 + np.roll(v, 1, 1) ** 2)
        w2 = w**2
        zero = np.zeros(w.shape[:2] + (1,))
        out += 0.5 * (np.concatenate([zero, w2], axis=2) + np.concatenate([w2, zero], axis=2))
        return out


@dataclass
class CriticalCellSolution:
    grid: CellGrid
    cell: StaggeredCell = field(repr=False)
    velocities: dict          # i -> flat MAC velocity vector
    pressures: dict           # i -> pressure on fluid cells (zero mean)
    divergence: dict          # i -> max |div w| over fluid cells
    momentum_residual: dict   # i -> relative residual of the velocity equations
    history: dict             # i -> outer relative residual history
    M: float

    @property
    def fluid(self):
        return self.cell.fluid

    def fields(self, i):
        """(w1, w2, w3) arrays on their staggered locations."""
        return self.cell.split(self.velocities[i])

    def pressure_field(self, i):
        p = np.full(self.cell.shape, np.nan)
        p.ravel()[self.cell.fluid_index] = self.pressures[i]
        return p


class _VelocitySolver:
    """A = (1/M^2) L + I + penalty * chi, one AMG-preconditioned CG per component."""

    def __init__(self, cell: StaggeredCell, M, penalty, tol):
        self.cell = cell
        self.tol = tol
        chi = cell.penalized()
        self.blocks = []
        for c in ("u", "v", "w"):
            A = (cell.lap[c] / M**2 + sp.diags(1.0 + penalty * chi[c])).tocsr()
            ml = pyamg.smoothed_aggregation_solver(A, symmetry="symmetric")
            self.blocks.append((A, ml))
        self.sizes = (cell.nu, cell.nv, cell.nw)

    def apply(self, x):
        out, start = [], 0
        for (A, _), n in zip(self.blocks, self.sizes):
            out.append(A @ x[start: start + n])
            start += n
        return np.concatenate(out)

    def solve(self, rhs):
        out, start = [], 0
        for (A, ml), n in zip(self.blocks, self.sizes):
            r = rhs[start: start + n]
            start += n
            if not np.any(r):
                out.append(np.zeros(n))
                continue
            res = []
            x = ml.solve(r, tol=self.tol, accel="cg", maxiter=500, residuals=res)
            if np.linalg.norm(r - A @ x) > 10 * self.tol * np.linalg.norm(r):
                raise ConvergenceError("inner velocity solve did not converge",
                                       residual=res[-1] / res[0], history=res)
            out.append(x)
        return np.concatenate(out)


def _schur_preconditioner(cell: StaggeredCell, M):
    # Cahouet-Chabard: S^{-1} ~ nu I + (-Delta_p)^{-1} for the operator -nu Delta + I
    free = np.concatenate([v for v in (cell.free_u.ravel(), cell.free_v.ravel(), cell.free_w.ravel())])
    Dfree = cell.div @ sp.diags(free.astype(float))
    Lp = (Dfree @ Dfree.T).tocsr()
    ml = pyamg.smoothed_aggregation_solver(Lp, symmetry="symmetric", B=np.ones((Lp.shape[0], 1)))
    amg = ml.aspreconditioner(cycle="V")
    proj = mean_projector()
    nu = 1.0 / M**2

    def apply(r):
        return nu * r + proj(amg @ proj(r))

    return apply


def _rhs(cell: StaggeredCell, i):
    f = np.zeros(cell.nu + cell.nv + cell.nw)
    if i == 1:
        f[: cell.nu] = 1.0
    elif i == 2:
        f[cell.nu: cell.nu + cell.nv] = 1.0
    return f


def solve_cell_brinkman(profile: RoughnessProfile, params: PhysicalParams, grid: CellGrid,
                        directions=(1, 2), tol=1e-8, penalty=PENALTY, inner_tol=None,
                        maxiter=500) -> CriticalCellSolution:
    """Uzawa / Schur-complement CG with AMG-preconditioned inner velocity solves."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    M = params.M
    cell = StaggeredCell(profile, grid)
    inner_tol = inner_tol or min(1e-12, tol * 1e-3)
    vel = _VelocitySolver(cell, M, penalty, inner_tol)
    precond = _schur_preconditioner(cell, M)
    D = cell.div
    # the fluid region is closed off by penalized faces, so constant pressure
    # is only weakly determined; it is solved for, then removed from the output
    velocities, pressures, divergence, momentum, history = {}, {}, {}, {}, {}
    for i in directions:
        f = _rhs(cell, i)
        if not np.any(f):
            velocities[i] = np.zeros_like(f)
            pressures[i] = np.zeros(D.shape[0])
            divergence[i] = momentum[i] = 0.0
            history[i] = [0.0]
            continue
        w0 = vel.solve(f)
        rhs = D @ w0
        schur = lambda q: D @ vel.solve(D.T @ q)  # noqa: E731
        closed = np.abs(D.T @ np.ones(D.shape[0])).max() < 1e-12 * np.abs(D).max()
        project = mean_projector() if closed else None
        q, info = pcg(schur, rhs, precond=precond, project=project, tol=tol * 1e-2,
                      maxiter=maxiter, raise_on_fail=False)
        w = vel.solve(f - D.T @ q)
        div = float(np.abs(D @ w).max())
        mres = float(np.linalg.norm(vel.apply(w) + D.T @ q - f) / np.linalg.norm(f))
        log.info("direction %d: %d outer iterations, div %.2e, momentum %.2e", i, info.iterations, div, mres)
        if div > tol:
            raise ConvergenceError(f"critical cell solve (direction {i}) ended with divergence {div:.3e}",
                                   residual=div, history=info.history)
        velocities[i] = w
        # momentum reads A w + D^T q = f, i.e. grad pi = -grad q
        pressures[i] = -(q - q.mean())
        divergence[i], momentum[i], history[i] = div, mres, info.history
    return CriticalCellSolution(grid, cell, velocities, pressures, divergence, momentum, history, M)


def assemble_tensor_critical(solution: CriticalCellSolution, grid=None, warn_rtol=1e-2) -> EffectiveTensor:
    """(A_M)_ij = int w^i_j dz, symmetrized; the raw asymmetry is kept in ``info``."""
    if grid is not None and grid != solution.grid:
        raise ValueError("solution was computed on a different grid")
    cell = solution.cell
    A = np.zeros((2, 2))
    for i in (1, 2):
        if i not in solution.velocities:
            raise ValueError(f"direction {i} has not been solved")
        u, v, _ = cell.split(solution.velocities[i])
        A[i - 1] = u.sum() * cell.volume, v.sum() * cell.volume
    asym = abs(A[0, 1] - A[1, 0])
    scale = np.abs(A).max()
    if scale > 0 and asym > warn_rtol * scale:
        log.warning("critical A_M asymmetry %.3e exceeds %.0e of max entry", asym, warn_rtol)
    S = 0.5 * (A + A.T)
    info = {"raw": A.tolist(),
            "divergence": [solution.divergence[i] for i in (1, 2)],
            "momentum_residual": [solution.momentum_residual[i] for i in (1, 2)]}
    return EffectiveTensor(S, "critical", solution.M, solution.cell.profile, asym, info)


def energy_identity(solution: CriticalCellSolution, i, j):
    """(int w^j_i, (2/M^2) int D[w^i]:D[w^j] + int w^i . w^j) for the weak-form check."""
    cell = solution.cell
    wi, wj = solution.velocities[i], solution.velocities[j]
    comp = cell.split(wj)[i - 1]
    lhs = comp.sum() * cell.volume
    rhs = 2 / solution.M**2 * cell.strain_product(wi, wj) + (wi @ wj) * cell.volume
    return lhs, rhs


def vertical_flux(solution: CriticalCellSolution, i):
    _, _, w = solution.fields(i)
    return w.sum() * solution.cell.volume


def _solid_masks(cell: StaggeredCell):
    # unknowns with solid on both sides
    s = ~cell.fluid
    return np.concatenate([(s & np.roll(s, -1, axis=0)).ravel(), (s & np.roll(s, -1, axis=1)).ravel(),
                           (s[:, :, :-1] & s[:, :, 1:]).ravel()])


def solid_leakage(solution: CriticalCellSolution, i):
    """max |w| on unknowns strictly inside the solid, relative to max |w| overall."""
    x = solution.velocities[i]
    mask = _solid_masks(solution.cell)
    top = np.abs(x).max()
    return float(np.abs(x[mask]).max() / top) if mask.any() and top > 0 else 0.0


def interface_slip(solution: CriticalCellSolution, i):
    """max |w| on penalized unknowns touching the fluid, relative to max |w| overall.

    These sit on the staircase wall, so the penalty pins them to O(1/penalty)
    while their fluid neighbour moves; the value shrinks with the wall shear only.
    """
    x = solution.velocities[i]
    chi = solution.cell.penalized()
    mask = np.concatenate([chi["u"], chi["v"], chi["w"]]) & ~_solid_masks(solution.cell)
    top = np.abs(x).max()
    return float(np.abs(x[mask]).max() / top) if mask.any() and top > 0 else 0.0


@dataclass(frozen=True)
class CellTemperature:
    T: np.ndarray             # (n1, n2, n3), NaN on solid cells
    b: float
    k: float
    residual: float
    bottom_flux_error: float


def _temperature_operator(cell: StaggeredCell, k):
    """-k Laplacian on fluid cells: periodic sides, T = 0 on faces shared with solid or the box top."""
    n1, n2, n3 = cell.shape
    d1, d2, d3 = cell.d
    fluid = cell.fluid
    idx = -np.ones(cell.shape, dtype=int)
    idx[fluid] = np.arange(fluid.sum())
    rows, cols, vals = [], [], []
    diag = np.zeros(fluid.sum())
    I, J, K = np.nonzero(fluid)
    me = idx[I, J, K]
    neighbours = [
        ((I + 1) % n1, J, K, d1), ((I - 1) % n1, J, K, d1),
        (I, (J + 1) % n2, K, d2), (I, (J - 1) % n2, K, d2),
    ]
    for In, Jn, Kn, d in neighbours:
        other = idx[In, Jn, Kn]
        wet = other >= 0
        diag += np.where(wet, 1.0, 2.0) * k / d**2
        rows.append(me[wet]), cols.append(other[wet]), vals.append(np.full(wet.sum(), -k / d**2))
    # up: fluid neighbour, solid neighbour or box top -> Dirichlet at the face
    up_ok = K + 1 < n3
    other = np.where(up_ok, idx[I, J, np.minimum(K + 1, n3 - 1)], -1)
    wet = other >= 0
    diag += np.where(wet, 1.0, 2.0) * k / d3**2
    rows.append(me[wet]), cols.append(other[wet]), vals.append(np.full(wet.sum(), -k / d3**2))
    # down: bottom wall carries the flux condition (no diagonal contribution)
    down = K > 0
    other = np.where(down, idx[I, J, np.maximum(K - 1, 0)], -1)
    wet = other >= 0
    diag += np.where(wet, 1.0, 0.0) * k / d3**2
    rows.append(me[wet]), cols.append(other[wet]), vals.append(np.full(wet.sum(), -k / d3**2))
    rows.append(me), cols.append(me), vals.append(diag)
    n = fluid.sum()
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return A, idx, (K == 0)


def cell_dissipation(solution: CriticalCellSolution, params: PhysicalParams, force):
    """(mu/K)|u|^2 + 2 mu_eff |D[u]|^2 at cell centres for u = (K/mu) sum_i F_i w^i."""
    cell = solution.cell
    F = np.asarray(force, dtype=float)
    x = np.zeros(cell.nu + cell.nv + cell.nw)
    for i in (1, 2):
        if F[i - 1] != 0.0:
            x += F[i - 1] * solution.velocities[i]
    x *= params.K / params.mu
    return params.mu / params.K * cell.speed_squared(x) + 2 * params.mu_eff * cell.strain_density(x)


def solve_cell_temperature(solution: CriticalCellSolution, params: PhysicalParams, force,
                           grid=None, tol=1e-10) -> CellTemperature:
    """-k Lap T = dissipation on the fluid cells, T = 0 on the rough top, -k dT/dz3 = b at z3 = 0.

    ``force`` is the local macroscopic driving f' - grad p (a 2-vector).
    """
    if grid is not None and grid != solution.grid:
        raise ValueError("solution was computed on a different grid")
    cell = solution.cell
    A, idx, bottom = _temperature_operator(cell, params.k)
    S = cell_dissipation(solution, params, force)[cell.fluid]
    rhs = S.copy()
    rhs[bottom] += params.b / cell.d[2]
    if not np.any(rhs):
        Tf = np.zeros_like(rhs)
        res = 0.0
    else:
        ml = pyamg.smoothed_aggregation_solver(A, symmetry="symmetric")
        out = []
        Tf = ml.solve(rhs, tol=tol, accel="cg", maxiter=1000, residuals=out)
        res = float(np.linalg.norm(rhs - A @ Tf) / np.linalg.norm(rhs))
        if res > 10 * tol:
            raise ConvergenceError(f"cell temperature solve stopped at residual {res:.3e}", residual=res,
                                   history=out)
    T = np.full(cell.shape, np.nan)
    T[cell.fluid] = Tf
    # dT/dz3 at z3 = 0 from the quadratic through the three lowest cell centres
    d3 = cell.d[2]
    grad0 = (-2 * T[:, :, 0] + 3 * T[:, :, 1] - T[:, :, 2]) / d3
    flux_err = float(np.nanmax(np.abs(-params.k * grad0 - params.b))) if params.b else 0.0
    return CellTemperature(T, params.b, params.k, res, flux_err)


def average_temperature(temp: CellTemperature, solution: CriticalCellSolution):
    """int_Z T dz."""
    return float(np.nansum(temp.T) * solution.cell.volume)
