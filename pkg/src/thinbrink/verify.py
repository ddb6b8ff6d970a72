"""Oracle comparison suites. Each suite returns rows (suite, check, measured, target, tol, passed)."""

from __future__ import annotations

import csv
import filecmp
import io
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .params import CellGrid, MacroGrid, RoughnessProfile, make_params


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    measured: float
    target: float
    tol: float
    passed: bool
    note: str = ""

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} [{self.suite}] {self.name}: measured={self.measured:.6g} target={self.target:.6g} tol={self.tol:.3g} {self.note}".rstrip()


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b))))


def suite_flowfactor():
    from .profile import flow_factor

    rows = []
    Ms = np.logspace(-2, 2, 7)
    hs = np.logspace(np.log10(0.25), np.log10(4.0), 7)
    worst = 0.0
    n = 100_000
    for M in Ms:
        for h in hs:
            z = np.linspace(0.0, h, n + 1)
            q = oracle.trapezoid(oracle.literal_profile(M, h, z), h / n)
            worst = max(worst, abs(flow_factor(M, h) - q) / q)
    rows.append(Check("flowfactor", "phi vs trapezoid of profile, 7x7 grid (max rel)", worst, 0.0, 1e-8, worst <= 1e-8))
    # Poiseuille limit at M h = 1e-2, physical scaling K/mu = 1/(M^2 mu_eff)
    mu_eff, h = 2.0, 1.0
    M = 1e-2 / h
    p = make_params(M**2 * mu_eff * 1.0, mu_eff, 1.0, 1.0)
    lhs = p.K / p.mu * flow_factor(p.M, h)
    ref = h**3 / (12 * mu_eff)
    e = abs(lhs - ref) / ref
    rows.append(Check("flowfactor", "Poiseuille limit (K/mu) phi vs h^3/(12 mu_eff) at Mh=1e-2", e, 0.0, 1e-3, e <= 1e-3))
    M, h = 100.0, 1.0
    e = abs(flow_factor(M, h) - (h - 2 / M)) / (h - 2 / M)
    rows.append(Check("flowfactor", "Darcy limit phi vs h - 2/M at Mh=100", e, 0.0, 1e-4, e <= 1e-4))
    return rows


def _test_profiles():
    return {
        "constant": RoughnessProfile.constant(1.0),
        "laminate_z1": RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0)),
        "product": RoughnessProfile.sinusoidal(1.0, 0.3, (0.0, 0.0), (1, 1)),
        "sampled": RoughnessProfile.sampled(1.0 + 0.2 * np.random.default_rng(7).random((16, 16))),
    }


def suite_subcritical():
    from .cell_subcritical import effective_tensor_subcritical
    from .profile import flow_factor

    rows = []
    params = make_params(1.0, 1.0, 1.0, 1.0)
    prof = _test_profiles()
    A, sol = effective_tensor_subcritical(prof["constant"], params, CellGrid(32, 32))
    grad = max(np.abs(sol.center_gradient(i)[c] - (i == c + 1)).max() for i in (1, 2) for c in (0, 1))
    rows.append(Check("subcritical", "constant h: max |grad pi|", grad, 0.0, 1e-8, grad <= 1e-8))
    phi = flow_factor(params.M, 1.0)
    e = np.abs(A.matrix - phi * np.eye(2)).max() / phi
    rows.append(Check("subcritical", "constant h: |A - phi I| / phi", e, 0.0, 1e-8, e <= 1e-8))
    A, _ = effective_tensor_subcritical(prof["laminate_z1"], params, CellGrid(128, 128))
    ref = oracle.laminate_tensor_1d(prof["laminate_z1"], params.M)
    e = np.abs(A.matrix - ref).max() / np.abs(ref).max()
    rows.append(Check("subcritical", "laminate 128^2: A vs diag(harmonic, arithmetic)", e, 0.0, 5e-3, e <= 5e-3))
    for name, pr in prof.items():
        A, _ = effective_tensor_subcritical(pr, params, CellGrid(32, 32))
        asym = abs(A.a12 - A.a21) / np.abs(A.matrix).max()
        rows.append(Check("subcritical", f"{name}: asymmetry", asym, 0.0, 1e-8, asym <= 1e-8))
        ev = A.eigenvalues.min()
        rows.append(Check("subcritical", f"{name}: min eigenvalue > 0", ev, 0.0, 0.0, ev > 0))
    return rows


def suite_macro():
    from .reynolds import MacroForcing, average_velocity, pressure_gradient, solve_pressure

    rows = []
    errs = []
    B0 = np.array([[1.0, 0.0], [0.0, 1.0]])
    for m in (16, 32, 64):
        g = MacroGrid((0.0, 2.0, 0.0, 1.0), m, m)
        p, grad = oracle.manufactured_pressure(g.bounds)
        P = solve_pressure(np.broadcast_to(B0, (m, m, 2, 2)).copy(), MacroForcing.from_function(g, grad), g)
        X, Y = g.nodes()
        errs.append(oracle.l2_error(P.p, p(X, Y), g.dx * g.dy))
    order = oracle.convergence_order(errs)
    rows.append(Check("macro", "manufactured solution convergence order (16/32/64)", order, 2.0, 0.2, order >= 1.8))
    g = MacroGrid((0.0, 2.0, 0.0, 1.0), 24, 16)
    B = np.broadcast_to(np.array([[1.3, 0.2], [0.2, 0.7]]), (24, 16, 2, 2)).copy()
    P = solve_pressure(B, MacroForcing.constant(g, (0.7, -0.4)), g)
    g1, g2 = pressure_gradient(P)
    e = max(np.abs(g1 - 0.7).max(), np.abs(g2 + 0.4).max())
    rows.append(Check("macro", "constant f, constant B: max |grad p - f|", e, 0.0, 1e-10, e <= 1e-10))
    v = float(np.abs(average_velocity(P)).max())
    rows.append(Check("macro", "constant f, constant B: max |V_av|", v, 0.0, 1e-10, v <= 1e-10))
    from .reynolds import named_forcing

    P = solve_pressure(B, named_forcing(g, "mixed"), g)
    rows.append(Check("macro", "conservation residual max |div flux|", P.divergence, 0.0, 1e-8, P.divergence <= 1e-8))
    return rows


def suite_temperature():
    from .cell_subcritical import effective_tensor_subcritical
    from .profile import shape, shape_dz
    from .reconstruct import reconstruct_temperature_subcritical

    rows = []
    pr = RoughnessProfile.constant(1.0)
    params = make_params(1.0, 1.0, 1.0, 1.0, b=1.0)
    _, sol = effective_tensor_subcritical(pr, params, CellGrid(8, 8))
    t = reconstruct_temperature_subcritical(0.0, 0.0, 0.0, 0.0, (0.0, 0.0), sol, pr, params, quad_n=1024)
    e = abs(t.T[0] - 1.0)
    rows.append(Check("temperature", "S=0, b=1: T(0)", t.T[0], 1.0, 0.0, e == 0.0))
    t = reconstruct_temperature_subcritical(0.0, 0.0, 0.0, 0.0, (1.0, 0.0), sol, pr, params, quad_n=1024)
    bvp = oracle.heat_bvp_1d(lambda z: shape(1.0, 1.0, z) ** 2 + shape_dz(1.0, 1.0, z) ** 2, 1.0, 1.0, 1.0, 8192)
    e = float(np.abs(t.T - bvp.at(t.z3)).max())
    rows.append(Check("temperature", "unit forcing: quadrature vs heat BVP (n=8192)", e, 0.0, 1e-6, e <= 1e-6))
    rows.append(Check("temperature", "top boundary T(h)", t.T[-1], 0.0, 0.0, t.T[-1] == 0.0))
    rows.append(Check("temperature", "bottom flux error at quad_n=1024", t.bottom_flux_error, 0.0, 1e-4,
                      t.bottom_flux_error <= 1e-4))
    return rows


def suite_critical(flat_grid=(32, 32, 64), rough_grid=(16, 16, 32)):
    from .cell_critical import assemble_tensor_critical, energy_identity, solve_cell_brinkman
    from .profile import flow_factor

    rows = []
    params = make_params(1.0, 1.0, 1.0, 1.0)
    M = params.M
    flat = RoughnessProfile.constant(1.0)
    sol = solve_cell_brinkman(flat, params, CellGrid(*flat_grid))
    u = sol.fields(1)[0]
    ref = oracle.brinkman_bvp_1d(M, 1.0, 4096).at(sol.cell.z3)
    e = float(np.abs(u - ref[None, None, :]).max() / ref.max())
    rows.append(Check("critical", f"flat {flat_grid}: horizontal velocity vs 1D Brinkman BVP", e, 0.0, 0.02, e <= 0.02))
    A = assemble_tensor_critical(sol)
    phi = flow_factor(M, 1.0)
    e = float(np.abs(A.matrix - phi * np.eye(2)).max() / phi)
    rows.append(Check("critical", f"flat {flat_grid}: A_M vs phi I", e, 0.0, 0.03, e <= 0.03))
    div = max(sol.divergence.values())
    rows.append(Check("critical", f"flat {flat_grid}: max divergence", div, 0.0, 1e-7, div <= 1e-7))
    rough = RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0))
    rsol = solve_cell_brinkman(rough, params, CellGrid(*rough_grid))
    for label, s in (("flat", sol), ("sinusoidal", rsol)):
        worst = 0.0
        for i in (1, 2):
            for j in (1, 2):
                lhs, rhs = energy_identity(s, i, j)
                worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300) if i == j
                            else abs(lhs - rhs) / abs(energy_identity(s, i, i)[0]))
        rows.append(Check("critical", f"{label}: weak-form energy identity (max rel)", worst, 0.0, 1e-4, worst <= 1e-4))
    # Voigt-Reuss bounds; the flat case collapses both bounds to phi, so the
    # discretization error is allowed at the tensor tolerance above
    for label, s, pr, slack in (("flat", sol, flat, 0.03), ("sinusoidal", rsol, rough, 0.0)):
        ev = assemble_tensor_critical(s).eigenvalues
        lo, hi = oracle.voigt_reuss_bounds(pr, M)
        viol = max(0.0, (lo - ev.min()) / lo, (ev.max() - hi) / hi)
        rows.append(Check("critical", f"{label}: eigenvalues within Voigt-Reuss bounds (rel violation)", viol, 0.0,
                          slack, viol <= slack, note=f"eig={ev.round(6).tolist()} bounds=({lo:.6g}, {hi:.6g})"))
    return rows


def _consistency_config(regime, amplitude, **over):
    from .pipeline import config_from_dict

    d = {
        "regime": regime,
        "params": {"mu": 1.0, "mu_eff": 1.0, "K": 1.0, "k": 1.0, "b": 0.5},
        "profile": {"kind": "sinusoidal-product", "mean": 1.0, "amplitude": amplitude, "wavenumbers": [1, 1]},
        "macro_grid": {"bounds": [0.0, 2.0, 0.0, 1.0], "m1": 16, "m2": 8},
        "cell_grid": {"n1": 32, "n2": 32},
        "forcing": {"family": "mixed", "amplitude": 1.0},
        "quad_n": 128,
    }
    d.update(over)
    return config_from_dict(d)


def regime_velocities(amplitude=0.002, critical_grid=(16, 16, 64)):
    """Average velocity fields of the three pipelines on one forcing."""
    from .pipeline import averages_stage, build_forcing, cell_stage, macro_stage

    out = {}
    for regime, over in (("subcritical", {}),
                         ("critical", {"cell_grid": dict(zip(("n1", "n2", "n3"), critical_grid))}),
                         ("smooth", {"use_h_min": True})):
        cfg = _consistency_config(regime, amplitude, **over)
        A, sol, _ = cell_stage(cfg)
        P = macro_stage(cfg, A, build_forcing(cfg))
        out[regime] = averages_stage(cfg, P, sol).V_av
    return out


def suite_consistency(amplitude=0.002):
    V = regime_velocities(amplitude)
    rows = []
    names = list(V)
    for a in range(3):
        for b in range(a + 1, 3):
            x, y = V[names[a]], V[names[b]]
            e = float(np.abs(x - y).max() / max(np.abs(x).max(), np.abs(y).max()))
            rows.append(Check("consistency", f"amplitude {amplitude}: V_av {names[a]} vs {names[b]}", e, 0.0, 0.03,
                              e <= 0.03))
    return rows


def suite_discrepancy():
    from .discrepancy import discrepancy_report

    rows = []
    for b in (0.0, 1.0):
        for name, lit, ref, dev, rel in discrepancy_report(make_params(1.0, 1.0, 1.0, 1.0, b=b)):
            rows.append(Check("discrepancy", f"{name} (b={b}) max deviation", dev, 0.0, float("nan"), True,
                              note=f"literal={lit:.6g} reference={ref:.6g} rel={rel:.3g} (reported only)"))
    return rows


def suite_reproducibility():
    from .pipeline import run_pipeline

    cfg = _consistency_config("subcritical", 0.2, cell_grid={"n1": 16, "n2": 16}, slices=[[3, 4]])
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp, "a"), Path(tmp, "b")
        run_pipeline(cfg, a)
        run_pipeline(cfg, b)
        names = sorted(p.name for p in a.iterdir())
        _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    bad = len(mismatch) + len(errors)
    return [Check("reproducibility", f"two runs byte-identical ({len(names)} files)", bad, 0, 0, bad == 0)]


def suite_oracle():
    from .profile import shape

    rows = []
    bvp = oracle.brinkman_bvp_richardson(1.0, 1.0, 4096)
    e = abs(bvp.at(0.5) - shape(1.0, 1.0, 0.5))
    rows.append(Check("oracle", "Richardson BVP vs closed form at h/2", e, 0.0, 1e-7, e <= 1e-7))
    umax = max(oracle.brinkman_bvp_1d(M, 1.0, 1024).u.max() for M in (0.1, 1.0, 10.0, 100.0))
    rows.append(Check("oracle", "max u <= 1 (maximum principle)", umax, 1.0, 0.0, umax <= 1.0))
    M, h = 0.01, 1.0
    b = oracle.brinkman_bvp_1d(M, h, 4096)
    ref = M**2 / 2 * b.z * (h - b.z)
    e = float(np.abs(b.u[1:-1] - ref[1:-1]).max() / ref.max())
    rows.append(Check("oracle", "Mh=0.01: BVP vs (M^2/2) z (h - z)", e, 0.0, 1e-3, e < 1e-3))
    lo, hi = np.diag(oracle.laminate_tensor_1d(RoughnessProfile.sinusoidal(1.0, 0.0, (0.3, 0.0), (1, 0)), 1.0))
    rows.append(Check("oracle", "laminate harmonic <= arithmetic", lo / hi, 1.0, 0.0, lo <= hi))
    return rows


SUITES = {
    "flowfactor": suite_flowfactor,
    "subcritical": suite_subcritical,
    "macro": suite_macro,
    "temperature": suite_temperature,
    "critical": suite_critical,
    "consistency": suite_consistency,
    "discrepancy": suite_discrepancy,
    "reproducibility": suite_reproducibility,
    "oracle": suite_oracle,
}
QUICK = ("flowfactor", "subcritical", "macro", "temperature", "discrepancy", "reproducibility", "oracle")


def resolve(selector):
    if not selector or selector == "all":
        return list(SUITES)
    if selector == "quick":
        return list(QUICK)
    names = [s.strip() for s in selector.split(",")]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; available: all, quick, {', '.join(SUITES)}")
    return names


def verify(selector=None, log=None):
    """Run the selected suites; ``log`` (callable) receives one line per check as it completes."""
    rows = []
    for name in resolve(selector):
        t0 = time.perf_counter()
        try:
            got = SUITES[name]()
        except Exception as err:  # a crashed suite is a failed check, not an aborted run
            got = [Check(name, "suite raised", float("nan"), 0.0, 0.0, False, note=f"{type(err).__name__}: {err}")]
        for c in got:
            if log:
                log(c.line())
        if log:
            log(f"-- {name}: {time.perf_counter() - t0:.1f} s")
        rows += got
    return rows


def table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "check", "measured", "target", "tolerance", "verdict", "note"])
    for c in rows:
        w.writerow([c.suite, c.name, format(c.measured, ".17g"), format(c.target, ".17g"), format(c.tol, ".17g"),
                    "pass" if c.passed else "fail", c.note])
    return buf.getvalue()
