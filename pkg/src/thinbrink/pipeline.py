"""JSON run configuration and the batch pipeline cell -> tensor -> pressure -> averages.

Output files (all floats with 17 significant digits):

* ``tensor.json``: A_M entries, regime, M and solver residuals
* ``pressure.csv``: x1, x2, p
* ``velocity_avg.csv``: x1, x2, V1, V2
* ``temperature_avg.csv``: x1, x2, T_av
* ``profile_slices.csv`` (optional): x1, x2, z3, u1, u2 for the requested nodes
* ``report.json``: residuals and invariant checks

Macro rows are in row-major node order (x1 index outer).
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import CellGrid, MacroGrid, PhysicalParams, RoughnessProfile, eval_h, make_params
from .profile import flow_factor
from .reynolds import MacroForcing, average_velocity, mobility_field, named_forcing, solve_pressure
from .tensor import REGIMES, EffectiveTensor

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid run configuration; ``errors`` lists (field path, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p}: {m}" for p, m in self.errors))


DEFAULT_TOL = {"cell": 1e-10, "critical": 1e-8, "macro": 1e-12, "temperature": 1e-10}


@dataclass(frozen=True)
class RunConfig:
    regime: str
    params: PhysicalParams
    profile: RoughnessProfile
    macro_grid: MacroGrid
    cell_grid: CellGrid
    forcing: dict
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOL))
    quad_n: int = 256
    use_h_min: bool = False
    output_dir: str = "out"
    slices: tuple = ()

    def to_dict(self) -> dict:
        cg = {"n1": self.cell_grid.n1, "n2": self.cell_grid.n2, "n3": self.cell_grid.n3}
        if self.cell_grid.height is not None:
            cg["height"] = self.cell_grid.height
        return {
            "regime": self.regime,
            "params": self.params.to_dict(),
            "profile": self.profile.to_dict(),
            "macro_grid": self.macro_grid.to_dict(),
            "cell_grid": cg,
            "forcing": dict(self.forcing),
            "tolerances": dict(self.tolerances),
            "quad_n": self.quad_n,
            "use_h_min": self.use_h_min,
            "output_dir": self.output_dir,
            "slices": [list(s) for s in self.slices],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _get(d, key, path, errors, kind=dict):
    if key not in d:
        errors.append((f"{path}.{key}".lstrip("."), "missing"))
        return None
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        errors.append((f"{path}.{key}".lstrip("."), f"expected {kind.__name__}"))
        return None
    return v


def _build(path, errors, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (ValueError, TypeError, KeyError) as err:
        errors.append((path, str(err)))
        return None


def config_from_dict(d: dict) -> RunConfig:
    """Validate a parsed JSON config; every problem is reported with its field path."""
    errors = []
    if not isinstance(d, dict):
        raise ConfigError([("", "config must be a JSON object")])
    regime = d.get("regime")
    if regime not in REGIMES:
        errors.append(("regime", f"expected one of {REGIMES}, got {regime!r}"))
    p = _get(d, "params", "", errors)
    params = None
    if p is not None:
        params = _build("params", errors, lambda: make_params(p["mu"], p["mu_eff"], p["K"], p["k"], p.get("b", 0.0)))
    pr = _get(d, "profile", "", errors)
    profile = _build("profile", errors, RoughnessProfile.from_dict, pr) if pr is not None else None
    mg = _get(d, "macro_grid", "", errors)
    macro = None
    if mg is not None:
        macro = _build("macro_grid", errors, lambda: MacroGrid(tuple(mg["bounds"]), int(mg["m1"]), int(mg["m2"])))
    cg = d.get("cell_grid", {"n1": 32, "n2": 32})
    cell = _build("cell_grid", errors, lambda: CellGrid(int(cg["n1"]), int(cg["n2"]), int(cg.get("n3", 0)),
                                                         cg.get("height")))
    if regime == "critical" and cell is not None and cell.n3 < 8:
        errors.append(("cell_grid.n3", "critical regime needs n3 >= 8"))
    forcing = d.get("forcing", {"family": "zero"})
    if not isinstance(forcing, dict) or not ("family" in forcing or "csv" in forcing):
        errors.append(("forcing", "needs 'family' (zero, constant, gradient, rotational, mixed) or 'csv'"))
    tol = dict(DEFAULT_TOL)
    for key, value in d.get("tolerances", {}).items():
        if key not in DEFAULT_TOL:
            errors.append((f"tolerances.{key}", f"unknown tolerance; expected one of {sorted(DEFAULT_TOL)}"))
        elif not (isinstance(value, (int, float)) and value > 0):
            errors.append((f"tolerances.{key}", "must be > 0"))
        else:
            tol[key] = float(value)
    quad_n = d.get("quad_n", 256)
    if not isinstance(quad_n, int) or quad_n < 64:
        errors.append(("quad_n", "must be an integer >= 64"))
    use_h_min = d.get("use_h_min", False)
    if not isinstance(use_h_min, bool):
        errors.append(("use_h_min", "must be true or false"))
    slices = d.get("slices", [])
    if macro is not None:
        for n, s in enumerate(slices):
            if not (len(s) == 2 and 0 <= s[0] < macro.m1 and 0 <= s[1] < macro.m2):
                errors.append((f"slices[{n}]", "must be a macro node index [i, j]"))
    if errors:
        raise ConfigError(errors)
    return RunConfig(regime, params, profile, macro, cell, dict(forcing), tol, quad_n, use_h_min,
                     str(d.get("output_dir", "out")), tuple(tuple(int(v) for v in s) for s in slices))


def load_config(path) -> RunConfig:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ConfigError([("", f"invalid JSON: {err}")]) from err
    return config_from_dict(d)


def build_forcing(cfg: RunConfig, base=None) -> MacroForcing:
    opts = dict(cfg.forcing)
    if "csv" in opts:
        path = Path(opts["csv"])
        if base is not None and not path.is_absolute():
            path = Path(base) / path
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        g = cfg.macro_grid
        if data.shape != (g.m1 * g.m2, 4):
            raise ConfigError([("forcing.csv", f"expected {g.m1 * g.m2} rows of x1,x2,f1,f2")])
        return MacroForcing(data[:, 2].reshape(g.m1, g.m2), data[:, 3].reshape(g.m1, g.m2))
    family = opts.pop("family")
    return named_forcing(cfg.macro_grid, family, **opts)


def _fmt(v):
    return format(float(v), ".17g")


def write_macro_csv(path, grid: MacroGrid, header, *columns):
    X, Y = grid.nodes()
    cols = [X.ravel(), Y.ravel()] + [np.asarray(c).ravel() for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", *header])
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(obj))
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


@dataclass
class RunReport:
    status: int
    tensor: EffectiveTensor | None
    checks: dict
    files: list

    def to_dict(self):
        return {"status": self.status, "checks": self.checks, "files": self.files}


def cell_stage(cfg: RunConfig, threads=1):
    """(tensor, cell solution, checks) for the configured regime."""
    checks = {}
    if cfg.regime == "subcritical":
        from .cell_subcritical import effective_tensor_subcritical

        A, sol = effective_tensor_subcritical(cfg.profile, cfg.params, cfg.cell_grid,
                                              tol=cfg.tolerances["cell"], workers=threads)
        checks["corrector_residuals"] = list(sol.residuals)
        return A, sol, checks
    if cfg.regime == "critical":
        from .cell_critical import (assemble_tensor_critical, energy_identity, interface_slip,
                                    solid_leakage, solve_cell_brinkman)
        from .oracle import voigt_reuss_bounds

        sol = solve_cell_brinkman(cfg.profile, cfg.params, cfg.cell_grid, tol=cfg.tolerances["critical"])
        A = assemble_tensor_critical(sol)
        lo, hi = voigt_reuss_bounds(cfg.profile, cfg.params.M)
        ev = A.eigenvalues
        checks["voigt_reuss"] = {"harmonic": lo, "arithmetic": hi, "eigenvalues": ev.tolist(),
                                 "within": bool(ev.min() >= lo and ev.max() <= hi)}
        checks["energy_identity"] = [list(energy_identity(sol, i, j)) for i in (1, 2) for j in (1, 2)]
        checks["solid_leakage"] = [solid_leakage(sol, i) for i in (1, 2)]
        checks["interface_slip"] = [interface_slip(sol, i) for i in (1, 2)]
        return A, sol, checks
    # smooth: no cell problem; the flat-film tensor at h_min is reported for reference
    h = cfg.profile.h_min if cfg.use_h_min else None
    if h is None and cfg.profile.kind == "constant":
        h = cfg.profile.mean
    if h is not None:
        phi = float(flow_factor(cfg.params.M, h))
        A = EffectiveTensor(phi * np.eye(2), "smooth", cfg.params.M, None, 0.0, {"h": h})
    else:
        A = None
    return A, None, checks


def _tensor_json(cfg, A: EffectiveTensor | None):
    out = {"regime": cfg.regime, "M": cfg.params.M, "use_h_min": cfg.use_h_min}
    if A is not None:
        out.update(A.to_dict())
    return out


def macro_stage(cfg: RunConfig, A, forcing):
    if cfg.regime == "smooth":
        B = mobility_field("smooth", cfg.macro_grid, cfg.profile, cfg.params, use_h_min=cfg.use_h_min)
    else:
        B = mobility_field(cfg.regime, cfg.macro_grid, cfg.profile, cfg.params, tensor=A)
    P = solve_pressure(B, forcing, cfg.macro_grid, tol=cfg.tolerances["macro"])
    return P


def averages_stage(cfg: RunConfig, P, sol):
    from . import reconstruct as rc

    if cfg.regime == "subcritical":
        return rc.averages_subcritical(P, sol, cfg.profile, cfg.params, quad_n=cfg.quad_n)
    if cfg.regime == "critical":
        return rc.averages_critical(P, sol, cfg.params, tol=cfg.tolerances["temperature"])
    h = cfg.profile.h_min if cfg.use_h_min else cfg.profile
    return rc.averages_smooth(P, h, cfg.params, quad_n=cfg.quad_n)


def _write_slices(path, cfg, P, fields):
    from .reconstruct import smooth_velocity

    g = cfg.macro_grid
    rows = []
    for i, j in cfg.slices:
        x1, x2 = g.x[i], g.y[j]
        if cfg.regime == "subcritical":
            z3 = np.linspace(0.0, cfg.profile.h_max, 65)
            u = fields.u_tilde(i, j, z3)
        elif cfg.regime == "smooth":
            h = cfg.profile.h_min if cfg.use_h_min else eval_h(cfg.profile, x1, x2)
            z3 = np.linspace(0.0, h, 65)
            u = smooth_velocity(x1, x2, z3, P, h, cfg.params)
        else:
            continue
        rows += [(x1, x2, z, a, b) for z, (a, b) in zip(z3, u)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1", "x2", "z3", "u1", "u2"])
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def run_pipeline(cfg: RunConfig, out=None, stages=("cell", "macro", "averages"), threads=1,
                 config_dir=None) -> RunReport:
    out = Path(out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, checks = [], {}
    A, sol, cell_checks = cell_stage(cfg, threads)
    checks.update(cell_checks)
    write_json(out / "tensor.json", _tensor_json(cfg, A))
    files.append("tensor.json")
    status = 0
    if "macro" in stages:
        P = macro_stage(cfg, A, build_forcing(cfg, config_dir))
        V = average_velocity(P)
        checks["pressure"] = {"residual": P.residual, "mean": P.mean, "divergence": P.divergence,
                              "mean_ok": bool(abs(P.mean) <= 1e-10 * max(np.abs(P.p).max(), 1e-300))}
        write_macro_csv(out / "pressure.csv", cfg.macro_grid, ["p"], P.p)
        write_macro_csv(out / "velocity_avg.csv", cfg.macro_grid, ["V1", "V2"], V[..., 0], V[..., 1])
        files += ["pressure.csv", "velocity_avg.csv"]
        if "averages" in stages:
            fields = averages_stage(cfg, P, sol)
            dV = float(np.abs(fields.V_av - V).max())
            checks["averages"] = {"velocity_consistency": dV, **fields.checks}
            write_macro_csv(out / "temperature_avg.csv", cfg.macro_grid, ["T_av"], fields.T_av)
            files.append("temperature_avg.csv")
            if cfg.slices:
                _write_slices(out / "profile_slices.csv", cfg, P, fields)
                files.append("profile_slices.csv")
    report = RunReport(status, A, checks, files)
    write_json(out / "report.json", report.to_dict())
    return report
