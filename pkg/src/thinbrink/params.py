"""Physical constants, roughness profiles and the cell/macro grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PROFILE_KINDS = ("constant", "sinusoidal-product", "sampled-grid")


@dataclass(frozen=True)
class PhysicalParams:
    """Fluid, porous-medium and thermal constants.

    ``M`` is the Brinkman parameter sqrt(mu / (K * mu_eff)); it is always
    recomputed from the stored constants and cannot be set directly.
    """

    mu: float
    mu_eff: float
    K: float
    k: float
    b: float = 0.0
    M: float = field(init=False)

    def __post_init__(self):
        for name in ("mu", "mu_eff", "K", "k"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if not np.isfinite(self.b):
            raise ValueError(f"b must be finite, got {self.b!r}")
        object.__setattr__(self, "M", math.sqrt(self.mu / (self.K * self.mu_eff)))

    @property
    def mobility_scale(self) -> float:
        """K/mu, which equals 1/(M**2 * mu_eff)."""
        return self.K / self.mu

    def to_dict(self) -> dict:
        return {"mu": self.mu, "mu_eff": self.mu_eff, "K": self.K, "k": self.k, "b": self.b}


def make_params(mu, mu_eff, K, k, b=0.0) -> PhysicalParams:
    return PhysicalParams(float(mu), float(mu_eff), float(K), float(k), float(b))


@dataclass(frozen=True)
class RoughnessProfile:
    """Z'-periodic gap height h(z') on the cell Z' = (-1/2, 1/2)^2.

    Families:

    * ``constant``: h = mean
    * ``sinusoidal-product``: h = mean + a0 cos(2 pi k1 z1) cos(2 pi k2 z2)
      + a1 cos(2 pi k1 z1) + a2 cos(2 pi k2 z2)
    * ``sampled-grid``: an n x n array of heights at the cell centres of Z',
      interpolated bilinearly with periodic wrap-around.

    The separable terms ``a1``/``a2`` give laminate-type profiles that vary
    in one direction only.
    """

    kind: str
    mean: float = 1.0
    amplitude: float = 0.0
    amplitudes: tuple[float, float] = (0.0, 0.0)
    wavenumbers: tuple[int, int] = (1, 1)
    grid: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {PROFILE_KINDS}")
        if self.kind == "sampled-grid":
            if self.grid is None or np.size(self.grid) == 0:
                raise ValueError("sampled-grid profile needs a non-empty height grid")
            g = np.array(self.grid, dtype=float)
            if g.ndim != 2:
                raise ValueError("sampled-grid heights must be a 2D array")
            g.setflags(write=False)
            object.__setattr__(self, "grid", g)
        else:
            k1, k2 = self.wavenumbers
            if int(k1) != k1 or int(k2) != k2 or k1 < 0 or k2 < 0:
                raise ValueError("wavenumbers must be non-negative integers (Z'-periodicity)")
            object.__setattr__(self, "wavenumbers", (int(k1), int(k2)))
            object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        if not self.h_min > 0:
            raise ValueError(f"profile must be strictly positive, h_min = {self.h_min}")

    @classmethod
    def constant(cls, h: float) -> RoughnessProfile:
        return cls("constant", mean=float(h))

    @classmethod
    def sinusoidal(cls, mean=1.0, amplitude=0.0, amplitudes=(0.0, 0.0), wavenumbers=(1, 1)):
        return cls("sinusoidal-product", mean=float(mean), amplitude=float(amplitude),
                   amplitudes=tuple(amplitudes), wavenumbers=tuple(wavenumbers))

    @classmethod
    def sampled(cls, heights) -> RoughnessProfile:
        return cls("sampled-grid", grid=np.asarray(heights, dtype=float))

    @property
    def h_min(self) -> float:
        if self.kind == "constant":
            return self.mean
        if self.kind == "sampled-grid":
            return float(self.grid.min())
        return self.mean + min(_corner_values(self))

    @property
    def h_max(self) -> float:
        if self.kind == "constant":
            return self.mean
        if self.kind == "sampled-grid":
            return float(self.grid.max())
        return self.mean + max(_corner_values(self))

    def rotated(self) -> RoughnessProfile:
        """Profile rotated by 90 degrees: h_rot(z1, z2) = h(z2, -z1)."""
        if self.kind == "constant":
            return self
        if self.kind == "sampled-grid":
            # grid[i, j] sits at (z1_i, z2_j); rotation maps index (i, j) -> (j, n-1-i)
            return RoughnessProfile.sampled(np.rot90(self.grid, k=1).copy())
        a1, a2 = self.amplitudes
        k1, k2 = self.wavenumbers
        return RoughnessProfile.sinusoidal(self.mean, self.amplitude, (a2, a1), (k2, k1))

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "mean": self.mean}
        if self.kind == "sampled-grid":
            return {"kind": "sampled-grid", "grid": self.grid.tolist()}
        return {"kind": self.kind, "mean": self.mean, "amplitude": self.amplitude,
                "amplitudes": list(self.amplitudes), "wavenumbers": list(self.wavenumbers)}

    @classmethod
    def from_dict(cls, d: dict) -> RoughnessProfile:
        kind = d.get("kind")
        if kind == "constant":
            return cls.constant(d["mean"])
        if kind == "sinusoidal-product":
            return cls.sinusoidal(d.get("mean", 1.0), d.get("amplitude", 0.0),
                                  tuple(d.get("amplitudes", (0.0, 0.0))),
                                  tuple(d.get("wavenumbers", (1, 1))))
        if kind == "sampled-grid":
            return cls.sampled(d["grid"])
        raise ValueError(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")


def _corner_values(p):
    # a0*c1*c2 + a1*c1 + a2*c2 with c_i = cos(2 pi k_i z_i) in [-1, 1] is bilinear
    # in (c1, c2), so its extrema sit at corners (c_i == 1 when k_i == 0)
    k1, k2 = p.wavenumbers
    a1, a2 = p.amplitudes
    c1s = (1.0,) if k1 == 0 else (-1.0, 1.0)
    c2s = (1.0,) if k2 == 0 else (-1.0, 1.0)
    return [p.amplitude * c1 * c2 + a1 * c1 + a2 * c2 for c1 in c1s for c2 in c2s]


def wrap(z):
    """Map coordinates into the periodicity cell [-1/2, 1/2)."""
    z = np.asarray(z, dtype=float)
    return z - np.floor(z + 0.5)


def eval_h(profile: RoughnessProfile, z1, z2=None):
    """Evaluate h at z'. Accepts ``eval_h(p, z1, z2)`` or ``eval_h(p, (z1, z2))``."""
    if z2 is None:
        z1, z2 = z1
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if profile.kind == "constant":
        out = np.full(np.broadcast(z1, z2).shape, profile.mean)
    elif profile.kind == "sinusoidal-product":
        k1, k2 = profile.wavenumbers
        # cos(2 pi k (z + m)) == cos(2 pi k z) only up to rounding, so wrap first
        c1 = np.cos(2 * np.pi * k1 * wrap(z1))
        c2 = np.cos(2 * np.pi * k2 * wrap(z2))
        a1, a2 = profile.amplitudes
        out = profile.mean + profile.amplitude * c1 * c2 + a1 * c1 + a2 * c2
    else:
        out = _bilinear_periodic(profile.grid, wrap(z1), wrap(z2))
    return out if out.ndim else float(out)


def _bilinear_periodic(grid, z1, z2):
    n1, n2 = grid.shape
    # sample i sits at z = -1/2 + (i + 1/2)/n
    s1 = (z1 + 0.5) * n1 - 0.5
    s2 = (z2 + 0.5) * n2 - 0.5
    i0 = np.floor(s1).astype(int)
    j0 = np.floor(s2).astype(int)
    t1 = s1 - i0
    t2 = s2 - j0
    i0, i1 = i0 % n1, (i0 + 1) % n1
    j0, j1 = j0 % n2, (j0 + 1) % n2
    return ((1 - t1) * (1 - t2) * grid[i0, j0] + t1 * (1 - t2) * grid[i1, j0]
            + (1 - t1) * t2 * grid[i0, j1] + t1 * t2 * grid[i1, j1])


def periodic_bilinear(samples, z1, z2):
    """Bilinear interpolation of cell-centred samples on Z' at arbitrary (periodic) z'."""
    z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))
    out = _bilinear_periodic(np.asarray(samples, dtype=float), wrap(z1), wrap(z2))
    return out if out.ndim else float(out)


def grad_h(profile: RoughnessProfile, z1, z2, delta=1e-6):
    """Centred-difference gradient of h (h is only assumed Lipschitz)."""
    d1 = (eval_h(profile, z1 + delta, z2) - eval_h(profile, z1 - delta, z2)) / (2 * delta)
    d2 = (eval_h(profile, z1, z2 + delta) - eval_h(profile, z1, z2 - delta)) / (2 * delta)
    return np.asarray(d1), np.asarray(d2)


@dataclass(frozen=True)
class CellGrid:
    """Uniform cell-centred grid on Z' (periodic), extended by n3 layers in z3.

    For 3D use the vertical box is (0, height); ``height`` defaults to h_max of
    whatever profile the grid is paired with.
    """

    n1: int
    n2: int
    n3: int = 0
    height: float | None = None

    def __post_init__(self):
        for name in ("n1", "n2"):
            n = getattr(self, name)
            if n < 4 or n % 2:
                raise ValueError(f"{name} must be even and >= 4, got {n}")
        if self.n3 < 0:
            raise ValueError("n3 must be non-negative")
        if self.height is not None and not self.height > 0:
            raise ValueError("height must be positive")

    @property
    def d1(self) -> float:
        return 1.0 / self.n1

    @property
    def d2(self) -> float:
        return 1.0 / self.n2

    @property
    def z1(self) -> np.ndarray:
        return -0.5 + (np.arange(self.n1) + 0.5) / self.n1

    @property
    def z2(self) -> np.ndarray:
        return -0.5 + (np.arange(self.n2) + 0.5) / self.n2

    def centers(self):
        """Meshgrid (indexing='ij') of the z' cell centres."""
        return np.meshgrid(self.z1, self.z2, indexing="ij")

    def box_height(self, profile: RoughnessProfile) -> float:
        H = profile.h_max if self.height is None else self.height
        if H < profile.h_max - 1e-14:
            raise ValueError(f"grid box height {H} is below h_max = {profile.h_max}")
        return H

    def z3(self, profile: RoughnessProfile) -> np.ndarray:
        H = self.box_height(profile)
        return (np.arange(self.n3) + 0.5) * H / self.n3


@dataclass(frozen=True)
class MacroGrid:
    """Cell-centred grid on the rectangle omega = (x0, x1) x (y0, y1).

    The "nodes" are the m1 x m2 cell centres; arrays are indexed [i, j] with
    i along x1.
    """

    bounds: tuple[float, float, float, float]
    m1: int
    m2: int

    def __post_init__(self):
        x0, x1, y0, y1 = self.bounds
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"omega must have positive area, got bounds {self.bounds}")
        if self.m1 < 3 or self.m2 < 3:
            raise ValueError("m1 and m2 must be >= 3")
        object.__setattr__(self, "bounds", tuple(float(v) for v in self.bounds))

    @property
    def lengths(self):
        x0, x1, y0, y1 = self.bounds
        return x1 - x0, y1 - y0

    @property
    def dx(self) -> float:
        return self.lengths[0] / self.m1

    @property
    def dy(self) -> float:
        return self.lengths[1] / self.m2

    @property
    def x(self) -> np.ndarray:
        return self.bounds[0] + (np.arange(self.m1) + 0.5) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.bounds[2] + (np.arange(self.m2) + 0.5) * self.dy

    def nodes(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    @property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros((self.m1, self.m2), dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask

    def to_dict(self) -> dict:
        return {"bounds": list(self.bounds), "m1": self.m1, "m2": self.m2}
