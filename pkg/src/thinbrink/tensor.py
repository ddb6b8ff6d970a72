"""The homogenized 2x2 mobility tensor shared by all regimes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

REGIMES = ("subcritical", "critical", "smooth")


class TensorQualityError(ValueError):
    """The assembled tensor is not symmetric positive definite within tolerance."""


@dataclass(frozen=True)
class EffectiveTensor:
    """A_M with the average velocity V' = (K/mu) A_M (f' - grad p)."""

    matrix: np.ndarray
    regime: str
    M: float
    profile: object = None
    asymmetry: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        A = np.array(self.matrix, dtype=float).reshape(2, 2)
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def a11(self):
        return self.matrix[0, 0]

    @property
    def a12(self):
        return self.matrix[0, 1]

    @property
    def a21(self):
        return self.matrix[1, 0]

    @property
    def a22(self):
        return self.matrix[1, 1]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))

    def is_spd(self, rtol=1e-8) -> bool:
        A = self.matrix
        scale = np.abs(A).max()
        return bool(abs(A[0, 1] - A[1, 0]) <= rtol * scale and self.eigenvalues.min() > 0)

    def to_dict(self) -> dict:
        d = {
            "regime": self.regime,
            "M": self.M,
            "a11": self.a11, "a12": self.a12, "a21": self.a21, "a22": self.a22,
            "asymmetry": self.asymmetry,
        }
        d.update(self.info)
        return d


def check_spd(A, rtol=1e-8, what="tensor"):
    A = np.asarray(A, dtype=float)
    scale = np.abs(A).max()
    if not np.all(np.isfinite(A)):
        raise TensorQualityError(f"{what} has non-finite entries")
    if abs(A[0, 1] - A[1, 0]) > rtol * scale:
        raise TensorQualityError(f"{what} asymmetric: |a12 - a21| = {abs(A[0, 1] - A[1, 0]):.3e}")
    if np.linalg.eigvalsh(0.5 * (A + A.T)).min() <= 0:
        raise TensorQualityError(f"{what} is not positive definite")
    return A
