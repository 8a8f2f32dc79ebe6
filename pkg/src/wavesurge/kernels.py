"""Wendland C2 smoothing kernel in two dimensions.

The kernel has compact support of radius 2*ell (ell = smoothing length):

    W(r, ell) = 7/(4*pi*ell^2) * (1 - q/2)^4 * (2q + 1),   q = r/ell in [0, 2]

Its radial derivative is dW/dr = -5q * 7/(4*pi*ell^3) * (1 - q/2)^3, which
vanishes at both q = 0 (even symmetry) and q = 2 (support edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

SUPPORT_RATIO = 2.0  # cutoff radius / smoothing length
SIGMA_2D = 7.0 / (4.0 * math.pi)  # normalization constant * ell^2


@numba.njit(cache=True, inline="always")
def w_value(r, ell):
    q = r / ell
    if q >= 2.0:
        return 0.0
    t = 1.0 - 0.5 * q
    return SIGMA_2D / (ell * ell) * t * t * t * t * (2.0 * q + 1.0)


@numba.njit(cache=True, inline="always")
def w_grad(r, ell):
    """Radial derivative dW/dr (negative inside the support)."""
    q = r / ell
    if q >= 2.0:
        return 0.0
    t = 1.0 - 0.5 * q
    return -5.0 * q * SIGMA_2D / (ell * ell * ell) * t * t * t


def kernel_eval(r: float, ell: float) -> tuple[float, float]:
    """Evaluate (W, dW/dr) at separation r for smoothing length ell.

    Raises ValueError for non-finite or non-positive ell, or negative r.
    """
    if not np.isfinite(ell) or ell <= 0.0:
        raise ValueError(f"smoothing length must be finite and positive, got {ell}")
    if not np.isfinite(r) or r < 0.0:
        raise ValueError(f"separation must be finite and non-negative, got {r}")
    return w_value(r, ell), w_grad(r, ell)


@dataclass(frozen=True)
class SmoothingKernel:
    """Wendland C2 kernel bound to a fixed smoothing length."""

    smoothing_length: float

    def __post_init__(self):
        if not np.isfinite(self.smoothing_length) or self.smoothing_length <= 0.0:
            raise ValueError("smoothing length must be finite and positive")

    @property
    def cutoff_radius(self) -> float:
        return SUPPORT_RATIO * self.smoothing_length

    @property
    def normalization(self) -> float:
        """Peak prefactor 7/(4 pi ell^2) in 1/m^2."""
        return SIGMA_2D / self.smoothing_length**2

    def __call__(self, r: float) -> tuple[float, float]:
        return kernel_eval(r, self.smoothing_length)
