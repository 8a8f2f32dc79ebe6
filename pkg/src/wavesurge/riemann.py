"""Artificial equation of state and the linearized Riemann solver with a
low-dissipation limiter.

States are built by projecting particle velocities on the axis pointing from
the left to the right particle, U = -v . e_ij with e_ij = (r_i - r_j)/r, so
U_L - U_R > 0 means the pair is approaching and switches the dissipation on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from . import GRAVITY


@dataclass(frozen=True)
class EosParams:
    """Weakly-compressible EoS constants: p = c^2 (rho - rho0)."""

    sound_speed: float
    rho0: float = 1000.0
    v_max: float = 0.0

    @classmethod
    def for_depth(cls, h_depth: float, rho0: float = 1000.0) -> "EosParams":
        """c = 10 v_max with v_max = 2 sqrt(g h)."""
        v_max = 2.0 * np.sqrt(GRAVITY * h_depth)
        return cls(sound_speed=10.0 * v_max, rho0=rho0, v_max=v_max)


def eos_pressure(rho, eos: EosParams):
    """p = c^2 (rho - rho0); tension (p < 0) is permitted."""
    return eos.sound_speed**2 * (np.asarray(rho) - eos.rho0)


def eos_density(p, eos: EosParams):
    """Inverse of the EoS: rho = rho0 + p / c^2."""
    return eos.rho0 + np.asarray(p) / eos.sound_speed**2


@numba.njit(cache=True, inline="always")
def riemann_star_scalar(rho_l, u_l, p_l, c_l, rho_r, u_r, p_r, c_r):
    """(U*, P*, beta) of the linearized acoustic Riemann problem."""
    zl = rho_l * c_l
    zr = rho_r * c_r
    zsum = zl + zr
    du = u_l - u_r
    cbar = zsum / (rho_l + rho_r)
    beta = 3.0 * max(du, 0.0) / cbar
    if beta > 1.0:
        beta = 1.0
    u_star = (zl * u_l + zr * u_r + p_l - p_r) / zsum
    p_star = (zl * p_r + zr * p_l + zl * zr * beta * du) / zsum
    return u_star, p_star, beta


def riemann_star(left: tuple, right: tuple) -> tuple[float, float, float]:
    """Python-facing wrapper; left/right are (rho, U, P, c) tuples."""
    rho_l, u_l, p_l, c_l = left
    rho_r, u_r, p_r, c_r = right
    if c_l <= 0 or c_r <= 0 or rho_l <= 0 or rho_r <= 0:
        raise ValueError("Riemann states need positive densities and sound speeds")
    return riemann_star_scalar(rho_l, u_l, p_l, c_l, rho_r, u_r, p_r, c_r)


def corrected_p_star(left, right, b_i: np.ndarray, b_j: np.ndarray) -> np.ndarray:
    """P* as a 2x2 tensor: the left/right pressures are weighted by the
    partner particle's correction matrix; the dissipation term stays scalar.

    Used inside the momentum accumulation; exposed here for direct testing.
    """
    rho_l, u_l, p_l, c_l = left
    rho_r, u_r, p_r, c_r = right
    zl = rho_l * c_l
    zr = rho_r * c_r
    zsum = zl + zr
    _, _, beta = riemann_star_scalar(rho_l, u_l, p_l, c_l, rho_r, u_r, p_r, c_r)
    diss = zl * zr * beta * (u_l - u_r)
    return (zl * p_r * np.asarray(b_i) + zr * p_l * np.asarray(b_j) + diss * np.eye(2)) / zsum
