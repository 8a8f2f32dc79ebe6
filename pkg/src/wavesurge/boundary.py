"""Solid-wall ghost states and the outlet damping zone."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .particles import FLUID
from .riemann import EosParams


def wall_ghost_state(fluid_pos, fluid_vel, fluid_rho, fluid_p,
                     wall_pos, wall_vel, wall_normal,
                     eos: EosParams, gravity=(0.0, -9.81), wall_acc=(0.0, 0.0)):
    """One-sided Riemann states for a fluid particle against a solid particle.

    The 1D axis points from the fluid into the wall (-n), so
    U_L = -v_f . n and the reflected wall-side velocity is
    U_R = -U_L + 2 u_w with u_w the wall velocity on the same axis. The
    wall-side pressure continues the fluid pressure hydrostatically (plus
    the wall acceleration when one is supplied).

    Returns ((rho_L, U_L, P_L, c_L), (rho_R, U_R, P_R, c_R)).
    """
    n = np.asarray(wall_normal, dtype=float)
    nn = float(np.hypot(n[0], n[1]))
    if abs(nn - 1.0) > 1e-9:
        raise ValueError("wall normal must be unit length")
    vf = np.asarray(fluid_vel, dtype=float)
    u_l = -float(vf @ n)
    u_w = -float(np.asarray(wall_vel, dtype=float) @ n)
    u_r = -u_l + 2.0 * u_w
    r_iw = np.asarray(wall_pos, dtype=float) - np.asarray(fluid_pos, dtype=float)
    g_eff = np.asarray(gravity, dtype=float) - np.asarray(wall_acc, dtype=float)
    p_l = float(fluid_p)
    p_r = p_l + float(fluid_rho) * float(g_eff @ r_iw)
    rho_r = max(eos.rho0 + p_r / eos.sound_speed**2, 0.01 * eos.rho0)
    c = eos.sound_speed
    return (float(fluid_rho), u_l, p_l, c), (rho_r, u_r, p_r, c)


@dataclass(frozen=True)
class DampingZone:
    """Velocity-attenuation region [start, end] ahead of the outlet wall."""

    start: float
    end: float
    alpha: float = 5.0

    def __post_init__(self):
        if not self.end > self.start:
            raise ValueError("damping zone end must exceed its start")
        if not self.alpha > 0:
            raise ValueError("damping zone needs a positive reduction coefficient")


@numba.njit(cache=True)
def _damp(pos, vel, kind, r0, r1, alpha_dt):
    inv_len = 1.0 / (r1 - r0)
    for i in range(pos.shape[0]):
        if kind[i] != 0:
            continue
        x = pos[i, 0]
        if x < r0 or x > r1:
            continue
        f = 1.0 - alpha_dt * (x - r0) * inv_len
        vel[i, 0] *= f
        vel[i, 1] *= f


def apply_damping_zone(ps, zone: DampingZone, dt: float) -> None:
    """v <- v (1 - alpha dt (x - r0)/(r1 - r0)) on fluid particles in the zone."""
    _damp(ps.pos, ps.vel, ps.kind, zone.start, zone.end, zone.alpha * dt)
