"""Weakly-compressible Riemann-SPH right-hand sides and time-step criteria.

All pair sweeps walk a precomputed half pair list (each unordered pair once,
ascending order) serially, so accumulation order is fixed and reruns are
bit-identical. Fluid-fluid pairs use the two-sided linearized Riemann
solution; fluid-solid pairs use the one-sided solution along the solid
particle's outward normal, with the solid-side pressure extended
hydrostatically (and by the lagged body acceleration for body particles).

Momentum uses the correction-weighted pressure tensor (left/right pressures
weighted by the partner particle's blended correction matrix; dissipation
left scalar). Continuity and viscous terms use raw kernel gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .kernels import w_value, w_grad
from .particles import FLUID, BODY
from .riemann import riemann_star_scalar

CFL_AD = 0.25
CFL_AC = 0.6


class SimulationError(RuntimeError):
    """Raised when the particle state becomes unusable (NaN, escape, ...)."""


@dataclass(frozen=True)
class StepSizes:
    dt_advection: float
    dt_acoustic: float
    substeps: int
    cfl_ad: float = CFL_AD
    cfl_ac: float = CFL_AC


def time_step_sizes(vel: np.ndarray, sound_speed: float, ell: float, nu: float) -> StepSizes:
    """Dual-criteria step sizes; the viscous bound covers |v|max = 0."""
    vmax = float(np.sqrt((vel * vel).sum(axis=1).max())) if vel.size else 0.0
    dt_visc = CFL_AD * ell * ell / nu
    dt_adv = CFL_AD * ell / vmax if vmax > 0.0 else math.inf
    dt_ad = min(dt_adv, dt_visc)
    dt_ac = CFL_AC * ell / (sound_speed + vmax)
    return StepSizes(dt_ad, dt_ac, max(1, int(math.ceil(dt_ad / dt_ac))))


@numba.njit(cache=True)
def _kernel_sums(pair_i, pair_j, pos, mass, ell, cutoff, out, out_m):
    n = pos.shape[0]
    w0 = w_value(0.0, ell)
    for i in range(n):
        out[i] = w0
        out_m[i] = w0 * mass[i]
    for k in range(pair_i.shape[0]):
        i = pair_i[k]
        j = pair_j[k]
        dx = pos[i, 0] - pos[j, 0]
        dy = pos[i, 1] - pos[j, 1]
        r2 = dx * dx + dy * dy
        if r2 >= cutoff * cutoff:
            continue
        w = w_value(np.sqrt(r2), ell)
        out[i] += w
        out[j] += w
        out_m[i] += w * mass[j]
        out_m[j] += w * mass[i]


def kernel_sums(pair_i, pair_j, pos, ell, cutoff, mass=None):
    """Number-density kernel sums sum_j W_ij (self included); with `mass`
    also returns the mass-weighted sums sum_j m_j W_ij."""
    out = np.empty(pos.shape[0])
    out_m = np.empty(pos.shape[0])
    m = mass if mass is not None else np.ones(pos.shape[0])
    _kernel_sums(pair_i, pair_j, pos, m, ell, cutoff, out, out_m)
    if mass is None:
        return out
    return out, out_m


FULL_SUPPORT_FRACTION = 0.96  # of the ideal-lattice kernel sum


def ideal_kernel_sum(dp: float, ell: float) -> float:
    """Kernel sum (self included) of an interior particle on the dp lattice."""
    reach = int(math.ceil(2.0 * ell / dp))
    total = w_value(0.0, ell)
    for ix in range(-reach, reach + 1):
        for iy in range(-reach, reach + 1):
            if ix == 0 and iy == 0:
                continue
            total += w_value(math.hypot(ix * dp, iy * dp), ell)
    return total


def reinitialize_density(ps, pair_i, pair_j, ell, cutoff, sigma_full, dp,
                         mode="ratio") -> None:
    """Clamp fluid density from below by a kernel-sum estimate of the packing.

    mode="ratio": candidate rho_init_i * sum W / sum W0_i with each
    particle's own initial sum as normalizer. For surface particles
    (initially deficient support) this pins the density at the build-time
    reference whenever the neighborhood is at least as crowded as at t=0,
    suppressing surface rarefaction noise; neighborhood compaction raises
    the floor proportionally.

    mode="summation": candidate is the mass-weighted kernel summation
    normalized by the full-support lattice sum.
    """
    if ps.kernel_sum0 is None or not np.all(ps.kernel_sum0 > 0.0):
        raise SimulationError("initial kernel sums missing or zero; initialization bug")
    sums, msums = kernel_sums(pair_i, pair_j, ps.pos, ell, cutoff, mass=ps.mass)
    fluid = ps.kind == FLUID
    if mode == "ratio":
        candidate = ps.rho_init[fluid] * sums[fluid] / ps.kernel_sum0[fluid]
    else:
        candidate = msums[fluid] / (sigma_full * dp * dp)
    ps.rho[fluid] = np.maximum(ps.rho[fluid], candidate)


@numba.njit(cache=True)
def _viscous_sweep(pair_i, pair_j, pos, vel, mass, vol, kind, ell, cutoff, mu,
                   acc, body_force):
    for k in range(pair_i.shape[0]):
        i = pair_i[k]
        j = pair_j[k]
        fi = kind[i] == 0
        fj = kind[j] == 0
        if not (fi or fj):
            continue
        dx = pos[i, 0] - pos[j, 0]
        dy = pos[i, 1] - pos[j, 1]
        r2 = dx * dx + dy * dy
        if r2 >= cutoff * cutoff or r2 == 0.0:
            continue
        r = np.sqrt(r2)
        dw = w_grad(r, ell)
        vvij = 2.0 * mu * vol[i] * vol[j] * dw / r
        dvx = vel[i, 0] - vel[j, 0]
        dvy = vel[i, 1] - vel[j, 1]
        if fi and fj:
            acc[i, 0] += vvij * dvx / mass[i]
            acc[i, 1] += vvij * dvy / mass[i]
            acc[j, 0] -= vvij * dvx / mass[j]
            acc[j, 1] -= vvij * dvy / mass[j]
        else:
            if fi:
                f, s = i, j
                sdvx, sdvy = dvx, dvy
            else:
                f, s = j, i
                sdvx, sdvy = -dvx, -dvy
            # fluid side: no-slip ghost velocity 2(v_f - u_s)
            acc[f, 0] += vvij * 2.0 * sdvx / mass[f]
            acc[f, 1] += vvij * 2.0 * sdvy / mass[f]
            if kind[s] == 3:
                # drag on the body, v_s - v_f
                body_force[s, 0] += vvij * (-sdvx)
                body_force[s, 1] += vvij * (-sdvy)


@numba.njit(cache=True, inline="always")
def _p_hydro(y, rho0, g_mag, href):
    head = href - y
    if head < 0.0:
        head = 0.0
    return rho0 * g_mag * head


@numba.njit(cache=True)
def _momentum_sweep(pair_i, pair_j, pos, vel, rho, p, vol, mass, kind, normal,
                    solid_acc, bxx, bxy, byy, ell, cutoff, c, rho0, gx, gy,
                    href, dvdt, body_force):
    """Pressure accelerations from the DYNAMIC pressure p - p_hydro(y).

    The analytic hydrostatic background is handled pointwise by the caller
    (buoyancy-residual gravity), so the kernel sums never see the large
    static field whose truncation error at free surfaces rings the tank.
    The force on body particles keeps the full pressure: buoyancy on the
    flap arrives through the hydrostatic part.
    """
    rho_floor = 0.01 * rho0
    g_mag = np.sqrt(gx * gx + gy * gy)
    for k in range(pair_i.shape[0]):
        i = pair_i[k]
        j = pair_j[k]
        fi = kind[i] == 0
        fj = kind[j] == 0
        if not (fi or fj):
            continue
        dx = pos[i, 0] - pos[j, 0]
        dy = pos[i, 1] - pos[j, 1]
        r2 = dx * dx + dy * dy
        if r2 >= cutoff * cutoff or r2 == 0.0:
            continue
        r = np.sqrt(r2)
        dw = w_grad(r, ell)
        if fi and fj:
            ex = dx / r
            ey = dy / r
            ul = -(vel[i, 0] * ex + vel[i, 1] * ey)
            ur = -(vel[j, 0] * ex + vel[j, 1] * ey)
            zl = rho[i] * c
            zr = rho[j] * c
            zsum = zl + zr
            du = ul - ur
            beta = 3.0 * max(du, 0.0) * (rho[i] + rho[j]) / zsum
            if beta > 1.0:
                beta = 1.0
            diss = zl * zr * beta * du
            pdi = p[i] - _p_hydro(pos[i, 1], rho0, g_mag, href)
            pdj = p[j] - _p_hydro(pos[j, 1], rho0, g_mag, href)
            ci = zl * pdj
            cj = zr * pdi
            # pressure tensor times gradient vector
            gvx = ex * dw
            gvy = ey * dw
            pxx = (ci * bxx[i] + cj * bxx[j] + diss) / zsum
            pxy = (ci * bxy[i] + cj * bxy[j]) / zsum
            pyy = (ci * byy[i] + cj * byy[j] + diss) / zsum
            fx = 2.0 * vol[i] * vol[j] * (pxx * gvx + pxy * gvy)
            fy = 2.0 * vol[i] * vol[j] * (pxy * gvx + pyy * gvy)
            dvdt[i, 0] -= fx / mass[i]
            dvdt[i, 1] -= fy / mass[i]
            dvdt[j, 0] += fx / mass[j]
            dvdt[j, 1] += fy / mass[j]
        else:
            if fi:
                f, s = i, j
                efx = dx / r
                efy = dy / r
            else:
                f, s = j, i
                efx = -dx / r
                efy = -dy / r
            nxw = normal[s, 0]
            nyw = normal[s, 1]
            ul = -(vel[f, 0] * nxw + vel[f, 1] * nyw)
            uw = -(vel[s, 0] * nxw + vel[s, 1] * nyw)
            ur = -ul + 2.0 * uw
            # solid-side state: Eq-18-style hydrostatic extension below the
            # reference surface; above it (dry wall, flap top) the ghost
            # mirrors the dynamic pressure plus the body-acceleration term
            rsx = pos[s, 0] - pos[f, 0]
            rsy = pos[s, 1] - pos[f, 1]
            pl = p[f] - _p_hydro(pos[f, 1], rho0, g_mag, href)
            if pos[s, 1] <= href:
                gex = gx - solid_acc[s, 0]
                gey = gy - solid_acc[s, 1]
                pr_full = p[f] + rho[f] * (gex * rsx + gey * rsy)
                pr = pr_full - _p_hydro(pos[s, 1], rho0, g_mag, href)
            else:
                pr = pl - rho[f] * (solid_acc[s, 0] * rsx + solid_acc[s, 1] * rsy)
                pr_full = pr
            rho_r = rho0 + pr_full / (c * c)
            if rho_r < rho_floor:
                rho_r = rho_floor
            zl = rho[f] * c
            zr = rho_r * c
            zsum = zl + zr
            du = ul - ur
            beta = 3.0 * max(du, 0.0) * (rho[f] + rho_r) / zsum
            if beta > 1.0:
                beta = 1.0
            diss = zl * zr * beta * du
            ci = zl * pr
            cj = zr * pl
            gvx = efx * dw
            gvy = efy * dw
            pxx = (ci * bxx[f] + cj * bxx[s] + diss) / zsum
            pxy = (ci * bxy[f] + cj * bxy[s]) / zsum
            pyy = (ci * byy[f] + cj * byy[s] + diss) / zsum
            fx = 2.0 * vol[f] * vol[s] * (pxx * gvx + pxy * gvy)
            fy = 2.0 * vol[f] * vol[s] * (pxy * gvx + pyy * gvy)
            dvdt[f, 0] -= fx / mass[f]
            dvdt[f, 1] -= fy / mass[f]
            if kind[s] == 3:
                # pressure force on the body keeps the full pressure
                proj = gex * rsx + gey * rsy
                if proj < 0.0:
                    proj = 0.0
                pd = p[f] + rho[f] * proj
                rho_d = rho0 + pd / (c * c)
                if rho_d < rho_floor:
                    rho_d = rho_floor
                pavg = (p[f] * rho_d + pd * rho[f]) / (rho[f] + rho_d)
                bfx = 2.0 * vol[f] * vol[s] * pavg * efx * dw
                bfy = 2.0 * vol[f] * vol[s] * pavg * efy * dw
                body_force[s, 0] += bfx
                body_force[s, 1] += bfy


@numba.njit(cache=True)
def _continuity_sweep(pair_i, pair_j, pos, vel, rho, vol, kind, normal,
                      p, ell, cutoff, c, rho0, gx, gy, href, drho):
    g_mag = np.sqrt(gx * gx + gy * gy)
    for k in range(pair_i.shape[0]):
        i = pair_i[k]
        j = pair_j[k]
        fi = kind[i] == 0
        fj = kind[j] == 0
        if not (fi or fj):
            continue
        dx = pos[i, 0] - pos[j, 0]
        dy = pos[i, 1] - pos[j, 1]
        r2 = dx * dx + dy * dy
        if r2 >= cutoff * cutoff or r2 == 0.0:
            continue
        r = np.sqrt(r2)
        dw = w_grad(r, ell)
        if fi and fj:
            ex = dx / r
            ey = dy / r
            ul = -(vel[i, 0] * ex + vel[i, 1] * ey)
            ur = -(vel[j, 0] * ex + vel[j, 1] * ey)
            # the pressure term acts on the dynamic jump only, otherwise the
            # static hydrostatic gradient diffuses density forever
            dp_dyn = (p[i] - _p_hydro(pos[i, 1], rho0, g_mag, href)
                      - p[j] + _p_hydro(pos[j, 1], rho0, g_mag, href))
            zsum = (rho[i] + rho[j]) * c
            us = (rho[i] * c * ul + rho[j] * c * ur + dp_dyn) / zsum
            drho[i] += 2.0 * rho[i] * vol[j] * (us - ul) * dw
            drho[j] += 2.0 * rho[j] * vol[i] * (ur - us) * dw
        else:
            # velocity-jump form against the reflected wall state: the
            # hydrostatic pressure extension must not enter the continuity
            # diffusion or a resting tank pumps density at its walls
            f, s = (i, j) if fi else (j, i)
            nxw = normal[s, 0]
            nyw = normal[s, 1]
            ujump = (vel[f, 0] - vel[s, 0]) * nxw + (vel[f, 1] - vel[s, 1]) * nyw
            drho[f] += 2.0 * rho[f] * vol[s] * ujump * dw


def viscous_rates(ps, pair_i, pair_j, ell, cutoff, mu):
    """Viscous acceleration on fluid and viscous force on body particles."""
    acc = np.zeros((ps.n, 2))
    body_force = np.zeros((ps.n, 2))
    _viscous_sweep(pair_i, pair_j, ps.pos, ps.vel, ps.mass, ps.vol, ps.kind,
                   ell, cutoff, mu, acc, body_force)
    return acc, body_force


def momentum_rates(ps, pair_i, pair_j, corr, ell, cutoff, eos, gravity,
                   href=0.0):
    """Pressure acceleration on fluid and pressure force on body particles."""
    dvdt = np.zeros((ps.n, 2))
    body_force = np.zeros((ps.n, 2))
    _momentum_sweep(pair_i, pair_j, ps.pos, ps.vel, ps.rho, ps.p, ps.vol,
                    ps.mass, ps.kind, ps.normal, ps.solid_acc,
                    corr.bxx, corr.bxy, corr.byy, ell, cutoff,
                    eos.sound_speed, eos.rho0, gravity[0], gravity[1],
                    href, dvdt, body_force)
    return dvdt, body_force


def continuity_rates(ps, pair_i, pair_j, ell, cutoff, eos, gravity, href=0.0):
    drho = np.zeros(ps.n)
    _continuity_sweep(pair_i, pair_j, ps.pos, ps.vel, ps.rho, ps.vol, ps.kind,
                      ps.normal, ps.p, ell, cutoff, eos.sound_speed, eos.rho0,
                      gravity[0], gravity[1], href, drho)
    return drho


def effective_gravity(ps, gravity, rho0, href):
    """Per-particle gravity + the pointwise hydrostatic-background gradient.

    With the momentum operator acting on p - p_hydro(y), the body force
    becomes g (rho0/rho - 1) for submerged particles (exact identity), and
    plain g above the reference surface where p_hydro vanishes.
    """
    g = np.asarray(gravity, dtype=float)
    g_mag = float(np.hypot(g[0], g[1]))
    out = np.tile(g, (ps.n, 1))
    if g_mag > 0.0 and href != 0.0:
        below = ps.pos[:, 1] < href
        out[below, 1] += g_mag * rho0 / ps.rho[below]
    return out


def compute_rates(ps, pair_i, pair_j, corr, ell, cutoff, eos, nu, gravity,
                  href=0.0):
    """Full continuity and momentum right-hand sides at the current state.

    Combines the pressure, viscous, and gravity contributions the way one
    solver substep sees them; raises with the offending particle index if
    anything non-finite accumulates.
    """
    mu = eos.rho0 * nu
    dvdt, body_fp = momentum_rates(ps, pair_i, pair_j, corr, ell, cutoff, eos,
                                   gravity, href)
    visc, body_fv = viscous_rates(ps, pair_i, pair_j, ell, cutoff, mu)
    dvdt += visc
    fluid = ps.kind == FLUID
    dvdt[fluid] += effective_gravity(ps, gravity, eos.rho0, href)[fluid]
    drho = continuity_rates(ps, pair_i, pair_j, ell, cutoff, eos, gravity, href)
    for name, arr in (("dv/dt", dvdt), ("drho/dt", drho)):
        finite = np.isfinite(arr)
        if not finite.all():
            idx = int(np.argwhere(~finite.reshape(ps.n, -1).all(axis=1))[0][0])
            raise SimulationError(f"non-finite {name} for particle {idx}")
    return drho, dvdt, body_fp + body_fv
