import math

import numpy as np
import pytest

from wavesurge.correction import CorrectionTensor, correction_matrices
from wavesurge.fluid import (SimulationError, compute_rates, ideal_kernel_sum,
                             kernel_sums, reinitialize_density, time_step_sizes)
from wavesurge.kernels import kernel_eval
from wavesurge.neighbors import build_neighbor_grid
from wavesurge.particles import FLUID, ParticleSystem, block
from wavesurge.riemann import EosParams, eos_density

DP = 0.05
ELL = 1.3 * DP
CUTOFF = 2 * ELL
G = np.array([0.0, -9.81])


def make_block(nx=11, ny=11, rho0=1000.0):
    ps = block(0, nx * DP, 0, ny * DP, DP, FLUID, rho0=rho0)
    ps.kernel_sum0 = None
    return ps


def rates_for(ps, correction=True, href=0.0):
    pi, pj = build_neighbor_grid(ps.pos, CUTOFF).pairs()
    if correction:
        corr = correction_matrices(ps.pos, ps.vol, pi, pj, ELL, CUTOFF)
    else:
        corr = CorrectionTensor(ps.n)
    eos = EosParams(sound_speed=52.07, rho0=1000.0)
    return compute_rates(ps, pi, pj, corr, ELL, CUTOFF, eos, 1e-6, G, href=href)


class TestRates:
    def test_isolated_particle_free_falls(self):
        ps = make_block(1, 1)
        drho, dvdt, bf = rates_for(ps)
        assert drho[0] == 0.0
        assert np.allclose(dvdt[0], G)

    def test_still_uniform_fluid_in_gravity_balance(self):
        # uniform density, linear hydrostatic pressure, full interior support:
        # the corrected operator balances gravity to near machine precision
        ps = make_block(13, 13)
        h = 13 * DP
        ps.p[:] = 1000.0 * 9.81 * (h - ps.pos[:, 1])
        drho, dvdt, bf = rates_for(ps)
        center = int(np.argmin(np.einsum("ij,ij->i",
                                         ps.pos - [6.5 * DP, 6.5 * DP],
                                         ps.pos - [6.5 * DP, 6.5 * DP])))
        assert np.abs(dvdt[center]).max() < 1e-6 * 9.81
        assert abs(drho[center]) < 1e-6 * 1000.0

    def test_three_particle_colinear_matches_hand_sum(self):
        # oracle: direct evaluation of the continuity/momentum sums
        ps = ParticleSystem.empty(3)
        ps.pos[:, 0] = [0.0, DP, 2 * DP]
        ps.vel[:, 0] = [0.2, 0.0, -0.1]
        ps.rho[:] = [1000.0, 1005.0, 998.0]
        ps.mass[:] = ps.rho * DP * DP
        ps.vol[:] = DP * DP
        c = 52.07
        ps.p[:] = c * c * (ps.rho - 1000.0)
        drho, dvdt, bf = rates_for(ps, correction=False)

        def riemann(li, lj):
            d = ps.pos[li] - ps.pos[lj]
            r = np.hypot(*d)
            e = d / r
            ul = -ps.vel[li] @ e
            ur = -ps.vel[lj] @ e
            zl, zr = ps.rho[li] * c, ps.rho[lj] * c
            beta = min(3 * max(ul - ur, 0.0) / (
                (zl + zr) / (ps.rho[li] + ps.rho[lj])), 1.0)
            us = (zl * ul + zr * ur + ps.p[li] - ps.p[lj]) / (zl + zr)
            pstar = (zl * ps.p[lj] + zr * ps.p[li]
                     + zl * zr * beta * (ul - ur)) / (zl + zr)
            return r, e, ul, ur, us, pstar

        i = 1  # middle particle interacts with both ends
        mu = 1000.0 * 1e-6
        exp_drho = 0.0
        exp_dv = np.zeros(2)
        for j in (0, 2):
            r, e, ul, ur, us, pstar = riemann(i, j)
            dw = kernel_eval(r, ELL)[1]
            exp_drho += 2 * ps.rho[i] * ps.vol[j] * (us - ul) * dw
            exp_dv += (-2 * ps.vol[i] * ps.vol[j] * pstar * dw / ps.mass[i]) * e
            exp_dv += (2 * mu * ps.vol[i] * ps.vol[j] * dw / (r * ps.mass[i])
                       * (ps.vel[i] - ps.vel[j]))
        exp_dv[1] += G[1]
        assert drho[i] == pytest.approx(exp_drho, rel=1e-10)
        assert dvdt[i][0] == pytest.approx(exp_dv[0], rel=1e-10)
        assert dvdt[i][1] == pytest.approx(exp_dv[1], rel=1e-10)

    def test_momentum_conservation_with_gravity(self):
        # pairwise antisymmetry: total momentum changes only by gravity
        rng = np.random.default_rng(3)
        ps = make_block(9, 9)
        ps.vel[:] = rng.normal(scale=0.05, size=ps.vel.shape)
        ps.rho[:] = 1000.0 * (1 + rng.uniform(-0.005, 0.005, ps.n))
        ps.mass[:] = 1000.0 * DP * DP
        ps.vol[:] = ps.mass / ps.rho
        c = 52.07
        ps.p[:] = c * c * (ps.rho - 1000.0)
        drho, dvdt, bf = rates_for(ps, correction=False)
        total = (ps.mass[:, None] * dvdt).sum(axis=0)
        expected = ps.mass.sum() * G
        assert np.abs(total - expected).max() < 1e-6 * abs(expected[1])

    def test_non_finite_rate_reports_particle(self):
        ps = make_block(3, 3)
        ps.p[4] = np.inf
        with pytest.raises(SimulationError, match=r"particle \d+"):
            rates_for(ps)


class TestDensityReinit:
    def make(self, nx=11, ny=11):
        ps = make_block(nx, ny)
        pi, pj = build_neighbor_grid(ps.pos, CUTOFF).pairs()
        ps.kernel_sum0 = kernel_sums(pi, pj, ps.pos, ELL, CUTOFF)
        ps.rho_init = ps.rho.copy()
        return ps, pi, pj

    def test_undisturbed_interior_unchanged(self):
        ps, pi, pj = self.make()
        rho_before = ps.rho.copy()
        reinitialize_density(ps, pi, pj, ELL, CUTOFF,
                             ideal_kernel_sum(DP, ELL), DP)
        assert np.allclose(ps.rho, rho_before, rtol=1e-12)

    def test_free_surface_keeps_reference_density(self):
        # top-row particle has deficient support; rho* = rho0 is kept
        ps, pi, pj = self.make()
        top = int(np.argmax(ps.pos[:, 1] + 1e-6 * ps.pos[:, 0]))
        reinitialize_density(ps, pi, pj, ELL, CUTOFF,
                             ideal_kernel_sum(DP, ELL), DP)
        assert ps.rho[top] == pytest.approx(1000.0, rel=1e-12)

    def test_compressed_cluster_rises_by_kernel_sum_ratio(self):
        ps, pi, pj = self.make()
        center = int(np.argmin(np.einsum("ij,ij->i",
                                         ps.pos - [5.5 * DP, 5.5 * DP],
                                         ps.pos - [5.5 * DP, 5.5 * DP])))
        # move neighbors 10% closer to the center particle
        d = ps.pos - ps.pos[center]
        r = np.hypot(d[:, 0], d[:, 1])
        near = (r > 0) & (r < CUTOFF)
        ps.pos[near] = ps.pos[center] + 0.9 * d[near]
        pi2, pj2 = build_neighbor_grid(ps.pos, CUTOFF).pairs()
        # oracle: direct kernel summation before/after
        def ksum(idx, pos):
            s = kernel_eval(0.0, ELL)[0]
            for j in range(ps.n):
                if j == idx:
                    continue
                rr = np.hypot(*(pos[idx] - pos[j]))
                if rr < CUTOFF:
                    s += kernel_eval(rr, ELL)[0]
            return s
        ratio = ksum(center, ps.pos) / ps.kernel_sum0[center]
        assert ratio > 1.02
        reinitialize_density(ps, pi2, pj2, ELL, CUTOFF,
                             ideal_kernel_sum(DP, ELL), DP)
        assert ps.rho[center] == pytest.approx(1000.0 * ratio, rel=1e-10)

    def test_missing_initial_sums_is_hard_failure(self):
        ps, pi, pj = self.make()
        ps.kernel_sum0 = np.zeros(ps.n)
        with pytest.raises(SimulationError):
            reinitialize_density(ps, pi, pj, ELL, CUTOFF,
                                 ideal_kernel_sum(DP, ELL), DP)


class TestTimeStepSizes:
    def test_reference_acoustic_step(self):
        ell = 1.3 * 0.015
        vel = np.zeros((10, 2))
        s = time_step_sizes(vel, 52.07, ell, 1e-6)
        assert s.dt_acoustic == pytest.approx(2.25e-4, rel=0.01)
        assert s.dt_acoustic == pytest.approx(0.6 * ell / 52.07)

    def test_velocity_monotonicity(self):
        ell = 1.3 * 0.015
        v1 = np.full((5, 2), 1.0)
        v2 = np.full((5, 2), 2.0)
        s1 = time_step_sizes(v1, 52.07, ell, 1e-6)
        s2 = time_step_sizes(v2, 52.07, ell, 1e-6)
        assert s2.dt_acoustic < s1.dt_acoustic
        assert s2.dt_advection < s1.dt_advection

    def test_viscous_bound_governs_large_nu(self):
        ell = 0.01
        vel = np.full((5, 2), 0.001)
        s = time_step_sizes(vel, 50.0, ell, nu=1.0)
        assert s.dt_advection == pytest.approx(0.25 * ell * ell / 1.0)

    def test_zero_velocity_handled_by_viscous_bound(self):
        s = time_step_sizes(np.zeros((4, 2)), 50.0, 0.02, 1e-6)
        assert np.isfinite(s.dt_advection)
        assert s.substeps >= 1
        assert s.dt_acoustic <= s.dt_advection
