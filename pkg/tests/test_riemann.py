import numpy as np
import pytest

from wavesurge.riemann import (EosParams, corrected_p_star, eos_density,
                               eos_pressure, riemann_star)


def eq_p_star_oracle(left, right, b_i, b_j):
    """Independent scripted evaluation of the corrected pressure tensor."""
    rho_l, u_l, p_l, c_l = left
    rho_r, u_r, p_r, c_r = right
    zl, zr = rho_l * c_l, rho_r * c_r
    cbar = (zl + zr) / (rho_l + rho_r)
    beta = min(3.0 * max(u_l - u_r, 0.0) / cbar, 1.0)
    num = zl * p_r * np.asarray(b_i) + zr * p_l * np.asarray(b_j) \
        + zl * zr * beta * (u_l - u_r) * np.eye(2)
    return num / (zl + zr)


class TestEos:
    def setup_method(self):
        self.eos = EosParams.for_depth(0.691)

    def test_reference_density_gives_zero(self):
        assert eos_pressure(1000.0, self.eos) == 0.0

    def test_one_percent_compression(self):
        eos = EosParams(sound_speed=52.07, rho0=1000.0)
        assert eos_pressure(1010.0, eos) == pytest.approx(52.07**2 * 10.0)
        assert eos_pressure(1010.0, eos) == pytest.approx(2.711e4, rel=2e-3)

    def test_tension_permitted(self):
        assert eos_pressure(990.0, self.eos) < 0.0

    def test_sound_speed_rule(self):
        assert self.eos.v_max == pytest.approx(2.0 * np.sqrt(9.81 * 0.691))
        assert self.eos.sound_speed == pytest.approx(52.07, abs=0.01)

    def test_density_inverse(self):
        p = eos_pressure(1003.7, self.eos)
        assert eos_density(p, self.eos) == pytest.approx(1003.7)


class TestRiemannStar:
    def test_identical_states(self):
        s = (1000.0, 0.3, 55.0, 50.0)
        u, p, beta = riemann_star(s, s)
        assert u == pytest.approx(0.3)
        assert p == pytest.approx(55.0)
        assert beta == 0.0

    def test_separation_gives_weighted_average(self):
        left = (1000.0, -1.0, 10.0, 50.0)
        right = (1200.0, 1.0, 20.0, 45.0)
        u, p, beta = riemann_star(left, right)
        assert beta == 0.0
        zl, zr = 1000.0 * 50.0, 1200.0 * 45.0
        assert p == pytest.approx((zl * 20.0 + zr * 10.0) / (zl + zr))

    def test_hand_evaluated_compression(self):
        left = (1000.0, 1.0, 0.0, 50.0)
        right = (1000.0, 0.0, 0.0, 50.0)
        u, p, beta = riemann_star(left, right)
        assert u == pytest.approx(0.5)
        assert beta == pytest.approx(0.06)
        assert p == pytest.approx(1500.0)

    def test_limiter_range(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            left = (rng.uniform(900, 1100), rng.uniform(-5, 5),
                    rng.uniform(-1e4, 1e4), rng.uniform(10, 80))
            right = (rng.uniform(900, 1100), rng.uniform(-5, 5),
                     rng.uniform(-1e4, 1e4), rng.uniform(10, 80))
            _, _, beta = riemann_star(left, right)
            assert 0.0 <= beta <= 1.0

    def test_invalid_states(self):
        with pytest.raises(ValueError):
            riemann_star((0.0, 0, 0, 50.0), (1000.0, 0, 0, 50.0))
        with pytest.raises(ValueError):
            riemann_star((1000.0, 0, 0, -1.0), (1000.0, 0, 0, 50.0))


class TestCorrectedPStar:
    def test_identity_matrices_reduce_to_scalar(self):
        left = (1000.0, 0.7, 120.0, 50.0)
        right = (1030.0, -0.2, 90.0, 50.0)
        _, p_scalar, _ = riemann_star(left, right)
        tensor = corrected_p_star(left, right, np.eye(2), np.eye(2))
        assert np.allclose(tensor, p_scalar * np.eye(2), rtol=1e-12)

    def test_zero_pressure_dissipation_only(self):
        left = (1000.0, 1.5, 0.0, 50.0)
        right = (1000.0, -0.5, 0.0, 50.0)
        b_i = np.array([[1.3, 0.2], [0.2, 0.8]])
        b_j = np.array([[0.9, -0.1], [-0.1, 1.1]])
        t1 = corrected_p_star(left, right, b_i, b_j)
        t2 = corrected_p_star(left, right, np.eye(2), np.eye(2))
        assert np.allclose(t1, t2)
        assert t1[0, 1] == 0.0

    def test_random_states_match_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            left = (rng.uniform(950, 1050), rng.uniform(-3, 3),
                    rng.uniform(-5e3, 5e3), rng.uniform(20, 70))
            right = (rng.uniform(950, 1050), rng.uniform(-3, 3),
                     rng.uniform(-5e3, 5e3), rng.uniform(20, 70))
            b_i = rng.uniform(-1, 1, (2, 2))
            b_j = rng.uniform(-1, 1, (2, 2))
            ours = corrected_p_star(left, right, b_i, b_j)
            assert np.allclose(ours, eq_p_star_oracle(left, right, b_i, b_j),
                               rtol=1e-12, atol=1e-12)
