import math

import numpy as np
import pytest

from wavesurge.metrics import (capture_width_ratio, incident_power_regular,
                               mean_pto_power, total_energy)
from wavesurge.probes import amplitude_and_period
from wavesurge.spectrum import band_energy_fraction, spectral_peak, spectrum_fft
from wavesurge.waves import make_wave_spec


class TestSpectrum:
    def test_sinusoid_parseval(self):
        t = np.arange(0, 40, 0.02)
        a = 0.07
        x = a * np.sin(2 * np.pi * 0.5 * t + 0.3)
        f, s = spectrum_fft(t, x)
        mass = np.sum(s) * (f[1] - f[0])
        assert mass == pytest.approx(a**2 / 2, rel=0.02)
        assert spectral_peak(f, s) == pytest.approx(0.5, abs=f[0])

    def test_zero_signal(self):
        t = np.arange(0, 10, 0.05)
        f, s = spectrum_fft(t, np.zeros_like(t))
        assert np.allclose(s, 0.0)

    def test_two_component_recovery(self):
        t = np.arange(0, 80, 0.02)
        x = 0.05 * np.cos(2 * np.pi * 0.4 * t) + 0.02 * np.cos(2 * np.pi * 0.9 * t)
        f, s = spectrum_fft(t, x)
        df = f[1] - f[0]
        i1 = np.argmin(np.abs(f - 0.4))
        i2 = np.argmin(np.abs(f - 0.9))
        a1 = math.sqrt(2 * s[i1] * df)
        a2 = math.sqrt(2 * s[i2] * df)
        assert a1 == pytest.approx(0.05, rel=0.05)
        assert a2 == pytest.approx(0.02, rel=0.05)

    def test_non_uniform_sampling_rejected(self):
        t = np.array([0.0, 0.1, 0.25, 0.3])
        with pytest.raises(ValueError):
            spectrum_fft(t, np.zeros(4))

    def test_hann_window_flag(self):
        t = np.arange(0, 40, 0.02)
        x = 0.1 * np.sin(2 * np.pi * 0.5 * t)
        f, s = spectrum_fft(t, x, hann=True)
        assert np.sum(s) * (f[1] - f[0]) == pytest.approx(0.005, rel=0.1)

    def test_band_energy(self):
        t = np.arange(0, 40, 0.02)
        x = np.sin(2 * np.pi * 0.5 * t)
        f, s = spectrum_fft(t, x)
        assert band_energy_fraction(f, s, 0.4, 0.6) > 0.99


class TestAmplitudePeriod:
    def test_pure_sine(self):
        t = np.arange(0, 20, 0.01)
        eta = 0.69 + 0.1 * np.sin(2 * np.pi * t / 2.0)
        amp, period = amplitude_and_period(t, eta)
        assert amp == pytest.approx(0.1, rel=1e-3)
        assert period == pytest.approx(2.0, rel=1e-3)

    def test_offset_and_harmonics(self):
        t = np.arange(0, 30, 0.005)
        eta = 0.5 + 0.08 * np.sin(2 * np.pi * t / 1.5) \
            + 0.01 * np.sin(4 * np.pi * t / 1.5 + 1.0)
        amp, period = amplitude_and_period(t, eta)
        assert period == pytest.approx(1.5, rel=0.01)
        assert amp == pytest.approx(0.08, rel=0.1)


class TestEnergyMetrics:
    def test_zero_omega_zero_energy(self):
        t = np.linspace(0, 10, 101)
        assert total_energy(t, np.full(101, 45.0), np.zeros(101)) == 0.0

    def test_constant_power_integral(self):
        t = np.linspace(0, 10, 1001)
        e = total_energy(t, np.full(1001, 45.0), np.full(1001, 0.1))
        assert e == pytest.approx(45.0 * 0.01 * 10.0, rel=1e-12)

    def test_window_additivity(self):
        rng = np.random.default_rng(1)
        t = np.linspace(0, 10, 501)
        kd = rng.uniform(10, 90, 501)
        om = rng.normal(scale=0.2, size=501)
        e_total = total_energy(t, kd, om, window=(2.0, 8.0))
        e1 = total_energy(t, kd, om, window=(2.0, 5.0))
        e2 = total_energy(t, kd, om, window=(5.0, 8.0))
        assert e_total == pytest.approx(e1 + e2, rel=1e-12)

    def test_incident_power_reference_value(self):
        # independent: rho g H^2 B omega/(16 k)(1 + 2kh/sinh 2kh) with
        # bisected k = 1.3654 gives 93.03 W for the design wave
        p0 = incident_power_regular(0.2, 2.0, 0.691, 1.04)
        assert p0 == pytest.approx(93.03, abs=0.05)

    def test_zero_height_rejected(self):
        with pytest.raises(ValueError):
            incident_power_regular(0.0, 2.0, 0.691, 1.04)

    def test_cwr_of_synthetic_log(self):
        spec = make_wave_spec("linear", 0.2, 2.0, 0.691)
        t = np.linspace(0, 20, 2001)
        om = 0.12 * np.sin(2 * np.pi * t / 2.0)
        kd = np.full_like(t, 45.0)
        cwr = capture_width_ratio(t, kd, om, spec, 1.04, window=(4.0, 20.0))
        p_out = mean_pto_power(t, kd, om, (4.0, 20.0))
        assert cwr == pytest.approx(p_out / 93.03, rel=1e-3)

    def test_cwr_window_shift_invariance(self):
        spec = make_wave_spec("linear", 0.2, 2.0, 0.691)
        t = np.linspace(0, 30, 6001)
        om = 0.12 * np.sin(2 * np.pi * t / 2.0) + 0.01 * np.sin(2 * np.pi * t / 1.0)
        kd = np.full_like(t, 45.0)
        c1 = capture_width_ratio(t, kd, om, spec, 1.04, window=(4.0, 24.0))
        c2 = capture_width_ratio(t, kd, om, spec, 1.04, window=(6.0, 26.0))
        assert abs(c1 - c2) / c1 < 0.01
