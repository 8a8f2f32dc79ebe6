"""Energy conversion metrics: harvested energy and capture width ratio."""

from __future__ import annotations

import math

import numpy as np

from . import GRAVITY
from .waves import WaveSpec, solve_dispersion, surface_amplitudes


def total_energy(times, k_d, omega, window=None) -> float:
    """Trapezoidal integral of k_d(t) Omega(t)^2 over the window, in joules."""
    t = np.asarray(times, dtype=float)
    power = np.asarray(k_d, dtype=float) * np.asarray(omega, dtype=float) ** 2
    if window is not None:
        lo, hi = window
        m = (t >= lo - 1e-12) & (t <= hi + 1e-12)
        t = t[m]
        power = power[m]
    if len(t) < 2:
        return 0.0
    return float(np.trapezoid(power, t))


def mean_pto_power(times, k_d, omega, window) -> float:
    lo, hi = window
    return total_energy(times, k_d, omega, window) / (hi - lo)


def incident_power_regular(height, period, h_depth, flap_width, rho0=1000.0) -> float:
    """Mean incident power of a unidirectional regular wave over the flap width:
    rho g H^2 B omega / (16 k) * (1 + 2kh/sinh 2kh)."""
    if height <= 0.0:
        raise ValueError("incident wave height must be positive")
    om = 2.0 * math.pi / period
    k = solve_dispersion(om, h_depth)
    kh = k * h_depth
    return (rho0 * GRAVITY * height**2 * flap_width * om / (16.0 * k)
            * (1.0 + 2.0 * kh / math.sinh(2.0 * kh)))


def incident_power_irregular(spec: WaveSpec, flap_width, rho0=1000.0) -> float:
    """Component-summed incident power for an irregular sea."""
    amps = surface_amplitudes(spec)
    total = 0.0
    for a, f, k in zip(amps, spec.frequencies, spec.wavenumbers):
        h_i = 2.0 * a
        om = 2.0 * math.pi * f
        kh = k * spec.h_depth
        total += (rho0 * GRAVITY * h_i**2 * flap_width * om / (16.0 * k)
                  * (1.0 + 2.0 * kh / math.sinh(2.0 * kh)))
    return total


def capture_width_ratio(times, k_d, omega, spec: WaveSpec, flap_width,
                        window) -> float:
    """PTO output power over incident wave power (Eq 42-style ratio)."""
    p_out = mean_pto_power(times, k_d, omega, window)
    if spec.kind == "irregular":
        p_0 = incident_power_irregular(spec, flap_width)
    else:
        p_0 = incident_power_regular(spec.height, spec.period, spec.h_depth,
                                     flap_width)
    return p_out / p_0
