"""Piston wavemaker kinematics: regular, second-order Stokes, and irregular seas.

The piston amplitude for a linear target wave of height H comes from plane
wavemaker theory,

    amplitude = (H/2) * n0 / tanh(kh),   n0 = (1 + 2kh/sinh 2kh)/2,

which is identical to dividing the surface amplitude by the piston transfer
function 4 sinh^2(kh) / (2kh + sinh 2kh) used for the irregular components.
Irregular seas are a sum of N cosine components on the JONSWAP spectrum with
uniformly random phases; the first second of motion is ramped by sin(pi t/2)
to avoid an impulsive start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import GRAVITY

RAMP_TIME = 1.0  # s, irregular-wave start ramp
JONSWAP_GAMMA = 3.3


def solve_dispersion(omega: float, h_depth: float, tol: float = 1e-12,
                     max_iter: int = 200) -> float:
    """Positive root k of omega^2 = g k tanh(k h), by safeguarded Newton.

    Residual is driven below `tol` relative; failure to converge raises.
    """
    if not (omega > 0.0 and np.isfinite(omega)):
        raise ValueError("omega must be positive and finite")
    if not (h_depth > 0.0 and np.isfinite(h_depth)):
        raise ValueError("depth must be positive and finite")
    target = omega * omega
    # deep-water guess, then Newton with bisection fallback
    k = max(target / GRAVITY, 1e-12)
    lo, hi = 0.0, None
    for _ in range(max_iter):
        th = math.tanh(k * h_depth)
        f = GRAVITY * k * th - target
        if abs(f) <= tol * target:
            return k
        if f > 0.0:
            hi = k if hi is None else min(hi, k)
        else:
            lo = max(lo, k)
        df = GRAVITY * (th + k * h_depth * (1.0 - th * th))
        k_new = k - f / df
        if hi is not None and not (lo < k_new < hi):
            k_new = 0.5 * (lo + hi)
        elif k_new <= lo:
            k_new = 2.0 * k
        k = k_new
    raise RuntimeError(f"dispersion solve did not converge for omega={omega}, h={h_depth}")


def wavelength(period: float, h_depth: float) -> float:
    return 2.0 * math.pi / solve_dispersion(2.0 * math.pi / period, h_depth)


def piston_transfer(k: float, h_depth: float) -> float:
    """Surface amplitude per unit piston amplitude: 4 sinh^2(kh)/(2kh + sinh 2kh)."""
    kh = k * h_depth
    return 4.0 * math.sinh(kh) ** 2 / (2.0 * kh + math.sinh(2.0 * kh))


def jonswap_density(f: float, h_p: float, t_p: float,
                    gamma_j: float = JONSWAP_GAMMA):
    """JONSWAP spectral density S(f) in m^2 s.

    delta_J = 0.07 below the peak frequency and 0.09 above it; beta_J from
    the closed form in terms of gamma_J.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0.0):
        raise ValueError("frequency must be positive")
    beta_j = 0.0624 * (1.094 - 0.01915 * math.log(gamma_j)) / (
        0.230 + 0.0336 * gamma_j - 0.185 / (1.9 + gamma_j))
    delta = np.where(f <= 1.0 / t_p, 0.07, 0.09)
    peak_arg = np.exp(-((t_p * f - 1.0) ** 2) / (2.0 * delta * delta))
    s = (beta_j * h_p**2 * t_p**-4 * f**-5.0
         * np.exp(-1.25 * (t_p * f) ** -4.0) * gamma_j**peak_arg)
    return s if s.shape else float(s)


@dataclass(frozen=True)
class WaveSpec:
    """Regular or irregular wave definition driving the piston."""

    kind: str                       # "linear" | "stokes2" | "irregular"
    height: float                   # H (regular) or H_p (irregular), m
    period: float                   # T or T_p, s
    h_depth: float                  # m
    phase: float = 0.0              # rad, regular waves
    t_total: float = 40.0           # s, sets df = 1/t_total for irregular
    seed: int = 0
    ramp_time: float = RAMP_TIME
    # irregular component table (filled by build_irregular_components)
    amplitudes: np.ndarray = field(default=None, repr=False)
    frequencies: np.ndarray = field(default=None, repr=False)
    phases: np.ndarray = field(default=None, repr=False)
    wavenumbers: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("linear", "stokes2", "irregular"):
            raise ValueError(f"unknown wave kind {self.kind!r}")

    @property
    def wavenumber(self) -> float:
        return solve_dispersion(2.0 * math.pi / self.period, self.h_depth)

    @property
    def piston_amplitude(self) -> float:
        """First-order piston amplitude (H/2) n0 / tanh(kh)."""
        k = self.wavenumber
        kh = k * self.h_depth
        n0 = 0.5 * (1.0 + 2.0 * kh / math.sinh(2.0 * kh))
        return 0.5 * self.height * n0 / math.tanh(kh)


def make_wave_spec(kind, height, period, h_depth, phase=0.0, t_total=40.0,
                   seed=0) -> WaveSpec:
    """Build a WaveSpec, precomputing the component table for irregular seas."""
    spec = WaveSpec(kind=kind, height=height, period=period, h_depth=h_depth,
                    phase=phase, t_total=t_total, seed=seed)
    if kind == "irregular":
        amp, freq, psi, ks = build_irregular_components(height, period, h_depth,
                                                        t_total, seed)
        spec = WaveSpec(kind=kind, height=height, period=period, h_depth=h_depth,
                        phase=phase, t_total=t_total, seed=seed,
                        amplitudes=amp, frequencies=freq, phases=psi,
                        wavenumbers=ks)
    return spec


def build_irregular_components(h_p, t_p, h_depth, t_total, seed):
    """Piston component table for a JONSWAP sea.

    Components sit at f_n = n df, df = 1/t_total, up to 3 f_p. Piston
    amplitudes are sqrt(2 S(f) df) divided by the piston transfer at each
    component's wavenumber; phases are uniform in [0, 2 pi) from a seeded
    numpy PCG64 generator, so a given seed reproduces the sea exactly.
    """
    if t_total <= 0.0:
        raise ValueError("t_total must be positive")
    df = 1.0 / t_total
    f_peak = 1.0 / t_p
    n_comp = int(math.floor(3.0 * f_peak / df + 1e-9))
    freq = df * np.arange(1, n_comp + 1)
    s_surface = jonswap_density(freq, h_p, t_p)
    ks = np.array([solve_dispersion(2.0 * math.pi * f, h_depth) for f in freq])
    transfer = np.array([piston_transfer(k, h_depth) for k in ks])
    amp = np.sqrt(2.0 * s_surface * df) / transfer
    rng = np.random.Generator(np.random.PCG64(seed))
    psi = rng.uniform(0.0, 2.0 * math.pi, size=n_comp)
    return amp, freq, psi, ks


def surface_amplitudes(spec: WaveSpec) -> np.ndarray:
    """Free-surface component amplitudes sqrt(2 S df) (irregular spec only)."""
    if spec.kind != "irregular":
        raise ValueError("component amplitudes exist for irregular specs only")
    df = 1.0 / spec.t_total
    return np.sqrt(2.0 * jonswap_density(spec.frequencies, spec.height, spec.period) * df)


def piston_displacement(t: float, spec: WaveSpec) -> tuple[float, float]:
    """Piston displacement and its exact time derivative at time t."""
    if spec.kind == "linear":
        om = 2.0 * math.pi / spec.period
        a = spec.piston_amplitude
        return (a * math.sin(om * t + spec.phase),
                a * om * math.cos(om * t + spec.phase))
    if spec.kind == "stokes2":
        k = spec.wavenumber
        kh = k * spec.h_depth
        om = 2.0 * math.pi / spec.period
        n0 = 0.5 * (1.0 + 2.0 * kh / math.sinh(2.0 * kh))
        s0 = 0.5 * spec.height * n0 / math.tanh(kh)
        amp2 = s0 * 3.0 * spec.height / (
            4.0 * n0 * spec.h_depth * (4.0 * math.sinh(kh) ** 2 - 0.5 * n0))
        disp = -s0 * math.cos(om * t) - amp2 * math.sin(2.0 * om * t)
        velo = s0 * om * math.sin(om * t) - 2.0 * om * amp2 * math.cos(2.0 * om * t)
        return disp, velo
    # irregular: component sum, ramped over the first ramp_time seconds
    ph = 2.0 * math.pi * spec.frequencies * t + spec.phases
    disp = float(np.sum(spec.amplitudes * np.cos(ph)))
    velo = float(np.sum(-2.0 * math.pi * spec.frequencies * spec.amplitudes * np.sin(ph)))
    if t <= spec.ramp_time:
        w = math.pi * t / (2.0 * spec.ramp_time)
        ramp = math.sin(w)
        dramp = math.pi / (2.0 * spec.ramp_time) * math.cos(w)
        velo = ramp * velo + dramp * disp
        disp = ramp * disp
    return disp, velo


def export_components_csv(spec: WaveSpec, path) -> None:
    """Component table (n, f_n, E_n, psi_n, k_n) for reproducibility audits."""
    with open(path, "w") as fh:
        fh.write("n,f_n,E_n,psi_n,k_n\n")
        for n in range(len(spec.frequencies)):
            fh.write(f"{n + 1},{spec.frequencies[n]:.17g},{spec.amplitudes[n]:.17g},"
                     f"{spec.phases[n]:.17g},{spec.wavenumbers[n]:.17g}\n")
