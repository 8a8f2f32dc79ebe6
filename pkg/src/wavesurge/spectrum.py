"""One-sided spectral density of uniformly sampled records."""

from __future__ import annotations

import numpy as np


def spectrum_fft(times, values, hann: bool = False):
    """Periodogram scaled so that sum S(f) df equals the series variance.

    Requires uniform sampling. The optional Hann window trades leakage for
    bias; it is off by default so narrow-band comparisons stay sharp.
    Returns (frequencies, spectral density).
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(values, dtype=float)
    if len(t) != len(x) or len(t) < 4:
        raise ValueError("need equally long time/value arrays with >= 4 samples")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-12):
        raise ValueError("spectrum requires uniform sampling")
    dt = float(dt[0])
    n = len(x)
    x = x - x.mean()
    if hann:
        w = np.hanning(n)
        # scale preserves variance of a stationary signal
        x = x * w / np.sqrt((w * w).mean())
    X = np.fft.rfft(x)
    df = 1.0 / (n * dt)
    power = (np.abs(X) ** 2) / n**2
    scale = np.full(len(power), 2.0)
    scale[0] = 1.0
    if n % 2 == 0:
        scale[-1] = 1.0
    s = scale * power / df
    freqs = np.fft.rfftfreq(n, dt)
    return freqs[1:], s[1:]


def spectral_peak(freqs, s) -> float:
    return float(freqs[int(np.argmax(s))])


def band_energy_fraction(freqs, s, f_lo, f_hi) -> float:
    """Fraction of integrated spectral mass inside [f_lo, f_hi]."""
    s = np.asarray(s)
    band = (freqs >= f_lo) & (freqs <= f_hi)
    total = s.sum()
    return float(s[band].sum() / total) if total > 0 else 0.0
