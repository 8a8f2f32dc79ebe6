"""Wave probes: surface elevation by column scan and kernel-interpolated velocities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import w_value
from .particles import FLUID


def surface_elevation(sim, x: float) -> tuple[float, bool]:
    """Highest fluid particle in a column of width 2 dp around x, plus half a
    spacing for the particle's extent. Returns (elevation, column_empty)."""
    ps = sim.ps
    nf = sim.n_fluid
    col = np.abs(ps.pos[:nf, 0] - x) <= sim.dp
    if not col.any():
        return 0.0, True
    return float(ps.pos[:nf, 1][col].max() + 0.5 * sim.dp), False


def interpolate_velocity(sim, point) -> np.ndarray:
    """Shepard-normalized kernel interpolation of fluid velocity at a point.

    Returns zero where the point has no fluid support (above the surface,
    inside a body).
    """
    ps = sim.ps
    nf = sim.n_fluid
    d = ps.pos[:nf] - np.asarray(point, dtype=float)
    r2 = np.einsum("ij,ij->i", d, d)
    near = r2 < sim.cutoff * sim.cutoff
    if not near.any():
        return np.zeros(2)
    r = np.sqrt(r2[near])
    w = np.array([w_value(ri, sim.ell) for ri in r]) * ps.vol[:nf][near]
    wsum = w.sum()
    if wsum <= 0.0:
        return np.zeros(2)
    return (ps.vel[:nf][near] * w[:, None]).sum(axis=0) / wsum


@dataclass
class ProbeSeries:
    """Accumulated time series at fixed probe stations."""

    positions: dict                      # probe id -> x
    times: list = field(default_factory=list)
    elevations: dict = field(default_factory=dict)

    def __post_init__(self):
        for pid in self.positions:
            self.elevations.setdefault(pid, [])

    def sample(self, sim) -> None:
        self.times.append(sim.t)
        for pid, x in self.positions.items():
            eta, _ = surface_elevation(sim, x)
            self.elevations[pid].append(eta)

    def as_arrays(self, pid) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.times), np.asarray(self.elevations[pid])

    def write_csv(self, path) -> None:
        ids = list(self.positions)
        with open(path, "w") as fh:
            fh.write("t," + ",".join(ids) + "\n")
            for k, t in enumerate(self.times):
                vals = ",".join(f"{self.elevations[pid][k]:.17g}" for pid in ids)
                fh.write(f"{t:.17g},{vals}\n")


def amplitude_and_period(t: np.ndarray, eta: np.ndarray) -> tuple[float, float]:
    """Oscillation amplitude (mean peak-to-trough over crests) and mean
    zero-up-crossing period of an elevation record."""
    t = np.asarray(t, dtype=float)
    eta = np.asarray(eta, dtype=float)
    x = eta - eta.mean()
    up = np.flatnonzero((x[:-1] < 0) & (x[1:] >= 0))
    if len(up) < 2:
        return 0.5 * (eta.max() - eta.min()), float("nan")
    # interpolated crossing times
    tc = t[up] + (t[up + 1] - t[up]) * (-x[up]) / (x[up + 1] - x[up])
    period = float(np.diff(tc).mean())
    crests = []
    troughs = []
    for a, b in zip(up[:-1], up[1:]):
        seg = x[a:b + 1]
        crests.append(seg.max())
        troughs.append(seg.min())
    amp = 0.5 * (np.mean(crests) - np.mean(troughs))
    return float(amp), period
