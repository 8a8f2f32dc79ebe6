"""Structure-of-arrays particle storage shared by all interactions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# particle kinds; fixed after initialization
FLUID = 0
WALL = 1
WAVEMAKER = 2
BODY = 3

KIND_NAMES = {FLUID: "fluid", WALL: "wall", WAVEMAKER: "wavemaker", BODY: "body"}


@dataclass
class ParticleSystem:
    """Per-particle state arrays (2D, quantities per unit width)."""

    pos: np.ndarray            # (n, 2) m
    vel: np.ndarray            # (n, 2) m/s
    rho: np.ndarray            # (n,) kg/m^3
    p: np.ndarray              # (n,) Pa
    mass: np.ndarray           # (n,) kg per unit width
    vol: np.ndarray            # (n,) m^2 per unit width (mass/rho)
    kind: np.ndarray           # (n,) uint8
    normal: np.ndarray         # (n, 2) outward normals for solid kinds, 0 for fluid
    solid_acc: np.ndarray      # (n, 2) lagged acceleration of body particles
    kernel_sum0: np.ndarray = field(default=None)  # (n,) initial kernel sums
    rho_init: np.ndarray = field(default=None)     # (n,) densities at build time

    @classmethod
    def empty(cls, n: int) -> "ParticleSystem":
        return cls(
            pos=np.zeros((n, 2)),
            vel=np.zeros((n, 2)),
            rho=np.full(n, 1000.0),
            p=np.zeros(n),
            mass=np.zeros(n),
            vol=np.zeros(n),
            kind=np.zeros(n, dtype=np.uint8),
            normal=np.zeros((n, 2)),
            solid_acc=np.zeros((n, 2)),
        )

    @property
    def n(self) -> int:
        return self.pos.shape[0]

    def indices_of(self, kind: int) -> np.ndarray:
        return np.flatnonzero(self.kind == kind)

    @property
    def fluid(self) -> np.ndarray:
        return self.indices_of(FLUID)

    def validate(self):
        if self.n == 0:
            return
        if not (self.rho > 0).all():
            raise ValueError(f"non-positive density at particle {int(np.argmin(self.rho))}")
        if not (self.mass > 0).all():
            raise ValueError(f"non-positive mass at particle {int(np.argmin(self.mass))}")
        if not np.allclose(self.vol, self.mass / self.rho, rtol=1e-12, atol=0.0):
            raise ValueError("volumes inconsistent with mass/rho")

    def refresh_volumes(self):
        np.divide(self.mass, self.rho, out=self.vol)

    def copy_state(self) -> dict:
        """Deep copy of the mutable arrays (solver snapshot)."""
        return {
            "pos": self.pos.copy(), "vel": self.vel.copy(), "rho": self.rho.copy(),
            "p": self.p.copy(), "vol": self.vol.copy(), "solid_acc": self.solid_acc.copy(),
            "normal": self.normal.copy(),
        }

    def restore_state(self, snap: dict):
        self.pos[:] = snap["pos"]
        self.vel[:] = snap["vel"]
        self.rho[:] = snap["rho"]
        self.p[:] = snap["p"]
        self.vol[:] = snap["vol"]
        self.solid_acc[:] = snap["solid_acc"]
        self.normal[:] = snap["normal"]


def concatenate(groups: list[ParticleSystem]) -> ParticleSystem:
    """Stack particle groups into one system (fluid first by convention)."""
    ks = None
    if all(g.kernel_sum0 is not None for g in groups):
        ks = np.concatenate([g.kernel_sum0 for g in groups])
    ri = np.concatenate([g.rho_init if g.rho_init is not None else g.rho
                         for g in groups])
    out = ParticleSystem(
        pos=np.concatenate([g.pos for g in groups]),
        vel=np.concatenate([g.vel for g in groups]),
        rho=np.concatenate([g.rho for g in groups]),
        p=np.concatenate([g.p for g in groups]),
        mass=np.concatenate([g.mass for g in groups]),
        vol=np.concatenate([g.vol for g in groups]),
        kind=np.concatenate([g.kind for g in groups]),
        normal=np.concatenate([g.normal for g in groups]),
        solid_acc=np.concatenate([g.solid_acc for g in groups]),
        kernel_sum0=ks,
        rho_init=ri,
    )
    return out


def block(x0, x1, y0, y1, dp, kind, rho0=1000.0, normal=(0.0, 0.0)) -> ParticleSystem:
    """Rectangular lattice of particles at spacing dp, cell-centered in [x0,x1]x[y0,y1]."""
    nx = max(0, int(round((x1 - x0) / dp)))
    ny = max(0, int(round((y1 - y0) / dp)))
    xs = x0 + (np.arange(nx) + 0.5) * dp
    ys = y0 + (np.arange(ny) + 0.5) * dp
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    n = X.size
    ps = ParticleSystem.empty(n)
    ps.pos[:, 0] = X.ravel()
    ps.pos[:, 1] = Y.ravel()
    ps.rho[:] = rho0
    ps.mass[:] = rho0 * dp * dp
    ps.vol[:] = dp * dp
    ps.kind[:] = kind
    ps.normal[:] = np.asarray(normal, dtype=float)
    return ps
