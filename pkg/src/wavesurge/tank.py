"""Scenario builders: particle layouts for the validation and training tanks.

All layouts share one global lattice with spacing dp (fluid and solid
particles at cell centers), 4-layer dummy walls, and hydrostatic
initialization of the fluid density so the tank starts shock-free. Fluid
particles are stored first, which the solver relies on for contiguous
views.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import GRAVITY
from .body import FlapBody, FlapGeometry
from .boundary import DampingZone
from .particles import (BODY, FLUID, WALL, WAVEMAKER, ParticleSystem, block,
                        concatenate)
from .riemann import EosParams, eos_density
from .simulation import PistonWavemaker, Simulation
from .waves import WaveSpec, wavelength

WALL_LAYERS = 4


@dataclass
class Tank:
    """A built scenario: the solver plus the handles tests and tools need."""

    sim: Simulation
    dp: float
    depth: float
    length: float
    spec: WaveSpec | None = None
    probes: dict = field(default_factory=dict)
    flaps: list = field(default_factory=list)
    preset: str = ""


def _hydrostatic_fluid(x0, x1, depth, dp, eos, exclude=()):
    """Fluid block with hydrostatic density/pressure; `exclude` rectangles
    (x0, x1, y0, y1) carve out solid footprints."""
    nx = int(round((x1 - x0) / dp))
    ny = int(round(depth / dp))
    xs = x0 + (np.arange(nx) + 0.5) * dp
    ys = (np.arange(ny) + 0.5) * dp
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    keep = np.ones(X.shape, dtype=bool)
    for (ex0, ex1, ey0, ey1) in exclude:
        keep &= ~((X > ex0) & (X < ex1) & (Y > ey0) & (Y < ey1))
    x = X[keep].ravel()
    y = Y[keep].ravel()
    n = x.size
    ps = ParticleSystem.empty(n)
    ps.pos[:, 0] = x
    ps.pos[:, 1] = y
    surface = ny * dp
    p_hydro = eos.rho0 * GRAVITY * (surface - y)
    ps.rho[:] = eos_density(p_hydro, eos)
    ps.p[:] = p_hydro
    ps.mass[:] = ps.rho * dp * dp
    ps.vol[:] = dp * dp
    ps.kind[:] = FLUID
    return ps


def _set_hydrostatic_reference(ps, surface_y, dp, eos):
    """Hydrostatic density continuation for ALL particles (walls included).

    Dummy solid particles must carry the mass the fluid would have at their
    depth, otherwise the summation re-anchoring reads artificially low
    densities against every boundary.
    """
    head = np.clip(surface_y - ps.pos[:, 1], 0.0, None)
    rho = eos_density(eos.rho0 * GRAVITY * head, eos)
    ps.rho_init = rho
    ps.rho = rho.copy()
    ps.p = eos.rho0 * GRAVITY * head
    ps.mass = rho * dp * dp
    ps.vol = np.full(ps.n, dp * dp)


def _nearest_face_normals(pos, x0, x1, y0, y1, faces=("left", "right", "top", "bottom")):
    """Outward normal of the nearest exposed box face for each particle."""
    dists = []
    normals = []
    if "left" in faces:
        dists.append(pos[:, 0] - x0)
        normals.append((-1.0, 0.0))
    if "right" in faces:
        dists.append(x1 - pos[:, 0])
        normals.append((1.0, 0.0))
    if "top" in faces:
        dists.append(y1 - pos[:, 1])
        normals.append((0.0, 1.0))
    if "bottom" in faces:
        dists.append(pos[:, 1] - y0)
        normals.append((0.0, -1.0))
    dists = np.column_stack(dists)
    pick = np.argmin(dists, axis=1)
    return np.asarray(normals)[pick]


def _walls_for_tank(length, dp, wall_top, floor_x0, floor_x1,
                    left_at=None, right_at=None):
    """Floor plus optional vertical wall blocks, 4 dummy layers thick."""
    w = WALL_LAYERS * dp
    parts = []
    floor = block(floor_x0, floor_x1, -w, 0.0, dp, WALL, normal=(0.0, 1.0))
    parts.append(floor)
    if left_at is not None:
        left = block(left_at - w, left_at, 0.0, wall_top, dp, WALL, normal=(1.0, 0.0))
        parts.append(left)
    if right_at is not None:
        right = block(right_at, right_at + w, 0.0, wall_top, dp, WALL, normal=(-1.0, 0.0))
        parts.append(right)
    return parts


def _piston(dp, piston_top, spec):
    """Wavemaker column, rest face at x = 0, normal facing the fluid (+x)."""
    w = WALL_LAYERS * dp
    ps = block(-w, 0.0, 0.0, piston_top, dp, WAVEMAKER, normal=(1.0, 0.0))
    return ps


def build_still_tank(dp: float, length: float = 2.0, depth: float = 0.691) -> Tank:
    """Closed rectangular tank of still water (hydrostatic regression case)."""
    length = round(length / dp) * dp  # keep the lattice commensurate with the walls
    eos = EosParams.for_depth(depth)
    w = WALL_LAYERS * dp
    wall_top = depth + 0.3
    fluid = _hydrostatic_fluid(0.0, length, depth, dp, eos)
    parts = [fluid] + _walls_for_tank(length, dp, wall_top, -w, length + w,
                                      left_at=0.0, right_at=length)
    ps = concatenate(parts)
    _set_hydrostatic_reference(ps, round(depth / dp) * dp, dp, eos)
    margin = 6 * dp
    bounds = (-w - margin, -w - margin, length + w + margin, wall_top + 0.4)
    sim = Simulation(ps, eos, dp, bounds,
                     still_water_level=round(depth / dp) * dp)
    sim.equilibrate_pressure()
    return Tank(sim=sim, dp=dp, depth=round(depth / dp) * dp, length=length,
                probes={"mid": length / 2}, preset="still_water")


def build_dam_break(dp: float = 0.01, column_width: float = 0.5,
                    column_height: float = 0.5, length: float = 2.0) -> Tank:
    """Collapsing water column in an open box (qualitative smoke test)."""
    length = round(length / dp) * dp
    column_width = round(column_width / dp) * dp
    eos = EosParams.for_depth(column_height)
    w = WALL_LAYERS * dp
    wall_top = column_height + 0.2
    fluid = _hydrostatic_fluid(0.0, column_width, column_height, dp, eos)
    parts = [fluid] + _walls_for_tank(length, dp, wall_top, -w, length + w,
                                      left_at=0.0, right_at=length)
    ps = concatenate(parts)
    _set_hydrostatic_reference(ps, round(column_height / dp) * dp, dp, eos)
    margin = 6 * dp
    bounds = (-w - margin, -w - margin, length + w + margin, wall_top + 0.4)
    # violent free-surface flow: the hydrostatic-background reference only
    # applies to level-surface tanks, so it stays off here
    sim = Simulation(ps, eos, dp, bounds)
    return Tank(sim=sim, dp=dp, depth=column_height, length=length,
                preset="dam_break")


def build_wave_tank(dp: float, spec: WaveSpec, length: float = 15.0,
                    zone_length: float | None = None) -> Tank:
    """Wave-generation flume: piston at x=0, damping zone ahead of the far wall."""
    length = round(length / dp) * dp
    depth = spec.h_depth
    eos = EosParams.for_depth(depth)
    w = WALL_LAYERS * dp
    wall_top = depth + 0.35
    piston_top = wall_top
    stroke_margin = 0.45  # covers the piston amplitude for the design waves
    fluid = _hydrostatic_fluid(0.0, length, depth, dp, eos)
    piston = _piston(dp, piston_top, spec)
    parts = [fluid, piston] + _walls_for_tank(
        length, dp, wall_top, -w - stroke_margin, length + w, right_at=length)
    ps = concatenate(parts)
    _set_hydrostatic_reference(ps, round(depth / dp) * dp, dp, eos)
    n_f = fluid.n
    wavemaker = PistonWavemaker(spec, n_f, n_f + piston.n,
                                rest_x=ps.pos[n_f:n_f + piston.n, 0].copy())
    if zone_length is None:
        zone_length = wavelength(spec.period, depth)
    zone = DampingZone(length - zone_length, length)
    margin = 6 * dp
    bounds = (-w - stroke_margin - margin, -w - margin,
              length + w + margin, wall_top + 0.4)
    sim = Simulation(ps, eos, dp, bounds, wavemaker=wavemaker, damping_zone=zone,
                     still_water_level=round(depth / dp) * dp)
    sim.equilibrate_pressure()
    return Tank(sim=sim, dp=dp, depth=round(depth / dp) * dp, length=length,
                spec=spec, probes={"x4": 4.0, "near_maker": 0.2},
                preset="wave_generation")


def _flap_particles(dp, pivot, geometry: FlapGeometry, base_top: float):
    """Flap particle block on the global lattice, just above the base."""
    px = pivot[0]
    half_t = geometry.thickness / 2.0
    ncols = int(round(geometry.thickness / dp))
    nrows = int(round(geometry.height / dp))
    xs = px - half_t + (np.arange(ncols) + 0.5) * dp
    ys = base_top + (np.arange(nrows) + 0.5) * dp
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pos = np.column_stack([X.ravel(), Y.ravel()])
    normals = _nearest_face_normals(pos, px - half_t, px + half_t,
                                    base_top, base_top + geometry.height)
    n = pos.shape[0]
    ps = ParticleSystem.empty(n)
    ps.pos[:] = pos
    ps.rho[:] = 1000.0
    ps.mass[:] = 1000.0 * dp * dp
    ps.vol[:] = dp * dp
    ps.kind[:] = BODY
    ps.normal[:] = normals
    ref_offsets = pos - np.asarray(pivot)
    return ps, ref_offsets, normals


BASE_HALF_WIDTH = 0.09  # m, covers the swept bottom edge of the flap


def build_owsc_tank(dp: float, spec: WaveSpec, k_d: float = 20.0,
                    length: float = 18.4, flap_x: float = 7.92,
                    hinge_height: float = 0.16,
                    geometry: FlapGeometry | None = None,
                    dual_spacing: float | None = None, k_d2: float = 50.0,
                    zone_length: float | None = None) -> Tank:
    """Surge-converter tank: piston, one or two hinged flaps on base blocks,
    outlet damping zone."""
    length = round(length / dp) * dp
    depth = spec.h_depth
    eos = EosParams.for_depth(depth)
    w = WALL_LAYERS * dp
    wall_top = max(1.0, depth + 0.3)
    stroke_margin = 0.45
    base_top = round(hinge_height / dp) * dp

    pivots = [(flap_x, hinge_height)]
    kds = [k_d]
    if dual_spacing is not None:
        pivots.append((flap_x + dual_spacing, hinge_height))
        kds.append(k_d2)

    def geo_at(px, py):
        g = geometry or FlapGeometry(pivot=(px, py))
        if g.pivot != (px, py):
            g = FlapGeometry(pivot=(px, py), thickness=g.thickness, height=g.height,
                             width=g.width, mass=g.mass, inertia_hinge=g.inertia_hinge,
                             cm_distance=g.cm_distance)
        return g

    exclude = []
    for (px, py) in pivots:
        g = geo_at(px, py)
        exclude.append((px - BASE_HALF_WIDTH, px + BASE_HALF_WIDTH, -1.0, base_top))
        exclude.append((px - g.thickness / 2, px + g.thickness / 2,
                        base_top, base_top + g.height))

    fluid = _hydrostatic_fluid(0.0, length, depth, dp, eos, exclude=exclude)
    piston = _piston(dp, wall_top, spec)
    parts = [fluid, piston]
    walls = _walls_for_tank(length, dp, wall_top, -w - stroke_margin, length + w,
                            right_at=length)
    for (px, _) in pivots:
        base = block(px - BASE_HALF_WIDTH, px + BASE_HALF_WIDTH, 0.0, base_top,
                     dp, WALL)
        base.normal[:] = _nearest_face_normals(
            base.pos, px - BASE_HALF_WIDTH, px + BASE_HALF_WIDTH, 0.0, base_top,
            faces=("left", "right", "top"))
        walls.append(base)
    parts += walls

    flaps = []
    flap_parts = []
    for fid, ((px, py), kd_i) in enumerate(zip(pivots, kds)):
        geo = geo_at(px, py)
        body_ps, ref_off, ref_nrm = _flap_particles(dp, (px, py), geo, base_top)
        flap_parts.append((body_ps, ref_off, ref_nrm, geo, kd_i, fid))

    ps = concatenate([p for p in parts] + [fp[0] for fp in flap_parts])
    _set_hydrostatic_reference(ps, round(depth / dp) * dp, dp, eos)

    n_f = fluid.n
    wavemaker = PistonWavemaker(spec, n_f, n_f + piston.n,
                                rest_x=ps.pos[n_f:n_f + piston.n, 0].copy())
    offset = sum(p.n for p in parts)
    for (body_ps, ref_off, ref_nrm, geo, kd_i, fid) in flap_parts:
        flap = FlapBody(geo, offset, offset + body_ps.n, ref_off, ref_nrm,
                        k_d=kd_i, flap_id=fid)
        offset += body_ps.n
        flaps.append(flap)

    if zone_length is None:
        zone_length = wavelength(spec.period, depth)
    zone = DampingZone(length - zone_length, length)
    margin = 6 * dp
    bounds = (-w - stroke_margin - margin, -w - margin,
              length + w + margin, wall_top + 0.4)
    sim = Simulation(ps, eos, dp, bounds, wavemaker=wavemaker, flaps=flaps,
                     damping_zone=zone,
                     still_water_level=round(depth / dp) * dp)
    sim.equilibrate_pressure()
    probes = {"wp04": 3.99, "wp05": 7.02, "wp12": 8.82, "flap_front": 7.6}
    return Tank(sim=sim, dp=dp, depth=round(depth / dp) * dp, length=length,
                spec=spec, probes=probes, flaps=flaps,
                preset="owsc_dual" if dual_spacing is not None else "owsc")
