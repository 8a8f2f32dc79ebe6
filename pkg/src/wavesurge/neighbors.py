"""Uniform-grid cell lists and pair enumeration for particle interactions.

The grid covers a fixed bounding box with square cells of edge >= the search
radius, so a 3x3 cell scan around a particle covers every candidate within
that radius. Pair enumeration is half (each unordered pair appears once,
i < j) and deterministic: particles are binned with a counting sort that
preserves index order, and pairs are emitted in ascending (i, then scan
order) sequence, so serial accumulation over the list is bit-reproducible.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _bin_particles(pos, xmin, ymin, inv_cell, nx, ny):
    n = pos.shape[0]
    cell_of = np.empty(n, dtype=np.int64)
    ncells = nx * ny
    counts = np.zeros(ncells, dtype=np.int64)
    for i in range(n):
        cx = int((pos[i, 0] - xmin) * inv_cell)
        cy = int((pos[i, 1] - ymin) * inv_cell)
        if cx < 0:
            cx = 0
        elif cx >= nx:
            cx = nx - 1
        if cy < 0:
            cy = 0
        elif cy >= ny:
            cy = ny - 1
        c = cx * ny + cy
        cell_of[i] = c
        counts[c] += 1
    start = np.empty(ncells + 1, dtype=np.int64)
    start[0] = 0
    for c in range(ncells):
        start[c + 1] = start[c] + counts[c]
    fill = start[:ncells].copy()
    order = np.empty(n, dtype=np.int64)
    for i in range(n):  # ascending i keeps each bucket index-sorted
        c = cell_of[i]
        order[fill[c]] = i
        fill[c] += 1
    return cell_of, start, order


@numba.njit(cache=True)
def _count_and_fill_pairs(pos, cell_of, start, order, nx, ny, radius):
    n = pos.shape[0]
    r2max = radius * radius
    # pass 1: count pairs per i
    row = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        c = cell_of[i]
        cx = c // ny
        cy = c - cx * ny
        cnt = 0
        for dx in range(-1, 2):
            gx = cx + dx
            if gx < 0 or gx >= nx:
                continue
            for dy in range(-1, 2):
                gy = cy + dy
                if gy < 0 or gy >= ny:
                    continue
                g = gx * ny + gy
                for s in range(start[g], start[g + 1]):
                    j = order[s]
                    if j <= i:
                        continue
                    ddx = pos[i, 0] - pos[j, 0]
                    ddy = pos[i, 1] - pos[j, 1]
                    if ddx * ddx + ddy * ddy < r2max:
                        cnt += 1
        row[i + 1] = cnt
    for i in range(n):
        row[i + 1] += row[i]
    npairs = row[n]
    pi = np.empty(npairs, dtype=np.int64)
    pj = np.empty(npairs, dtype=np.int64)
    # pass 2: fill in the same deterministic order
    for i in range(n):
        k = row[i]
        c = cell_of[i]
        cx = c // ny
        cy = c - cx * ny
        for dx in range(-1, 2):
            gx = cx + dx
            if gx < 0 or gx >= nx:
                continue
            for dy in range(-1, 2):
                gy = cy + dy
                if gy < 0 or gy >= ny:
                    continue
                g = gx * ny + gy
                for s in range(start[g], start[g + 1]):
                    j = order[s]
                    if j <= i:
                        continue
                    ddx = pos[i, 0] - pos[j, 0]
                    ddy = pos[i, 1] - pos[j, 1]
                    if ddx * ddx + ddy * ddy < r2max:
                        pi[k] = i
                        pj[k] = j
                        k += 1
    return row, pi, pj


class NeighborGrid:
    """Cell list over a fixed box; enumerates unordered pairs within `radius`."""

    def __init__(self, positions: np.ndarray, radius: float, bounds=None):
        if positions.size and not np.isfinite(positions).all():
            bad = int(np.argwhere(~np.isfinite(positions).all(axis=1))[0][0])
            raise ValueError(f"non-finite position for particle {bad}")
        self.radius = float(radius)
        pos = np.ascontiguousarray(positions, dtype=np.float64)
        if bounds is None:
            if pos.size:
                xmin, ymin = pos.min(axis=0)
                xmax, ymax = pos.max(axis=0)
            else:
                xmin = ymin = 0.0
                xmax = ymax = 1.0
        else:
            xmin, ymin, xmax, ymax = bounds
        self.xmin, self.ymin = float(xmin), float(ymin)
        self.nx = max(1, int(np.ceil((xmax - xmin) / self.radius)))
        self.ny = max(1, int(np.ceil((ymax - ymin) / self.radius)))
        self._pos = pos
        if pos.size:
            self.cell_of, self.cell_start, self.order = _bin_particles(
                pos, self.xmin, self.ymin, 1.0 / self.radius, self.nx, self.ny
            )
        else:
            self.cell_of = np.zeros(0, dtype=np.int64)
            self.cell_start = np.zeros(self.nx * self.ny + 1, dtype=np.int64)
            self.order = np.zeros(0, dtype=np.int64)
        self._pairs = None

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Unordered pair arrays (i, j) with i < j and |r_ij| < radius."""
        if self._pairs is None:
            if self._pos.size:
                _, pi, pj = _count_and_fill_pairs(
                    self._pos, self.cell_of, self.cell_start, self.order,
                    self.nx, self.ny, self.radius,
                )
            else:
                pi = np.zeros(0, dtype=np.int64)
                pj = np.zeros(0, dtype=np.int64)
            self._pairs = (pi, pj)
        return self._pairs


def build_neighbor_grid(positions: np.ndarray, cutoff: float, bounds=None) -> NeighborGrid:
    """Grid with cell size equal to the search cutoff (3x3 scan covers it)."""
    return NeighborGrid(positions, cutoff, bounds=bounds)


def brute_force_pairs(positions: np.ndarray, cutoff: float) -> set[tuple[int, int]]:
    """O(N^2) oracle: the set of unordered index pairs closer than cutoff."""
    n = len(positions)
    out = set()
    for i in range(n):
        d = positions[i + 1:] - positions[i]
        close = np.flatnonzero(np.einsum("ij,ij->i", d, d) < cutoff * cutoff)
        for j in close:
            out.add((i, i + 1 + int(j)))
    return out
