"""Pure-Python kernels: scanline polygon fill and grid-accelerated nearest neighbor.

This module mirrors ``_speedups.pyx`` operation for operation; both must
produce identical results (the test suite asserts it). Keep the arithmetic
in the two files in lockstep when editing.
"""

from __future__ import annotations

import math

import numpy as np


def fill_grid(edges: np.ndarray, resolution: int, nonzero: bool) -> np.ndarray:
    """Rasterize closed contours given as edges in pixel space.

    ``edges`` is float64 (N, 4) rows ``(x1, y1, x2, y2)``; a pixel (row, col)
    has its center at ``(col + 0.5, row + 0.5)``. Horizontal edges are
    ignored; a half-open rule in y avoids double-counted vertices. Fill is
    nonzero-winding or even-odd at pixel centers.
    """
    r = int(resolution)
    out = np.zeros((r, r), dtype=np.uint8)
    e = [tuple(map(float, row)) for row in np.asarray(edges, dtype=np.float64)]
    n = len(e)
    for row in range(r):
        yc = row + 0.5
        xs: list[float] = []
        ws: list[int] = []
        for i in range(n):
            x1, y1, x2, y2 = e[i]
            if y1 == y2:
                continue
            if y1 < y2:
                ymin, ymax, w = y1, y2, 1
            else:
                ymin, ymax, w = y2, y1, -1
            if ymin <= yc < ymax:
                xs.append(x1 + (yc - y1) * (x2 - x1) / (y2 - y1))
                ws.append(w)
        if not xs:
            continue
        order = sorted(range(len(xs)), key=xs.__getitem__)
        acc = 0
        count = 0
        for pos in range(len(order) - 1):
            idx = order[pos]
            acc += ws[idx]
            count += 1
            inside = (acc != 0) if nonzero else (count % 2 == 1)
            if not inside:
                continue
            xa = xs[idx]
            xb = xs[order[pos + 1]]
            j0 = int(math.ceil(xa - 0.5))
            j1 = int(math.ceil(xb - 0.5))
            if j0 < 0:
                j0 = 0
            if j1 > r:
                j1 = r
            for j in range(j0, j1):
                out[row, j] = 1
    return out


def nn_mean_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Mean over points of ``a`` of the exact nearest-neighbor distance to ``b``.

    Nearest neighbors are found on a uniform grid over ``b`` with an expanding
    ring search; results equal brute force exactly.
    """
    pa = [tuple(map(float, p)) for p in np.asarray(a, dtype=np.float64)]
    pb = [tuple(map(float, p)) for p in np.asarray(b, dtype=np.float64)]
    n, m = len(pa), len(pb)
    if n == 0 or m == 0:
        raise ValueError("point clouds must be nonempty")

    bx0 = min(p[0] for p in pb)
    bx1 = max(p[0] for p in pb)
    by0 = min(p[1] for p in pb)
    by1 = max(p[1] for p in pb)
    ncells = int(math.sqrt(m))
    if ncells < 1:
        ncells = 1
    cw = (bx1 - bx0) / ncells
    ch = (by1 - by0) / ncells
    if cw <= 0.0:
        cw = 1.0
    if ch <= 0.0:
        ch = 1.0
    mincell = cw if cw < ch else ch

    def cell_of(x: float, lo: float, w: float) -> int:
        c = int((x - lo) / w)
        if c < 0:
            c = 0
        elif c >= ncells:
            c = ncells - 1
        return c

    counts = [0] * (ncells * ncells)
    for px, py in pb:
        counts[cell_of(px, bx0, cw) * ncells + cell_of(py, by0, ch)] += 1
    offsets = [0] * (ncells * ncells + 1)
    for i in range(ncells * ncells):
        offsets[i + 1] = offsets[i] + counts[i]
    fill = offsets[:-1].copy()
    indices = [0] * m
    for i, (px, py) in enumerate(pb):
        cell = cell_of(px, bx0, cw) * ncells + cell_of(py, by0, ch)
        indices[fill[cell]] = i
        fill[cell] += 1

    total = 0.0
    for qx, qy in pa:
        cx = cell_of(qx, bx0, cw)
        cy = cell_of(qy, by0, ch)
        best = math.inf
        max_ring = max(cx, ncells - 1 - cx, cy, ncells - 1 - cy)
        ring = 0
        while ring <= max_ring:
            if ring > 0 and best < math.inf:
                bound = (ring - 1) * mincell
                if bound * bound > best:
                    break
            ix0 = max(cx - ring, 0)
            ix1 = min(cx + ring, ncells - 1)
            iy0 = max(cy - ring, 0)
            iy1 = min(cy + ring, ncells - 1)
            for ix in range(ix0, ix1 + 1):
                on_x_edge = ix == cx - ring or ix == cx + ring
                for iy in range(iy0, iy1 + 1):
                    if not on_x_edge and iy != cy - ring and iy != cy + ring:
                        continue
                    cell = ix * ncells + iy
                    for k in range(offsets[cell], offsets[cell + 1]):
                        px, py = pb[indices[k]]
                        dx = px - qx
                        dy = py - qy
                        d2 = dx * dx + dy * dy
                        if d2 < best:
                            best = d2
            ring += 1
        total += math.sqrt(best)
    return total / n


def nn_mean_dist_bruteforce(a: np.ndarray, b: np.ndarray) -> float:
    """Exact O(n*m) reference used as the testing oracle for nn_mean_dist."""
    pa = np.asarray(a, dtype=np.float64)
    pb = np.asarray(b, dtype=np.float64)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("point clouds must be nonempty")
    total = 0.0
    for qx, qy in pa:
        best = math.inf
        for px, py in pb:
            dx = px - qx
            dy = py - qy
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
        total += math.sqrt(best)
    return total / len(pa)
