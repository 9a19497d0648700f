# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: scanline polygon fill and grid-accelerated nearest neighbor.

Mirror of ``_kernels_py.py``; both implementations must produce identical
results. Keep the arithmetic in the two files in lockstep when editing.
"""

import numpy as np

from libc.math cimport INFINITY, ceil, sqrt


def fill_grid(double[:, ::1] edges, int resolution, bint nonzero):
    """Rasterize closed contours given as pixel-space edges (x1, y1, x2, y2)."""
    cdef int r = resolution
    out_arr = np.zeros((r, r), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t n = edges.shape[0]

    xs_arr = np.empty(n, dtype=np.float64)
    ws_arr = np.empty(n, dtype=np.int32)
    order_arr = np.empty(n, dtype=np.intp)
    cdef double[::1] xs = xs_arr
    cdef int[::1] ws = ws_arr
    cdef Py_ssize_t[::1] order = order_arr

    cdef int row, w, acc, count, j, j0, j1
    cdef Py_ssize_t i, pos, nc, key_idx, hole
    cdef double yc, x1, y1, x2, y2, ymin, ymax, xa, xb, key

    for row in range(r):
        yc = row + 0.5
        nc = 0
        for i in range(n):
            x1 = edges[i, 0]
            y1 = edges[i, 1]
            x2 = edges[i, 2]
            y2 = edges[i, 3]
            if y1 == y2:
                continue
            if y1 < y2:
                ymin = y1
                ymax = y2
                w = 1
            else:
                ymin = y2
                ymax = y1
                w = -1
            if ymin <= yc < ymax:
                xs[nc] = x1 + (yc - y1) * (x2 - x1) / (y2 - y1)
                ws[nc] = w
                nc += 1
        if nc == 0:
            continue
        # stable insertion sort of indices by crossing x
        for i in range(nc):
            order[i] = i
        for i in range(1, nc):
            key_idx = order[i]
            key = xs[key_idx]
            hole = i
            while hole > 0 and xs[order[hole - 1]] > key:
                order[hole] = order[hole - 1]
                hole -= 1
            order[hole] = key_idx
        acc = 0
        count = 0
        for pos in range(nc - 1):
            acc += ws[order[pos]]
            count += 1
            if nonzero:
                if acc == 0:
                    continue
            else:
                if count % 2 == 0:
                    continue
            xa = xs[order[pos]]
            xb = xs[order[pos + 1]]
            j0 = <int> ceil(xa - 0.5)
            j1 = <int> ceil(xb - 0.5)
            if j0 < 0:
                j0 = 0
            if j1 > r:
                j1 = r
            for j in range(j0, j1):
                out[row, j] = 1
    return out_arr


cdef inline Py_ssize_t _cell_of(double x, double lo, double w, Py_ssize_t ncells):
    cdef Py_ssize_t c = <Py_ssize_t> ((x - lo) / w)
    if c < 0:
        c = 0
    elif c >= ncells:
        c = ncells - 1
    return c


def nn_mean_dist(double[:, ::1] a, double[:, ::1] b):
    """Mean exact nearest-neighbor distance from each point of a to cloud b."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        raise ValueError("point clouds must be nonempty")

    cdef double bx0 = b[0, 0], bx1 = b[0, 0], by0 = b[0, 1], by1 = b[0, 1]
    cdef Py_ssize_t i
    for i in range(1, m):
        if b[i, 0] < bx0:
            bx0 = b[i, 0]
        if b[i, 0] > bx1:
            bx1 = b[i, 0]
        if b[i, 1] < by0:
            by0 = b[i, 1]
        if b[i, 1] > by1:
            by1 = b[i, 1]

    cdef Py_ssize_t ncells = <Py_ssize_t> sqrt(<double> m)
    if ncells < 1:
        ncells = 1
    cdef double cw = (bx1 - bx0) / ncells
    cdef double ch = (by1 - by0) / ncells
    if cw <= 0.0:
        cw = 1.0
    if ch <= 0.0:
        ch = 1.0
    cdef double mincell = cw if cw < ch else ch

    counts_arr = np.zeros(ncells * ncells, dtype=np.intp)
    offsets_arr = np.zeros(ncells * ncells + 1, dtype=np.intp)
    fill_arr = np.zeros(ncells * ncells, dtype=np.intp)
    indices_arr = np.zeros(m, dtype=np.intp)
    cdef Py_ssize_t[::1] counts = counts_arr
    cdef Py_ssize_t[::1] offsets = offsets_arr
    cdef Py_ssize_t[::1] fill = fill_arr
    cdef Py_ssize_t[::1] indices = indices_arr

    cdef Py_ssize_t cell
    for i in range(m):
        cell = _cell_of(b[i, 0], bx0, cw, ncells) * ncells + _cell_of(b[i, 1], by0, ch, ncells)
        counts[cell] += 1
    for i in range(ncells * ncells):
        offsets[i + 1] = offsets[i] + counts[i]
        fill[i] = offsets[i]
    for i in range(m):
        cell = _cell_of(b[i, 0], bx0, cw, ncells) * ncells + _cell_of(b[i, 1], by0, ch, ncells)
        indices[fill[cell]] = i
        fill[cell] += 1

    cdef double total = 0.0
    cdef double qx, qy, best, bound, dx, dy, d2, px, py
    cdef Py_ssize_t cx, cy, max_ring, ring, ix0, ix1, iy0, iy1, ix, iy, k, q
    cdef bint on_x_edge
    for q in range(n):
        qx = a[q, 0]
        qy = a[q, 1]
        cx = _cell_of(qx, bx0, cw, ncells)
        cy = _cell_of(qy, by0, ch, ncells)
        best = INFINITY
        max_ring = cx
        if ncells - 1 - cx > max_ring:
            max_ring = ncells - 1 - cx
        if cy > max_ring:
            max_ring = cy
        if ncells - 1 - cy > max_ring:
            max_ring = ncells - 1 - cy
        ring = 0
        while ring <= max_ring:
            if ring > 0 and best < INFINITY:
                bound = (ring - 1) * mincell
                if bound * bound > best:
                    break
            ix0 = cx - ring
            if ix0 < 0:
                ix0 = 0
            ix1 = cx + ring
            if ix1 > ncells - 1:
                ix1 = ncells - 1
            iy0 = cy - ring
            if iy0 < 0:
                iy0 = 0
            iy1 = cy + ring
            if iy1 > ncells - 1:
                iy1 = ncells - 1
            for ix in range(ix0, ix1 + 1):
                on_x_edge = ix == cx - ring or ix == cx + ring
                for iy in range(iy0, iy1 + 1):
                    if not on_x_edge and iy != cy - ring and iy != cy + ring:
                        continue
                    cell = ix * ncells + iy
                    for k in range(offsets[cell], offsets[cell + 1]):
                        px = b[indices[k], 0]
                        py = b[indices[k], 1]
                        dx = px - qx
                        dy = py - qy
                        d2 = dx * dx + dy * dy
                        if d2 < best:
                            best = d2
            ring += 1
        total += sqrt(best)
    return total / n
