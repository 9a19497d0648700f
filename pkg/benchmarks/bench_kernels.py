#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallbacks.

Times the scanline fill and the grid nearest-neighbor query on synthetic
workloads and prints one row per (kernel, backend). Run from the repository
root after ``pip install -e . --no-build-isolation``:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from glyphkit import kernels


def ring_edges(n_rings: int, n_pts: int, size: float) -> np.ndarray:
    rng = np.random.default_rng(7)
    edges = []
    for _ in range(n_rings):
        cx, cy = rng.uniform(0.2 * size, 0.8 * size, size=2)
        r = rng.uniform(0.05 * size, 0.15 * size)
        pts = [
            (cx + r * math.cos(2 * math.pi * k / n_pts),
             cy + r * math.sin(2 * math.pi * k / n_pts))
            for k in range(n_pts)
        ]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            edges.append((a[0], a[1], b[0], b[1]))
    return np.array(edges, dtype=np.float64)


def timeit(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolution", type=int, default=256)
    ap.add_argument("--edges", type=int, default=600, help="approx. edge count")
    ap.add_argument("--points", type=int, default=4096, help="cloud size per side")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    impls = kernels.implementations()
    if "compiled" not in impls:
        print("note: compiled extension not built; benchmarking pure only")

    edges = ring_edges(n_rings=max(1, args.edges // 48), n_pts=48, size=args.resolution)
    rng = np.random.default_rng(11)
    cloud_a = np.ascontiguousarray(rng.uniform(-1, 1, size=(args.points, 2)))
    cloud_b = np.ascontiguousarray(rng.uniform(-1, 1, size=(args.points, 2)))

    print(f"fill_grid: {len(edges)} edges onto {args.resolution}x{args.resolution}")
    print(f"nn_mean_dist: {args.points} x {args.points} points")
    print()
    print(f"{'kernel':<14} {'backend':<10} {'best time':>12} {'speedup':>9}")

    for name, workload in (
        ("fill_grid", lambda impl: impl.fill_grid(edges, args.resolution, True)),
        ("nn_mean_dist", lambda impl: impl.nn_mean_dist(cloud_a, cloud_b)),
    ):
        times = {}
        for backend in ("pure", "compiled"):
            if backend not in impls:
                continue
            impl = impls[backend]
            times[backend] = timeit(lambda: workload(impl), args.repeats)
        base = times.get("pure")
        for backend, t in times.items():
            speedup = f"{base / t:6.1f}x" if base and backend == "compiled" else "      -"
            print(f"{name:<14} {backend:<10} {t * 1e3:>10.2f}ms {speedup:>9}")

    if "compiled" in impls:
        same_fill = np.array_equal(
            np.asarray(impls["pure"].fill_grid(edges, args.resolution, True)),
            np.asarray(impls["compiled"].fill_grid(edges, args.resolution, True)),
        )
        same_nn = impls["pure"].nn_mean_dist(cloud_a, cloud_b) == impls[
            "compiled"
        ].nn_mean_dist(cloud_a, cloud_b)
        print()
        print(f"backend agreement: fill_grid={same_fill}, nn_mean_dist={same_nn}")


if __name__ == "__main__":
    main()
