"""Parity between the compiled and pure kernels, and grid-NN versus brute force."""

import math
import random

import numpy as np
import pytest

from glyphkit import kernels


def random_edges(rng, n_rings=3, n_pts=12, scale=100.0):
    edges = []
    for _ in range(n_rings):
        cx, cy = rng.uniform(20, scale - 20), rng.uniform(20, scale - 20)
        r = rng.uniform(5, 18)
        pts = []
        for k in range(n_pts):
            a = 2 * math.pi * k / n_pts + rng.uniform(-0.1, 0.1)
            pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
        for a, b in zip(pts, pts[1:] + pts[:1]):
            edges.append((a[0], a[1], b[0], b[1]))
    return np.array(edges, dtype=np.float64)


needs_compiled = pytest.mark.skipif(
    "compiled" not in kernels.implementations(), reason="compiled extension not built"
)


@needs_compiled
class TestCompiledPureParity:
    def test_fill_grid_identical(self):
        impls = kernels.implementations()
        rng = random.Random(81)
        for case in range(10):
            edges = random_edges(rng)
            for nonzero in (True, False):
                pure = np.asarray(impls["pure"].fill_grid(edges, 100, nonzero))
                comp = np.asarray(impls["compiled"].fill_grid(edges, 100, nonzero))
                assert np.array_equal(pure, comp), (case, nonzero)

    def test_nn_mean_dist_identical(self):
        impls = kernels.implementations()
        rng = np.random.default_rng(82)
        for _ in range(10):
            a = rng.uniform(-1, 1, size=(rng.integers(1, 400), 2))
            b = rng.uniform(-1, 1, size=(rng.integers(1, 400), 2))
            pure = impls["pure"].nn_mean_dist(np.ascontiguousarray(a), np.ascontiguousarray(b))
            comp = impls["compiled"].nn_mean_dist(np.ascontiguousarray(a), np.ascontiguousarray(b))
            assert pure == comp

    def test_dispatcher_prefers_compiled(self):
        import os

        if os.environ.get("GLYPHKIT_PURE"):
            pytest.skip("pure mode forced via environment")
        assert kernels.USING_COMPILED


class TestGridAgainstBruteForce:
    def test_random_clouds(self):
        rng = np.random.default_rng(83)
        for _ in range(15):
            a = rng.uniform(-2, 2, size=(int(rng.integers(1, 300)), 2))
            b = rng.uniform(-2, 2, size=(int(rng.integers(1, 300)), 2))
            fast = kernels.nn_mean_dist(a, b)
            slow = kernels.nn_mean_dist_bruteforce(a, b)
            assert fast == pytest.approx(slow, abs=1e-12)

    def test_clustered_and_degenerate_clouds(self):
        rng = np.random.default_rng(84)
        clusters = np.concatenate(
            [rng.normal(loc, 0.01, size=(50, 2)) for loc in ((-1, -1), (1, 1), (0, 3))]
        )
        queries = rng.uniform(-4, 4, size=(200, 2))
        assert kernels.nn_mean_dist(queries, clusters) == pytest.approx(
            kernels.nn_mean_dist_bruteforce(queries, clusters), abs=1e-12
        )
        # all target points identical (zero-extent grid)
        same = np.zeros((10, 2)) + 0.5
        assert kernels.nn_mean_dist(queries, same) == pytest.approx(
            kernels.nn_mean_dist_bruteforce(queries, same), abs=1e-12
        )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            kernels.nn_mean_dist(np.zeros((0, 2)), np.zeros((3, 2)))


class TestFillGridBasics:
    def test_square_exact_interior(self):
        # 10x10 square covering pixel centers 2..11 in a 16-grid
        edges = np.array(
            [
                (2.0, 2.0, 12.0, 2.0),
                (12.0, 2.0, 12.0, 12.0),
                (12.0, 12.0, 2.0, 12.0),
                (2.0, 12.0, 2.0, 2.0),
            ]
        )
        grid = kernels.fill_grid(edges, 16, True)
        assert grid.sum() == 100
        assert grid[2:12, 2:12].all()

    def test_winding_cancellation(self):
        # two opposite-orientation concentric squares leave a hole
        outer = [(1, 1, 15, 1), (15, 1, 15, 15), (15, 15, 1, 15), (1, 15, 1, 1)]
        inner = [(5, 5, 5, 11), (5, 11, 11, 11), (11, 11, 11, 5), (11, 5, 5, 5)]
        grid = kernels.fill_grid(np.array(outer + inner, dtype=float), 16, True)
        assert grid[8, 8] == 0
        assert grid[2, 2] == 1
