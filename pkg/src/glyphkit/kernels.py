"""Kernel dispatch: compiled extension when built, pure Python otherwise.

Set the environment variable ``GLYPHKIT_PURE=1`` to force the pure-Python
implementations (used by the benchmark and the parity tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("GLYPHKIT_PURE"):
    _impl = _kernels_py
    USING_COMPILED = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        USING_COMPILED = True
    except ImportError:
        _impl = _kernels_py
        USING_COMPILED = False


def fill_grid(edges: np.ndarray, resolution: int, nonzero: bool) -> np.ndarray:
    edges = np.ascontiguousarray(edges, dtype=np.float64).reshape(-1, 4)
    return np.asarray(_impl.fill_grid(edges, int(resolution), bool(nonzero)))


def nn_mean_dist(a: np.ndarray, b: np.ndarray) -> float:
    a = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 2)
    return float(_impl.nn_mean_dist(a, b))


def nn_mean_dist_bruteforce(a: np.ndarray, b: np.ndarray) -> float:
    """Testing oracle; always the pure-Python exhaustive search."""
    a = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 2)
    return float(_kernels_py.nn_mean_dist_bruteforce(a, b))


def implementations() -> dict[str, object]:
    """Both kernel backends, for parity tests and benchmarks."""
    impls: dict[str, object] = {"pure": _kernels_py}
    try:
        from . import _speedups

        impls["compiled"] = _speedups
    except ImportError:
        pass
    return impls
