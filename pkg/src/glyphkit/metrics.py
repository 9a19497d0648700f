"""Rasterization-based and label-based evaluation metrics.

IoU and image l1 compare two occupancy grids over the same frame; the
reconstruction error is a symmetric Chamfer distance between point clouds
sampled from the two glyphs; the accuracies count exact label matches.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .geometry import sample_segment, segment_of
from .model import Glyph
from .raster import RasterGrid

__all__ = [
    "iou",
    "l1_image",
    "glyph_point_cloud",
    "chamfer_re",
    "accuracy_continuity",
    "accuracy_alignment",
]


def _check_frames(a: RasterGrid, b: RasterGrid) -> None:
    if not a.same_frame(b):
        raise ValueError("grids differ in resolution or view box")


def iou(a: RasterGrid, b: RasterGrid) -> float:
    """Intersection over union of two grids; 1.0 when both are empty."""
    _check_frames(a, b)
    pa = a.pixels.astype(bool)
    pb = b.pixels.astype(bool)
    union = int(np.logical_or(pa, pb).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(pa, pb).sum())
    return inter / union


def l1_image(a: RasterGrid, b: RasterGrid) -> float:
    """Mean absolute per-pixel difference."""
    _check_frames(a, b)
    return float(
        np.abs(a.pixels.astype(np.float64) - b.pixels.astype(np.float64)).mean()
    )


def _arclength_samples(seg, n: int, oversample: int = 8) -> list:
    """Approximately arclength-uniform samples via chord-length inversion."""
    dense = sample_segment(seg, (n - 1) * oversample + 1)
    cum = [0.0]
    for p, q in zip(dense, dense[1:]):
        cum.append(cum[-1] + math.dist(p, q))
    total = cum[-1]
    if total <= 0.0:
        return [dense[0]] * n
    out = [dense[0]]
    j = 0
    for i in range(1, n - 1):
        target = total * i / (n - 1)
        while cum[j + 1] < target:
            j += 1
        span = cum[j + 1] - cum[j]
        t = 0.0 if span <= 0 else (target - cum[j]) / span
        p, q = dense[j], dense[j + 1]
        out.append((p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t))
    out.append(dense[-1])
    return out


def glyph_point_cloud(
    glyph: Glyph, n_per_segment: int = 32, arclength: bool = False
) -> np.ndarray:
    """Sampled points of all drawing segments of the visible paths."""
    pts: list = []
    for path in glyph.paths:
        if not path.visible:
            continue
        for cmd in path.commands:
            seg = segment_of(cmd)
            if seg is None:
                continue
            if arclength:
                pts.extend(_arclength_samples(seg, n_per_segment))
            else:
                pts.extend(sample_segment(seg, n_per_segment))
    return np.array(pts, dtype=np.float64).reshape(-1, 2)


def chamfer_re(
    a: Glyph, b: Glyph, n_per_segment: int = 32, arclength: bool = False
) -> float:
    """Symmetric Chamfer distance (unsquared) between sampled outlines."""
    ca = glyph_point_cloud(a, n_per_segment, arclength)
    cb = glyph_point_cloud(b, n_per_segment, arclength)
    if len(ca) == 0 or len(cb) == 0:
        raise ValueError("empty glyph")
    return kernels.nn_mean_dist(ca, cb) + kernels.nn_mean_dist(cb, ca)


def _accuracy(preds, gts) -> float:
    if len(preds) != len(gts):
        raise ValueError("prediction and ground-truth lists differ in length")
    if len(gts) == 0:
        raise ValueError("empty label lists")
    hits = sum(1 for p, g in zip(preds, gts) if int(p) == int(g))
    return hits / len(gts)


def accuracy_continuity(preds, gts) -> float:
    """Fraction of junctions whose predicted label matches exactly."""
    return _accuracy(preds, gts)


def accuracy_alignment(preds, gts) -> float:
    """Fraction of lines whose predicted alignment matches exactly."""
    return _accuracy(preds, gts)
