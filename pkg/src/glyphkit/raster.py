"""Glyph rasterization: adaptive curve flattening plus scanline fill.

Contours of visible paths are flattened to polylines (cubics are subdivided
until the control points sit within a quarter pixel of the chord), mapped to
pixel space, implicitly closed, and filled at pixel centers under the
nonzero-winding or even-odd rule. Row 0 of the grid is the bottom of the
view box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import Cubic, Line, segment_of
from .model import Glyph, Point

__all__ = ["RasterGrid", "rasterize", "DEFAULT_VIEW_BOX"]

#: Covers EM-normalized, origin-centered glyphs with margin.
DEFAULT_VIEW_BOX = (-0.7, -0.7, 0.7, 0.7)

#: Chordal flattening tolerance, in pixels.
FLATNESS_PX = 0.25

_MAX_DEPTH = 24


@dataclass
class RasterGrid:
    """Binary occupancy grid over a view box; pixels are to be read-only."""

    pixels: np.ndarray
    view_box: tuple[float, float, float, float]

    @property
    def resolution(self) -> int:
        return self.pixels.shape[0]

    def filled_fraction(self) -> float:
        return float(self.pixels.mean())

    def same_frame(self, other: "RasterGrid") -> bool:
        return (
            self.pixels.shape == other.pixels.shape
            and self.view_box == other.view_box
        )


def _flat_enough(p1: Point, p2: Point, p3: Point, p4: Point, tol: float) -> bool:
    # Max distance of the control points from the chord p1-p4.
    ux, uy = p4[0] - p1[0], p4[1] - p1[1]
    chord2 = ux * ux + uy * uy
    if chord2 < 1e-30:
        d2 = max(
            (p2[0] - p1[0]) ** 2 + (p2[1] - p1[1]) ** 2,
            (p3[0] - p1[0]) ** 2 + (p3[1] - p1[1]) ** 2,
        )
        return d2 <= tol * tol
    d2 = 0.0
    for p in (p2, p3):
        cross = (p[0] - p1[0]) * uy - (p[1] - p1[1]) * ux
        d2 = max(d2, cross * cross / chord2)
    return d2 <= tol * tol


def _flatten_cubic(p1, p2, p3, p4, tol, depth, out: list[Point]) -> None:
    if depth >= _MAX_DEPTH or _flat_enough(p1, p2, p3, p4, tol):
        out.append(p4)
        return
    mid = lambda a, b: ((a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5)
    a = mid(p1, p2)
    b = mid(p2, p3)
    c = mid(p3, p4)
    d = mid(a, b)
    e = mid(b, c)
    f = mid(d, e)
    _flatten_cubic(p1, a, d, f, tol, depth + 1, out)
    _flatten_cubic(f, e, c, p4, tol, depth + 1, out)


def glyph_contours_px(
    glyph: Glyph,
    resolution: int,
    view_box: tuple[float, float, float, float],
    flatness_px: float = FLATNESS_PX,
) -> list[list[Point]]:
    """Flattened contours of the visible paths, in pixel coordinates."""
    x0, y0, x1, y1 = view_box
    if x1 <= x0 or y1 <= y0:
        raise ValueError("view box must have positive area")
    sx = resolution / (x1 - x0)
    sy = resolution / (y1 - y0)

    def to_px(p: Point) -> Point:
        return ((p[0] - x0) * sx, (p[1] - y0) * sy)

    contours: list[list[Point]] = []
    for path in glyph.paths:
        if not path.visible:
            continue
        ring: list[Point] = []
        for cmd in path.commands:
            seg = segment_of(cmd)
            if seg is None:
                continue
            if not ring:
                ring.append(to_px(seg.a if isinstance(seg, Line) else seg.p1))
            if isinstance(seg, Line):
                ring.append(to_px(seg.b))
            else:
                _flatten_cubic(
                    to_px(seg.p1), to_px(seg.p2), to_px(seg.p3), to_px(seg.p4),
                    flatness_px, 0, ring,
                )
        if len(ring) >= 2:
            contours.append(ring)
    return contours


def rasterize(
    glyph: Glyph,
    resolution: int = 128,
    fill_rule: str = "nonzero",
    view_box: tuple[float, float, float, float] = DEFAULT_VIEW_BOX,
) -> RasterGrid:
    """Scanline-fill a glyph onto a resolution x resolution grid.

    An empty glyph produces an all-zero grid. Output is deterministic.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    if fill_rule not in ("nonzero", "evenodd"):
        raise ValueError(f"unknown fill rule {fill_rule!r}")

    contours = glyph_contours_px(glyph, resolution, view_box)
    edges: list[tuple[float, float, float, float]] = []
    for ring in contours:
        pts = list(ring)
        if pts[0] != pts[-1]:
            pts.append(pts[0])  # implicit closure
        for a, b in zip(pts, pts[1:]):
            edges.append((a[0], a[1], b[0], b[1]))

    if not edges:
        pixels = np.zeros((resolution, resolution), dtype=np.uint8)
    else:
        pixels = kernels.fill_grid(
            np.array(edges, dtype=np.float64), resolution, fill_rule == "nonzero"
        )
    return RasterGrid(pixels=pixels, view_box=tuple(float(v) for v in view_box))
