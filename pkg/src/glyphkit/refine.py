"""Deterministic geometric refinement of junction continuity and line alignment.

Curve-curve repair moves the two control points adjacent to the junction so
the travel tangents share the bisector direction d of the unit tangents; G1
keeps each tangent's magnitude, C1 replaces both with their mean. Line-curve
repair moves only the curve's adjacent control point onto the line direction
(C1 additionally sets its magnitude to the line's length). Alignment snapping
projects both endpoints of a line onto the mean coordinate of the predicted
axis. Endpoints never move during continuity repair.

The private ``_*_repair``/``_snap_*`` kernels are generic over the scalar
type so :mod:`glyphkit.diffrefine` can run the identical arithmetic on
DiffValues, making forward results bit-equal between the two paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .autodiff import sqrt_, value_of
from .geometry import Cubic, Line, Segment, segment_end, segment_of, segment_start
from .labels import (
    AlignLabel,
    ContinuityLabel,
    JunctionSite,
    LineSite,
    enumerate_junction_sites,
    enumerate_line_sites,
)
from .model import Command, CommandKind, EPS_JOIN, Glyph, Path, Point

__all__ = [
    "RefineError",
    "RefineResult",
    "SkippedSite",
    "refine_continuity_junction",
    "snap_alignment",
    "refine_glyph",
    "check_distribution",
]

#: Below this, a tangent or the tangent bisector is considered degenerate.
DEGENERATE_NORM = 1e-9


class RefineError(ValueError):
    pass


def check_distribution(probs, n: int = 3, tol: float = 1e-9) -> None:
    """Validate a probability vector: length, range, and unit sum."""
    if len(probs) != n:
        raise ValueError(f"expected {n} probabilities, got {len(probs)}")
    total = 0.0
    for p in probs:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        total += p
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total}, not 1")


# ---------------------------------------------------------------------------
# scalar-generic kernels (floats or DiffValues)


def _curve_curve_repair(prev_end, prev_p3, next_start, next_p2, equalize: bool):
    """New (prev_p3, next_p2) enforcing a common tangent direction.

    ``equalize`` additionally forces a common tangent magnitude (the mean).
    """
    tmx = prev_end[0] - prev_p3[0]
    tmy = prev_end[1] - prev_p3[1]
    tpx = next_p2[0] - next_start[0]
    tpy = next_p2[1] - next_start[1]
    nm = sqrt_(tmx * tmx + tmy * tmy)
    np_ = sqrt_(tpx * tpx + tpy * tpy)
    if value_of(nm) < DEGENERATE_NORM or value_of(np_) < DEGENERATE_NORM:
        raise RefineError("degenerate tangent at junction")
    ux, uy = tmx / nm, tmy / nm
    vx, vy = tpx / np_, tpy / np_
    sx, sy = ux + vx, uy + vy
    sn = sqrt_(sx * sx + sy * sy)
    if value_of(sn) < DEGENERATE_NORM:
        raise RefineError("undefined bisector: tangents are anti-parallel")
    dx, dy = sx / sn, sy / sn
    if equalize:
        mm = mp = (nm + np_) * 0.5
    else:
        mm, mp = nm, np_
    new_p3 = (prev_end[0] - mm * dx, prev_end[1] - mm * dy)
    new_p2 = (next_start[0] + mp * dx, next_start[1] + mp * dy)
    return new_p3, new_p2


def _line_curve_repair(line_a, line_b, endpoint, ctrl, curve_is_next: bool, equalize: bool):
    """New adjacent control point of the curve, aligned with the line direction."""
    wx = line_b[0] - line_a[0]
    wy = line_b[1] - line_a[1]
    length = sqrt_(wx * wx + wy * wy)
    if value_of(length) < DEGENERATE_NORM:
        raise RefineError("degenerate line at junction")
    dx, dy = wx / length, wy / length
    if curve_is_next:
        tx, ty = ctrl[0] - endpoint[0], ctrl[1] - endpoint[1]
    else:
        tx, ty = endpoint[0] - ctrl[0], endpoint[1] - ctrl[1]
    mag = sqrt_(tx * tx + ty * ty)
    if value_of(mag) < DEGENERATE_NORM:
        raise RefineError("degenerate tangent at junction")
    m = length if equalize else mag
    if curve_is_next:
        return (endpoint[0] + m * dx, endpoint[1] + m * dy)
    return (endpoint[0] - m * dx, endpoint[1] - m * dy)


def _snap_h(a, b):
    ybar = (a[1] + b[1]) * 0.5
    return (a[0], ybar), (b[0], ybar)


def _snap_v(a, b):
    xbar = (a[0] + b[0]) * 0.5
    return (xbar, a[1]), (xbar, b[1])


def _check_joined(prev_end, next_start) -> None:
    gx = value_of(prev_end[0]) - value_of(next_start[0])
    gy = value_of(prev_end[1]) - value_of(next_start[1])
    if math.sqrt(gx * gx + gy * gy) > EPS_JOIN:
        raise RefineError("segments do not share an endpoint")


# ---------------------------------------------------------------------------
# public operators


def refine_continuity_junction(
    prev: Segment, nxt: Segment, label: ContinuityLabel
) -> tuple[Segment, Segment]:
    """Enforce ``label`` at the junction between two segments.

    C0 is the identity. Requesting more than C0 at a line-line junction is an
    error (lines are C0 by construction), as are degenerate tangents and
    anti-parallel tangents (undefined bisector). Endpoints never move.
    """
    _check_joined(segment_end(prev), segment_start(nxt))
    if label is ContinuityLabel.C0:
        return prev, nxt
    equalize = label is ContinuityLabel.C1

    if isinstance(prev, Line) and isinstance(nxt, Line):
        raise RefineError("lines are C0 by construction")

    if isinstance(prev, Cubic) and isinstance(nxt, Cubic):
        new_p3, new_p2 = _curve_curve_repair(prev.p4, prev.p3, nxt.p1, nxt.p2, equalize)
        return (
            Cubic(prev.p1, prev.p2, new_p3, prev.p4),
            Cubic(nxt.p1, new_p2, nxt.p3, nxt.p4),
        )

    if isinstance(prev, Line):
        new_p2 = _line_curve_repair(prev.a, prev.b, nxt.p1, nxt.p2, True, equalize)
        return prev, Cubic(nxt.p1, new_p2, nxt.p3, nxt.p4)

    new_p3 = _line_curve_repair(nxt.a, nxt.b, prev.p4, prev.p3, False, equalize)
    return Cubic(prev.p1, prev.p2, new_p3, prev.p4), nxt


def snap_alignment(line: Line, label: AlignLabel) -> Line:
    """Snap a line onto the predicted axis; NONE is the identity."""
    if label is AlignLabel.H:
        a, b = _snap_h(line.a, line.b)
        return Line(a, b)
    if label is AlignLabel.V:
        a, b = _snap_v(line.a, line.b)
        return Line(a, b)
    return line


# ---------------------------------------------------------------------------
# glyph-level refinement


@dataclass(frozen=True)
class SkippedSite:
    site: JunctionSite
    label: ContinuityLabel
    reason: str


@dataclass(frozen=True)
class RefineResult:
    glyph: Glyph
    skipped: tuple[SkippedSite, ...] = ()


def _gate(probs: list, confidence: float) -> int | None:
    top = max(probs)
    return probs.index(top) if top > confidence else None


class _WorkPath:
    """Mutable command buffer with junction-point propagation.

    The four-point representation duplicates every junction coordinate; when
    an endpoint moves, every duplicate of it (previous/next command, the
    MoveTo, the closing seam) is rewritten so the contour stays consistent.
    """

    def __init__(self, path: Path):
        self.visible = path.visible
        self.kinds = [c.kind for c in path.commands]
        self.pts = [[list(p) for p in c.points] for c in path.commands]
        idx = path.drawing_indices()
        self.first_drawing = idx[0] if idx else -1
        self.last_drawing = idx[-1] if idx else -1
        self.closed = False
        if len(idx) >= 2:
            last_end = path.commands[self.last_drawing].p4
            start = path.commands[self.first_drawing].p1
            self.closed = (
                math.dist(last_end, start) <= EPS_JOIN
            )

    def set_start(self, k: int, pt: Point) -> None:
        self.pts[k][0] = list(pt)
        if k > 0:
            self.pts[k - 1][3] = list(pt)
            if k - 1 == 0 and self.kinds[0] is CommandKind.MOVE_TO:
                self.pts[0][0] = list(pt)
        if k == self.first_drawing and self.closed:
            self.pts[self.last_drawing][3] = list(pt)

    def set_end(self, k: int, pt: Point) -> None:
        self.pts[k][3] = list(pt)
        if k + 1 < len(self.kinds):
            self.pts[k + 1][0] = list(pt)
        elif self.closed and k == self.last_drawing:
            if self.kinds[0] is CommandKind.MOVE_TO:
                self.pts[0][0] = list(pt)
                self.pts[0][3] = list(pt)
            self.pts[self.first_drawing][0] = list(pt)

    def point(self, k: int, j: int) -> Point:
        return tuple(self.pts[k][j])

    def segment(self, k: int) -> Segment:
        kind = self.kinds[k]
        p = [tuple(q) for q in self.pts[k]]
        if kind is CommandKind.LINE_FROM_TO:
            return Line(p[0], p[3])
        if kind is CommandKind.CURVE_FROM_TO:
            return Cubic(p[0], p[1], p[2], p[3])
        raise ValueError("not a drawing command")

    def to_path(self) -> Path:
        cmds = [
            Command(kind, *[tuple(p) for p in pts])
            for kind, pts in zip(self.kinds, self.pts)
        ]
        return Path(tuple(cmds), visible=self.visible)


def refine_glyph(
    glyph: Glyph,
    junction_preds,
    align_preds,
    confidence: float = 0.75,
) -> RefineResult:
    """Confidence-gated refinement over a whole glyph.

    A site is refined only when its argmax probability strictly exceeds
    ``confidence``. Alignment snapping runs first (it moves line endpoints,
    which feed the tangent computation), then continuity repair in
    path-traversal order. Junctions whose repair raises are skipped and
    reported in the result. Prediction lists must match the glyph's site
    enumeration (:func:`glyphkit.labels.enumerate_junction_sites` /
    ``enumerate_line_sites``).
    """
    junction_sites = enumerate_junction_sites(glyph)
    line_sites = enumerate_line_sites(glyph)
    if len(junction_preds) != len(junction_sites):
        raise ValueError(
            f"{len(junction_preds)} junction predictions for {len(junction_sites)} sites"
        )
    if len(align_preds) != len(line_sites):
        raise ValueError(
            f"{len(align_preds)} alignment predictions for {len(line_sites)} sites"
        )
    for p in junction_preds:
        check_distribution(p)
    for p in align_preds:
        check_distribution(p)

    work = [_WorkPath(p) for p in glyph.paths]
    skipped: list[SkippedSite] = []

    for site, probs in zip(line_sites, align_preds):
        choice = _gate(list(probs), confidence)
        if choice is None:
            continue
        label = AlignLabel(choice)
        if label is AlignLabel.NONE:
            continue
        wp = work[site.path]
        a = wp.point(site.index, 0)
        b = wp.point(site.index, 3)
        na, nb = (_snap_h if label is AlignLabel.H else _snap_v)(a, b)
        wp.set_start(site.index, na)
        wp.set_end(site.index, nb)

    for site, probs in zip(junction_sites, junction_preds):
        choice = _gate(list(probs), confidence)
        if choice is None:
            continue
        label = ContinuityLabel(choice)
        wp = work[site.path]
        try:
            new_prev, new_next = refine_continuity_junction(
                wp.segment(site.prev), wp.segment(site.next), label
            )
        except RefineError as exc:
            skipped.append(SkippedSite(site, label, str(exc)))
            continue
        if isinstance(new_prev, Cubic):
            wp.pts[site.prev][1] = list(new_prev.p2)
            wp.pts[site.prev][2] = list(new_prev.p3)
        if isinstance(new_next, Cubic):
            wp.pts[site.next][1] = list(new_next.p2)
            wp.pts[site.next][2] = list(new_next.p3)

    refined = Glyph(
        tuple(wp.to_path() for wp in work),
        units_per_em=glyph.units_per_em,
        normalized=glyph.normalized,
    )
    return RefineResult(refined, tuple(skipped))
