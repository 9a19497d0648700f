"""Ground-truth continuity and axis-alignment labels from glyph geometry.

Junction continuity is graded C0 < G1 < C1: shared endpoint only, collinear
travel tangents, or collinear tangents with equal magnitude. Line-line
junctions are C0 by construction. Alignment classifies each line segment as
horizontal, vertical, or neither, within a coordinate slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from .geometry import JunctionTangents, Line, junction_tangents, segment_of
from .model import CommandKind, EPS_JOIN, Glyph

__all__ = [
    "ContinuityLabel",
    "AlignLabel",
    "Thresholds",
    "JunctionSite",
    "LineSite",
    "classify_junction",
    "classify_alignment",
    "enumerate_junction_sites",
    "enumerate_line_sites",
    "label_glyph",
]

#: Tangents shorter than this are degenerate and classify as C0.
DEGENERATE_TANGENT = 1e-12


class ContinuityLabel(IntEnum):
    C0 = 0
    G1 = 1
    C1 = 2


class AlignLabel(IntEnum):
    H = 0
    V = 1
    NONE = 2


@dataclass(frozen=True)
class Thresholds:
    """Classification slacks, all in EM units (see module docs for defaults).

    ``eps_a``: slack on the tangent cosine (G1 requires cos > 1 - eps_a).
    ``eps_b``: slack on the tangent magnitude difference for C1.
    ``eps_align``: coordinate slack for axis alignment of lines.
    """

    eps_a: float = 1e-3
    eps_b: float = 1e-2
    eps_align: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("eps_a", "eps_b", "eps_align"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


def classify_junction(
    tangents: JunctionTangents,
    kinds: tuple[CommandKind, CommandKind],
    thresholds: Thresholds = Thresholds(),
) -> ContinuityLabel:
    """Grade one junction from its travel tangents and the adjoining kinds."""
    prev_kind, next_kind = kinds
    if prev_kind is CommandKind.LINE_FROM_TO and next_kind is CommandKind.LINE_FROM_TO:
        return ContinuityLabel.C0
    (ax, ay), (bx, by) = tangents.u_minus, tangents.u_plus
    nm = math.sqrt(ax * ax + ay * ay)
    np_ = math.sqrt(bx * bx + by * by)
    if nm < DEGENERATE_TANGENT or np_ < DEGENERATE_TANGENT:
        return ContinuityLabel.C0
    cosine = (ax * bx + ay * by) / (nm * np_)
    if cosine > 1.0 - thresholds.eps_a:
        if abs(nm - np_) < thresholds.eps_b:
            return ContinuityLabel.C1
        return ContinuityLabel.G1
    return ContinuityLabel.C0


def classify_alignment(line: Line, thresholds: Thresholds = Thresholds()) -> AlignLabel:
    """H before V on degenerate near-point segments (deterministic tie-break)."""
    if abs(line.a[1] - line.b[1]) < thresholds.eps_align:
        return AlignLabel.H
    if abs(line.a[0] - line.b[0]) < thresholds.eps_align:
        return AlignLabel.V
    return AlignLabel.NONE


@dataclass(frozen=True)
class JunctionSite:
    """Junction between drawing commands ``prev`` and ``next`` of one path.

    ``closing`` marks the seam of a closed contour (last command back into
    the first drawing command).
    """

    path: int
    prev: int
    next: int
    closing: bool = False


@dataclass(frozen=True)
class LineSite:
    path: int
    index: int


def _dist(a, b) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2)


def enumerate_junction_sites(glyph: Glyph) -> list[JunctionSite]:
    """All junctions of visible paths, in path-traversal order.

    MoveTo commands produce no junction. A closed contour (last end point
    coincident with the contour start within EPS_JOIN) contributes a closing
    seam junction, provided it has at least two drawing commands.
    """
    sites: list[JunctionSite] = []
    for pi, path in enumerate(glyph.paths):
        if not path.visible:
            continue
        idx = path.drawing_indices()
        for a, b in zip(idx, idx[1:]):
            sites.append(JunctionSite(pi, a, b))
        if len(idx) >= 2:
            last, first = idx[-1], idx[0]
            if _dist(path.commands[last].p4, path.commands[first].p1) <= EPS_JOIN:
                sites.append(JunctionSite(pi, last, first, closing=True))
    return sites


def enumerate_line_sites(glyph: Glyph) -> list[LineSite]:
    """All line commands of visible paths, in path-traversal order."""
    sites: list[LineSite] = []
    for pi, path in enumerate(glyph.paths):
        if not path.visible:
            continue
        for k, cmd in enumerate(path.commands):
            if cmd.kind is CommandKind.LINE_FROM_TO:
                sites.append(LineSite(pi, k))
    return sites


def label_glyph(
    glyph: Glyph, thresholds: Thresholds = Thresholds()
) -> tuple[list[ContinuityLabel], list[AlignLabel]]:
    """Continuity label per junction and alignment label per line.

    Coordinates are expected in EM units (the thresholds are absolute).
    """
    junction_labels: list[ContinuityLabel] = []
    for site in enumerate_junction_sites(glyph):
        path = glyph.paths[site.path]
        prev_cmd = path.commands[site.prev]
        next_cmd = path.commands[site.next]
        tangents = junction_tangents(segment_of(prev_cmd), segment_of(next_cmd))
        junction_labels.append(
            classify_junction(tangents, (prev_cmd.kind, next_cmd.kind), thresholds)
        )
    align_labels = [
        classify_alignment(segment_of(glyph.paths[s.path].commands[s.index]), thresholds)
        for s in enumerate_line_sites(glyph)
    ]
    return junction_labels, align_labels
