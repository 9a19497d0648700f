"""Segment-level geometry: Bezier evaluation, sampling, junction tangents."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .model import Command, CommandKind, EPS_JOIN, Point

__all__ = [
    "Line",
    "Cubic",
    "Segment",
    "JunctionTangents",
    "segment_of",
    "segment_start",
    "segment_end",
    "bezier_point",
    "sample_segment",
    "junction_tangents",
]


@dataclass(frozen=True)
class Line:
    a: Point
    b: Point


@dataclass(frozen=True)
class Cubic:
    p1: Point
    p2: Point
    p3: Point
    p4: Point


Segment = Union[Line, Cubic]


@dataclass(frozen=True)
class JunctionTangents:
    """Travel-direction tangents at a junction.

    ``u_minus`` points along the incoming segment's direction of travel at
    the junction (``p4 - p3`` for a cubic, ``b - a`` for a line); ``u_plus``
    points along the outgoing segment's direction of travel (``p2 - p1`` for
    a cubic, ``b - a`` for a line). With this convention a smooth junction
    has cosine +1 between the two tangents.
    """

    u_minus: Point
    u_plus: Point


def segment_of(cmd: Command) -> Segment | None:
    """Lossless segment view of a drawing command; None for MoveTo/EOS."""
    if cmd.kind is CommandKind.LINE_FROM_TO:
        return Line(cmd.p1, cmd.p4)
    if cmd.kind is CommandKind.CURVE_FROM_TO:
        return Cubic(cmd.p1, cmd.p2, cmd.p3, cmd.p4)
    return None


def segment_start(seg: Segment) -> Point:
    return seg.a if isinstance(seg, Line) else seg.p1


def segment_end(seg: Segment) -> Point:
    return seg.b if isinstance(seg, Line) else seg.p4


def _lerp(a: Point, b: Point, t: float) -> Point:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def bezier_point(cubic: Cubic, t: float) -> Point:
    """De Casteljau evaluation; exact at the endpoints."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"parameter t={t} outside [0, 1]")
    if t == 0.0:
        return cubic.p1
    if t == 1.0:
        return cubic.p4
    a = _lerp(cubic.p1, cubic.p2, t)
    b = _lerp(cubic.p2, cubic.p3, t)
    c = _lerp(cubic.p3, cubic.p4, t)
    d = _lerp(a, b, t)
    e = _lerp(b, c, t)
    return _lerp(d, e, t)


def sample_segment(seg: Segment, n: int) -> list[Point]:
    """n points at parameter-uniform t = 0, 1/(n-1), ..., 1."""
    if n < 2:
        raise ValueError("sample count must be at least 2")
    ts = [i / (n - 1) for i in range(n)]
    if isinstance(seg, Line):
        return [_lerp(seg.a, seg.b, t) for t in ts]
    return [bezier_point(seg, t) for t in ts]


def junction_tangents(prev: Segment, nxt: Segment) -> JunctionTangents:
    """Travel tangents where ``prev`` ends and ``nxt`` begins.

    The shared endpoint must coincide within :data:`glyphkit.model.EPS_JOIN`.
    Zero-length tangents are returned as-is; classification treats them as
    degenerate.
    """
    pe = segment_end(prev)
    ns = segment_start(nxt)
    gap = math.sqrt((pe[0] - ns[0]) ** 2 + (pe[1] - ns[1]) ** 2)
    if gap > EPS_JOIN:
        raise ValueError(f"segments do not share an endpoint (gap {gap:.3g})")
    if isinstance(prev, Line):
        u_minus = (prev.b[0] - prev.a[0], prev.b[1] - prev.a[1])
    else:
        u_minus = (prev.p4[0] - prev.p3[0], prev.p4[1] - prev.p3[1])
    if isinstance(nxt, Line):
        u_plus = (nxt.b[0] - nxt.a[0], nxt.b[1] - nxt.a[1])
    else:
        u_plus = (nxt.p2[0] - nxt.p1[0], nxt.p2[1] - nxt.p1[1])
    return JunctionTangents(u_minus=u_minus, u_plus=u_plus)
