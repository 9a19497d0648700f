"""Differentiable junction repair and line snapping via straight-through selection.

Each operator evaluates all candidate refinements (identity / G1 / C1 for
junctions, H / V / identity for lines, matching the label encodings) with
DiffValue arithmetic and selects among them with
:func:`glyphkit.autodiff.ste_select`: the forward output is bit-equal to the
plain operator applied with the argmax label, while the selection logits
receive softmax-mixture gradients. Geometry gradients flow through the
selected branch only unless ``soft_branch_grads`` is set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .autodiff import DiffValue, SteTieError, Tape, ste_select
from .geometry import Cubic, Line, Segment
from .labels import AlignLabel, ContinuityLabel
from .refine import (
    RefineError,
    _check_joined,
    _curve_curve_repair,
    _line_curve_repair,
    _snap_h,
    _snap_v,
)

__all__ = [
    "DiffLine",
    "DiffCubic",
    "lift_segment",
    "lower_segment",
    "diff_refine_junction",
    "diff_snap_line",
]

DiffPoint = tuple[DiffValue, DiffValue]


@dataclass(frozen=True)
class DiffLine:
    a: DiffPoint
    b: DiffPoint


@dataclass(frozen=True)
class DiffCubic:
    p1: DiffPoint
    p2: DiffPoint
    p3: DiffPoint
    p4: DiffPoint


DiffSegment = DiffLine | DiffCubic


def lift_segment(tape: Tape, seg: Segment) -> DiffSegment:
    """Record a segment's coordinates as tape leaves."""
    if isinstance(seg, Line):
        return DiffLine(
            (tape.leaf(seg.a[0]), tape.leaf(seg.a[1])),
            (tape.leaf(seg.b[0]), tape.leaf(seg.b[1])),
        )
    return DiffCubic(
        *(tuple(tape.leaf(v) for v in pt) for pt in (seg.p1, seg.p2, seg.p3, seg.p4))
    )


def lower_segment(seg: DiffSegment) -> Segment:
    """Forward values of a differentiable segment."""
    if isinstance(seg, DiffLine):
        return Line((seg.a[0].value, seg.a[1].value), (seg.b[0].value, seg.b[1].value))
    return Cubic(
        *(
            (pt[0].value, pt[1].value)
            for pt in (seg.p1, seg.p2, seg.p3, seg.p4)
        )
    )


def _flatten(seg: DiffSegment) -> list[DiffValue]:
    pts = (seg.a, seg.b) if isinstance(seg, DiffLine) else (seg.p1, seg.p2, seg.p3, seg.p4)
    return [v for pt in pts for v in pt]


def _rebuild(template: DiffSegment, flat: list[DiffValue]) -> DiffSegment:
    if isinstance(template, DiffLine):
        return DiffLine((flat[0], flat[1]), (flat[2], flat[3]))
    return DiffCubic(
        (flat[0], flat[1]), (flat[2], flat[3]), (flat[4], flat[5]), (flat[6], flat[7])
    )


def _end(seg: DiffSegment) -> DiffPoint:
    return seg.b if isinstance(seg, DiffLine) else seg.p4


def _start(seg: DiffSegment) -> DiffPoint:
    return seg.a if isinstance(seg, DiffLine) else seg.p1


def _repair_branch(prev: DiffSegment, nxt: DiffSegment, equalize: bool) -> list[DiffValue]:
    """Coordinates of (prev', next') under one repair mode."""
    if isinstance(prev, DiffCubic) and isinstance(nxt, DiffCubic):
        new_p3, new_p2 = _curve_curve_repair(prev.p4, prev.p3, nxt.p1, nxt.p2, equalize)
        prev_out = DiffCubic(prev.p1, prev.p2, new_p3, prev.p4)
        next_out = DiffCubic(nxt.p1, new_p2, nxt.p3, nxt.p4)
    elif isinstance(prev, DiffLine) and isinstance(nxt, DiffCubic):
        new_p2 = _line_curve_repair(prev.a, prev.b, nxt.p1, nxt.p2, True, equalize)
        prev_out = prev
        next_out = DiffCubic(nxt.p1, new_p2, nxt.p3, nxt.p4)
    elif isinstance(prev, DiffCubic) and isinstance(nxt, DiffLine):
        new_p3 = _line_curve_repair(nxt.a, nxt.b, prev.p4, prev.p3, False, equalize)
        prev_out = DiffCubic(prev.p1, prev.p2, new_p3, prev.p4)
        next_out = nxt
    else:
        raise RefineError("lines are C0 by construction")
    return _flatten(prev_out) + _flatten(next_out)


def diff_refine_junction(
    prev: DiffSegment,
    nxt: DiffSegment,
    logits: list[DiffValue],
    temperature: float = 1.0,
    soft_branch_grads: bool = False,
) -> tuple[DiffSegment, DiffSegment]:
    """Straight-through continuity refinement; logits ordered (C0, G1, C1)."""
    if len(logits) != len(ContinuityLabel):
        raise ValueError("one logit per continuity label required")
    _check_joined(_end(prev), _start(nxt))

    if isinstance(prev, DiffLine) and isinstance(nxt, DiffLine):
        values = [l.value for l in logits]
        top = max(values)
        if values.count(top) > 1:
            raise SteTieError("ambiguous selection: argmax of logits is tied")
        if values.index(top) != int(ContinuityLabel.C0):
            raise RefineError("lines are C0 by construction")
        # No repair exists; the junction is gradient-transparent.
        return prev, nxt

    identity = _flatten(prev) + _flatten(nxt)
    branches = [
        identity,
        _repair_branch(prev, nxt, equalize=False),
        _repair_branch(prev, nxt, equalize=True),
    ]
    out = ste_select(logits, branches, temperature, soft_branch_grads)
    n_prev = 4 if isinstance(prev, DiffLine) else 8
    return _rebuild(prev, out[:n_prev]), _rebuild(nxt, out[n_prev:])


def diff_snap_line(
    line: DiffLine,
    logits: list[DiffValue],
    temperature: float = 1.0,
    soft_branch_grads: bool = False,
) -> DiffLine:
    """Straight-through alignment snapping; logits ordered (H, V, NONE)."""
    if len(logits) != len(AlignLabel):
        raise ValueError("one logit per alignment label required")
    ha, hb = _snap_h(line.a, line.b)
    va, vb = _snap_v(line.a, line.b)
    branches = [
        [ha[0], ha[1], hb[0], hb[1]],
        [va[0], va[1], vb[0], vb[1]],
        _flatten(line),
    ]
    out = ste_select(logits, branches, temperature, soft_branch_grads)
    return DiffLine((out[0], out[1]), (out[2], out[3]))
