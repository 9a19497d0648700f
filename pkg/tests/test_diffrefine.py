import math
import random

import pytest

from glyphkit.autodiff import SteTieError, Tape, backward, gradcheck
from glyphkit.diffrefine import (
    DiffLine,
    diff_refine_junction,
    diff_snap_line,
    lift_segment,
    lower_segment,
)
from glyphkit.geometry import Cubic, Line
from glyphkit.labels import AlignLabel, ContinuityLabel
from glyphkit.refine import RefineError, refine_continuity_junction, snap_alignment
from glyphkit.synth import random_cubic_pair, random_line, random_line_curve_pair

PREV = Cubic((-3, 0), (-2.5, 0.5), (-2, 0), (0, 0))
NEXT = Cubic((0, 0), (0.6, 0.8), (1.5, 1.0), (2.0, 1.0))


def seg_points(seg):
    return (seg.a, seg.b) if isinstance(seg, Line) else (seg.p1, seg.p2, seg.p3, seg.p4)


def logits_for(tape, label):
    vals = [0.0, 0.0, 0.0]
    vals[int(label)] = 4.0
    return [tape.leaf(v) for v in vals]


class TestForwardEquivalence:
    def test_identity_branch(self):
        tape = Tape()
        dp, dn = lift_segment(tape, PREV), lift_segment(tape, NEXT)
        rp, rn = diff_refine_junction(dp, dn, logits_for(tape, ContinuityLabel.C0))
        assert lower_segment(rp) == PREV
        assert lower_segment(rn) == NEXT

    @pytest.mark.parametrize("label", [ContinuityLabel.G1, ContinuityLabel.C1])
    def test_example_junction_bitwise(self, label):
        plain = refine_continuity_junction(PREV, NEXT, label)
        tape = Tape()
        dp, dn = lift_segment(tape, PREV), lift_segment(tape, NEXT)
        rp, rn = diff_refine_junction(dp, dn, logits_for(tape, label))
        assert seg_points(lower_segment(rp)) == seg_points(plain[0])
        assert seg_points(lower_segment(rn)) == seg_points(plain[1])

    def test_random_junctions_bitwise(self):
        rng = random.Random(41)
        for _ in range(100):
            prev, nxt = (
                random_cubic_pair(rng) if rng.random() < 0.5 else random_line_curve_pair(rng)
            )
            label = ContinuityLabel(rng.randrange(3))
            plain = refine_continuity_junction(prev, nxt, label)
            tape = Tape()
            dp, dn = lift_segment(tape, prev), lift_segment(tape, nxt)
            rp, rn = diff_refine_junction(dp, dn, logits_for(tape, label))
            assert seg_points(lower_segment(rp)) == seg_points(plain[0])
            assert seg_points(lower_segment(rn)) == seg_points(plain[1])

    def test_snap_bitwise(self):
        rng = random.Random(42)
        for _ in range(100):
            line = random_line(rng)
            label = AlignLabel(rng.randrange(3))
            plain = snap_alignment(line, label)
            tape = Tape()
            dl = lift_segment(tape, line)
            out = diff_snap_line(dl, logits_for(tape, label))
            assert seg_points(lower_segment(out)) == seg_points(plain)

    def test_snap_h_example(self):
        tape = Tape()
        dl = lift_segment(tape, Line((0, 1), (10, 3)))
        out = diff_snap_line(dl, logits_for(tape, AlignLabel.H))
        assert lower_segment(out) == Line((0.0, 2.0), (10.0, 2.0))


class TestGradients:
    def test_c1_control_point_gradient_matches_fd(self):
        # d(next p2'_x)/d(next p2_x) under hard C1 selection
        from glyphkit.diffrefine import DiffCubic

        def fn(xs):
            tape = xs[0].tape
            dp = lift_segment(tape, PREV)
            dn = DiffCubic(
                (tape.leaf(NEXT.p1[0]), tape.leaf(NEXT.p1[1])),
                (xs[0], xs[1]),
                (tape.leaf(NEXT.p3[0]), tape.leaf(NEXT.p3[1])),
                (tape.leaf(NEXT.p4[0]), tape.leaf(NEXT.p4[1])),
            )
            rp, rn = diff_refine_junction(dp, dn, logits_for(tape, ContinuityLabel.C1))
            return rn.p2[0]

        def plain(vals):
            nxt = Cubic(NEXT.p1, (vals[0], vals[1]), NEXT.p3, NEXT.p4)
            _, rn = refine_continuity_junction(PREV, nxt, ContinuityLabel.C1)
            return rn.p2[0]

        report = gradcheck(fn, [NEXT.p2[0], NEXT.p2[1]], step=1e-6, tolerance=1e-4, plain_fn=plain)
        assert report.passed, report.max_rel_error

    def test_snap_mean_gradient(self):
        tape = Tape()
        ys = tape.leaf(1.0)
        ye = tape.leaf(3.0)
        line = DiffLine((tape.leaf(0.0), ys), (tape.leaf(10.0), ye))
        out = diff_snap_line(line, logits_for(tape, AlignLabel.H))
        grads = backward(tape, out.a[1])
        assert grads[ys.index] == pytest.approx(0.5)
        assert grads[ye.index] == pytest.approx(0.5)

    def test_soft_branch_grads_match_mixture_fd(self):
        line = Line((0.2, 1.0), (7.0, 3.0))
        lvals = [0.4, -0.1, 0.2]
        weights = [1.1, 0.7, 1.3, 0.9]

        def fn(xs):
            tape = xs[0].tape
            dl = DiffLine((xs[0], xs[1]), (xs[2], xs[3]))
            logits = [tape.leaf(v) for v in lvals]
            out = diff_snap_line(dl, logits, soft_branch_grads=True)
            flat = [out.a[0], out.a[1], out.b[0], out.b[1]]
            acc = flat[0] * weights[0]
            for v, w in zip(flat[1:], weights[1:]):
                acc = acc + v * w
            return acc

        def mixture(vals):
            l = Line((vals[0], vals[1]), (vals[2], vals[3]))
            mx = max(lvals)
            exps = [math.exp(v - mx) for v in lvals]
            z = sum(exps)
            scalars = []
            for label in (AlignLabel.H, AlignLabel.V, AlignLabel.NONE):
                s = snap_alignment(l, label)
                flat = [s.a[0], s.a[1], s.b[0], s.b[1]]
                scalars.append(sum(v * w for v, w in zip(flat, weights)))
            return sum((e / z) * s for e, s in zip(exps, scalars))

        report = gradcheck(
            fn, [line.a[0], line.a[1], line.b[0], line.b[1]],
            step=1e-6, tolerance=1e-4, plain_fn=mixture,
        )
        assert report.passed, report.max_rel_error


class TestLineLineAndErrors:
    def test_line_line_identity_when_c0_selected(self):
        tape = Tape()
        dp = lift_segment(tape, Line((-1, 0), (0, 0)))
        dn = lift_segment(tape, Line((0, 0), (1, 0)))
        rp, rn = diff_refine_junction(dp, dn, logits_for(tape, ContinuityLabel.C0))
        assert rp is dp and rn is dn

    def test_line_line_higher_label_rejected(self):
        tape = Tape()
        dp = lift_segment(tape, Line((-1, 0), (0, 0)))
        dn = lift_segment(tape, Line((0, 0), (1, 0)))
        with pytest.raises(RefineError, match="C0 by construction"):
            diff_refine_junction(dp, dn, logits_for(tape, ContinuityLabel.G1))

    def test_tie_rejected(self):
        tape = Tape()
        dp, dn = lift_segment(tape, PREV), lift_segment(tape, NEXT)
        logits = tape.leaves([1.0, 1.0, 0.0])
        with pytest.raises(SteTieError):
            diff_refine_junction(dp, dn, logits)

    def test_logit_count_validated(self):
        tape = Tape()
        dp, dn = lift_segment(tape, PREV), lift_segment(tape, NEXT)
        with pytest.raises(ValueError):
            diff_refine_junction(dp, dn, tape.leaves([1.0, 0.0]))

    def test_degenerate_geometry_rejected(self):
        prev = Cubic((-2, 0), (-1, 0), (0, 0), (0, 0))
        nxt = Cubic((0, 0), (1, 0), (2, 0), (3, 0))
        tape = Tape()
        dp, dn = lift_segment(tape, prev), lift_segment(tape, nxt)
        with pytest.raises(RefineError, match="degenerate"):
            diff_refine_junction(dp, dn, logits_for(tape, ContinuityLabel.C0))
