import math
import random

import pytest

from glyphkit.geometry import Cubic, Line, junction_tangents
from glyphkit.labels import (
    AlignLabel,
    ContinuityLabel,
    Thresholds,
    classify_junction,
    label_glyph,
)
from glyphkit.model import Command, CommandKind, Glyph, Path, validate_glyph
from glyphkit.refine import (
    RefineError,
    refine_continuity_junction,
    refine_glyph,
    snap_alignment,
)
from glyphkit.synth import random_cubic_pair, random_line_curve_pair

PREV = Cubic((-3, 0), (-2.5, 0.5), (-2, 0), (0, 0))
NEXT = Cubic((0, 0), (0.6, 0.8), (1.5, 1.0), (2.0, 1.0))


def seg_points(seg):
    return (seg.a, seg.b) if isinstance(seg, Line) else (seg.p1, seg.p2, seg.p3, seg.p4)


def kind_of(seg):
    return CommandKind.LINE_FROM_TO if isinstance(seg, Line) else CommandKind.CURVE_FROM_TO


def classify_pair(prev, nxt):
    return classify_junction(
        junction_tangents(prev, nxt), (kind_of(prev), kind_of(nxt))
    )


class TestCurveCurveRepair:
    def test_g1_example(self):
        rp, rn = refine_continuity_junction(PREV, NEXT, ContinuityLabel.G1)
        assert rp.p3 == pytest.approx((-1.7888543819998317, -0.8944271909999159), abs=1e-12)
        assert rn.p2 == pytest.approx((0.8944271909999159, 0.4472135954999579), abs=1e-12)
        assert classify_pair(rp, rn) >= ContinuityLabel.G1

    def test_c1_example(self):
        rp, rn = refine_continuity_junction(PREV, NEXT, ContinuityLabel.C1)
        assert rp.p3 == pytest.approx((-1.3416407864998738, -0.6708203932499369), abs=1e-12)
        assert rn.p2 == pytest.approx((1.3416407864998738, 0.6708203932499369), abs=1e-12)
        assert classify_pair(rp, rn) == ContinuityLabel.C1

    def test_c0_is_identity(self):
        rp, rn = refine_continuity_junction(PREV, NEXT, ContinuityLabel.C0)
        assert rp == PREV and rn == NEXT

    def test_already_c1_fixed_point(self):
        prev = Cubic((-2, 0), (-1.5, 0.4), (-1, 0), (0, 0))
        nxt = Cubic((0, 0), (1, 0), (2, 0.4), (2.5, 0))
        rp, rn = refine_continuity_junction(prev, nxt, ContinuityLabel.C1)
        for a, b in zip(seg_points(rp), seg_points(prev)):
            assert math.dist(a, b) <= 1e-12
        for a, b in zip(seg_points(rn), seg_points(nxt)):
            assert math.dist(a, b) <= 1e-12

    def test_endpoints_never_move(self):
        rng = random.Random(21)
        for _ in range(100):
            prev, nxt = random_cubic_pair(rng)
            for label in (ContinuityLabel.G1, ContinuityLabel.C1):
                rp, rn = refine_continuity_junction(prev, nxt, label)
                assert rp.p1 == prev.p1 and rp.p2 == prev.p2 and rp.p4 == prev.p4
                assert rn.p1 == nxt.p1 and rn.p3 == nxt.p3 and rn.p4 == nxt.p4

    def test_guarantee_label_at_least_requested(self):
        rng = random.Random(22)
        for _ in range(300):
            prev, nxt = random_cubic_pair(rng)
            for label in ContinuityLabel:
                rp, rn = refine_continuity_junction(prev, nxt, label)
                assert classify_pair(rp, rn) >= label

    def test_idempotence(self):
        rng = random.Random(23)
        for _ in range(200):
            prev, nxt = random_cubic_pair(rng)
            for label in (ContinuityLabel.G1, ContinuityLabel.C1):
                once = refine_continuity_junction(prev, nxt, label)
                twice = refine_continuity_junction(*once, label)
                for sa, sb in zip(once, twice):
                    for a, b in zip(seg_points(sa), seg_points(sb)):
                        assert math.dist(a, b) <= 1e-9

    def test_c1_mirror_symmetry(self):
        def reverse(c: Cubic) -> Cubic:
            return Cubic(c.p4, c.p3, c.p2, c.p1)

        rp, rn = refine_continuity_junction(PREV, NEXT, ContinuityLabel.C1)
        # traversing the junction backwards mirrors the roles of the two curves
        rp2, rn2 = refine_continuity_junction(reverse(NEXT), reverse(PREV), ContinuityLabel.C1)
        assert rp2.p3 == pytest.approx(rn.p2, abs=1e-12)
        assert rn2.p2 == pytest.approx(rp.p3, abs=1e-12)

    def test_line_line_rejected(self):
        with pytest.raises(RefineError, match="C0 by construction"):
            refine_continuity_junction(
                Line((-1, 0), (0, 0)), Line((0, 0), (1, 0)), ContinuityLabel.G1
            )

    def test_antiparallel_rejected(self):
        prev = Cubic((-2, 0), (-1.5, 0), (-1, 0), (0, 0))
        nxt = Cubic((0, 0), (-1, 0), (-2, 1), (-3, 1))
        with pytest.raises(RefineError, match="bisector"):
            refine_continuity_junction(prev, nxt, ContinuityLabel.G1)

    def test_degenerate_tangent_rejected(self):
        prev = Cubic((-2, 0), (-1, 0), (0, 0), (0, 0))  # p3 == p4
        nxt = Cubic((0, 0), (1, 0), (2, 0), (3, 0))
        with pytest.raises(RefineError, match="degenerate"):
            refine_continuity_junction(prev, nxt, ContinuityLabel.G1)

    def test_mismatched_endpoints_rejected(self):
        nxt = Cubic((0.1, 0), (1, 0), (2, 0), (3, 0))
        with pytest.raises(RefineError, match="share an endpoint"):
            refine_continuity_junction(PREV, nxt, ContinuityLabel.C0)


class TestLineCurveRepair:
    def test_only_curve_side_moves(self):
        rng = random.Random(24)
        for _ in range(100):
            prev, nxt = random_line_curve_pair(rng)
            for label in (ContinuityLabel.G1, ContinuityLabel.C1):
                rp, rn = refine_continuity_junction(prev, nxt, label)
                if isinstance(prev, Line):
                    assert rp == prev
                else:
                    assert rn == nxt

    def test_g1_aligns_direction_c1_sets_length(self):
        line = Line((0, 0), (0, 2))  # travels +y, length 2
        curve = Cubic((0, 2), (0.3, 2.4), (1, 3), (2, 3))
        rp, rn = refine_continuity_junction(line, curve, ContinuityLabel.G1)
        tangent = (rn.p2[0] - rn.p1[0], rn.p2[1] - rn.p1[1])
        assert tangent[0] == pytest.approx(0.0, abs=1e-12)
        assert tangent[1] == pytest.approx(0.5, abs=1e-12)  # keeps magnitude

        rp, rn = refine_continuity_junction(line, curve, ContinuityLabel.C1)
        tangent = (rn.p2[0] - rn.p1[0], rn.p2[1] - rn.p1[1])
        assert tangent == pytest.approx((0.0, 2.0), abs=1e-12)  # line length

    def test_guarantee(self):
        rng = random.Random(25)
        for _ in range(200):
            prev, nxt = random_line_curve_pair(rng)
            for label in ContinuityLabel:
                rp, rn = refine_continuity_junction(prev, nxt, label)
                assert classify_pair(rp, rn) >= label


class TestSnapAlignment:
    def test_h_example(self):
        out = snap_alignment(Line((0, 1), (10, 3)), AlignLabel.H)
        assert out == Line((0, 2.0), (10, 2.0))

    def test_v_example(self):
        out = snap_alignment(Line((4, 0), (6, 9)), AlignLabel.V)
        assert out == Line((5.0, 0), (5.0, 9))

    def test_none_identity(self):
        line = Line((0.123, 4.56), (7.8, 9.0))
        assert snap_alignment(line, AlignLabel.NONE) == line

    def test_midpoint_and_other_axis_preserved_bitwise(self):
        rng = random.Random(26)
        for _ in range(200):
            a = (rng.uniform(-1, 1), rng.uniform(-1, 1))
            b = (rng.uniform(-1, 1), rng.uniform(-1, 1))
            out = snap_alignment(Line(a, b), AlignLabel.H)
            assert out.a[0] == a[0] and out.b[0] == b[0]
            assert out.a[1] == out.b[1] == (a[1] + b[1]) / 2
            # midpoint preserved exactly
            assert (out.a[1] + out.b[1]) / 2 == (out.a[1])
            out = snap_alignment(Line(a, b), AlignLabel.V)
            assert out.a[1] == a[1] and out.b[1] == b[1]
            assert out.a[0] == out.b[0] == (a[0] + b[0]) / 2


def glyph_coord_list(g):
    return [
        pt for path in g.paths for cmd in path.commands for pt in cmd.points
    ]


def uniform_preds(n):
    return [[1 / 3, 1 / 3, 1 / 3] for _ in range(n)]


class TestRefineGlyph:
    def test_uniform_predictions_identity(self, bundled_glyphs):
        for gid, g in bundled_glyphs.items():
            junctions, aligns = label_glyph(g)
            result = refine_glyph(
                g, uniform_preds(len(junctions)), uniform_preds(len(aligns)), 0.75
            )
            assert glyph_coord_list(result.glyph) == glyph_coord_list(g), gid
            assert result.skipped == ()

    def test_single_gated_junction_is_local(self, bundled_glyphs):
        g = bundled_glyphs["hook_c0"]
        preds = [[0.12, 0.12, 0.76]]
        result = refine_glyph(g, preds, [], 0.75)
        before = glyph_coord_list(g)
        after = glyph_coord_list(result.glyph)
        changed = [i for i, (a, b) in enumerate(zip(before, after)) if a != b]
        # commands: move(0..3), curve1(4..7), curve2(8..11); junction repair
        # may touch only curve1.p3 (index 6) and curve2.p2 (index 9)
        assert set(changed) <= {6, 9}
        assert changed, "gated junction should move control points"
        junctions, _ = label_glyph(result.glyph)
        assert junctions[0] == ContinuityLabel.C1

    def test_gated_snap_propagates_duplicates(self, bundled_glyphs):
        g = bundled_glyphs["zigzag"]
        junctions, aligns = label_glyph(g)
        align_preds = [[0.76, 0.12, 0.12], [1 / 3, 1 / 3, 1 / 3]]
        result = refine_glyph(g, uniform_preds(len(junctions)), align_preds, 0.75)
        rg = result.glyph
        line1 = rg.paths[0].commands[1]
        assert line1.p1[1] == line1.p4[1]  # snapped horizontal
        # duplicated junction coordinates follow the snap
        assert rg.paths[0].commands[0].p4 == line1.p1
        assert rg.paths[0].commands[0].p1 == line1.p1
        assert rg.paths[0].commands[2].p1 == line1.p4
        # second line keeps its own end point
        assert rg.paths[0].commands[2].p4 == g.paths[0].commands[2].p4
        assert validate_glyph(rg).is_valid

    def test_refined_glyph_stays_valid(self, bundled_glyphs):
        for gid, g in bundled_glyphs.items():
            junctions, aligns = label_glyph(g)
            jp = [[0.0, 0.0, 0.0] for _ in junctions]
            for row, lab in zip(jp, junctions):
                row[int(lab)] = 1.0
            ap = [[0.0, 0.0, 0.0] for _ in aligns]
            for row, lab in zip(ap, aligns):
                row[int(lab)] = 1.0
            result = refine_glyph(g, jp, ap, 0.75)
            assert validate_glyph(result.glyph).is_valid, gid
            assert result.skipped == (), gid

    def test_skipped_sites_reported(self):
        # cusp junction: anti-parallel tangents, G1 gated
        cmds = (
            Command.move((-2.0, 0.0)),
            Command.curve((-2.0, 0.0), (-1.5, 0.0), (-1.0, 0.0), (0.0, 0.0)),
            Command.curve((0.0, 0.0), (-1.0, 0.0), (-2.0, 1.0), (-3.0, 1.0)),
        )
        g = Glyph((Path(cmds),), units_per_em=1.0)
        result = refine_glyph(g, [[0.1, 0.8, 0.1]], [], 0.75)
        assert len(result.skipped) == 1
        assert "bisector" in result.skipped[0].reason
        assert glyph_coord_list(result.glyph) == glyph_coord_list(g)

    def test_length_mismatch_rejected(self, bundled_glyphs):
        g = bundled_glyphs["square"]
        with pytest.raises(ValueError, match="junction predictions"):
            refine_glyph(g, [], uniform_preds(4), 0.75)
        with pytest.raises(ValueError, match="alignment predictions"):
            refine_glyph(g, uniform_preds(4), [], 0.75)

    def test_invalid_distribution_rejected(self, bundled_glyphs):
        g = bundled_glyphs["square"]
        bad = [[0.5, 0.5, 0.5]] + uniform_preds(3)
        with pytest.raises(ValueError, match="sum"):
            refine_glyph(g, bad, uniform_preds(4), 0.75)

    def test_oracle_refine_square_skewed_snaps_exactly(self, bundled_glyphs):
        g = bundled_glyphs["square_skewed"]
        junctions, aligns = label_glyph(g)
        jp = [[1.0 if i == int(l) else 0.0 for i in range(3)] for l in junctions]
        ap = [[1.0 if i == int(l) else 0.0 for i in range(3)] for l in aligns]
        refined = refine_glyph(g, jp, ap, 0.75).glyph
        j2, a2 = label_glyph(refined)
        assert j2 == junctions
        assert a2 == aligns
        # snapped edges are exactly axis aligned
        e1 = refined.paths[0].commands[1]
        assert e1.p1[1] == e1.p4[1]
        e2 = refined.paths[0].commands[2]
        assert e2.p1[0] == e2.p4[0]
