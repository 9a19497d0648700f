"""Batch command line: normalize, label, refine, metrics, gradcheck.

Exit codes: 0 success, 1 usage, 2 parse failure (with record locus),
3 validation failure, 4 metric pairing failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from . import metrics as met
from .autodiff import gradcheck
from .config import Config, ConfigError, config_to_dict, load_config
from .corpus import (
    CorpusFormatError,
    CorpusLabels,
    CorpusRecord,
    glyph_to_paths,
    load_corpus,
    load_predictions,
    record_to_glyph,
    save_corpus,
)
from .diffrefine import (
    DiffCubic,
    DiffLine,
    diff_refine_junction,
    diff_snap_line,
    lift_segment,
)
from .geometry import Cubic, Line, segment_of
from .labels import AlignLabel, ContinuityLabel, label_glyph
from .losses import (
    LossComponents,
    LossWeights,
    kl_gaussian,
    loss_alignment,
    loss_args,
    loss_aux_render,
    loss_cmd,
    loss_consistency,
    loss_continuity,
    loss_visibility,
    total_loss,
)
from .model import normalize_glyph
from .pathdata import ParseError
from .raster import rasterize
from .refine import refine_continuity_junction, refine_glyph, snap_alignment
from .synth import (
    random_cubic_pair,
    random_line,
    random_line_curve_pair,
    random_simplex,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PAIRING = 4

MEAN_ROW_ID = "__corpus_mean__"


class _UsageError(Exception):
    pass


class _PairingError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # do not sys.exit(2); map to exit code 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="glyphkit", description=__doc__)
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--confidence", type=float, help="refinement gate (default 0.75)")
    p.add_argument("--resolution", type=int, help="raster resolution (default 128)")
    p.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    p.add_argument(
        "--print-config", action="store_true", help="dump effective settings as JSON"
    )
    sub = p.add_subparsers(dest="command")

    sp = sub.add_parser("normalize", help="EM-normalize and recenter a corpus")
    sp.add_argument("corpus_in")
    sp.add_argument("corpus_out")

    sp = sub.add_parser("label", help="attach ground-truth labels to a corpus")
    sp.add_argument("corpus_in")
    sp.add_argument("corpus_out")

    sp = sub.add_parser("refine", help="apply confidence-gated refinement")
    sp.add_argument("corpus_in")
    sp.add_argument("corpus_out")
    sp.add_argument(
        "--predictions",
        metavar="PATH",
        help="prediction file; omitted = oracle mode (one-hot ground truth)",
    )

    sp = sub.add_parser("metrics", help="compare two corpora glyph by glyph")
    sp.add_argument("corpus_a")
    sp.add_argument("corpus_b")
    sp.add_argument("report_out")

    sp = sub.add_parser("gradcheck", help="finite-difference check of the gradients")
    sp.add_argument("--count", type=int, default=1000)

    return p


def _record_glyph(index: int, rec: CorpusRecord):
    try:
        return record_to_glyph(rec)
    except ParseError as exc:
        raise CorpusFormatError(index, "paths", str(exc)) from exc


def _require_normalized(index: int, rec: CorpusRecord) -> None:
    if rec.units_per_em != 1.0:
        raise ValueError(
            f"record {index} ({rec.font_id}/{rec.glyph_id}): corpus must be "
            "EM-normalized first (units_per_em == 1.0); run the normalize command"
        )


def _cmd_normalize(args, cfg: Config) -> int:
    records = load_corpus(args.corpus_in)
    out = []
    for i, rec in enumerate(records):
        glyph = _record_glyph(i, rec)
        normalized = normalize_glyph(glyph)
        out.append(
            CorpusRecord(
                rec.font_id,
                rec.glyph_id,
                1.0,
                glyph_to_paths(normalized, cfg.output_precision),
                labels=None,
            )
        )
    save_corpus(out, args.corpus_out)
    return EXIT_OK


def _cmd_label(args, cfg: Config) -> int:
    records = load_corpus(args.corpus_in)
    out = []
    for i, rec in enumerate(records):
        _require_normalized(i, rec)
        glyph = _record_glyph(i, rec)
        junctions, aligns = label_glyph(glyph, cfg.thresholds)
        out.append(
            CorpusRecord(
                rec.font_id,
                rec.glyph_id,
                rec.units_per_em,
                rec.paths,
                labels=CorpusLabels(
                    tuple(int(v) for v in junctions), tuple(int(v) for v in aligns)
                ),
            )
        )
    save_corpus(out, args.corpus_out)
    return EXIT_OK


def _one_hot(index: int) -> tuple[float, float, float]:
    row = [0.0, 0.0, 0.0]
    row[index] = 1.0
    return tuple(row)


def _cmd_refine(args, cfg: Config, confidence: float) -> int:
    records = load_corpus(args.corpus_in)
    preds = None
    if args.predictions:
        preds = {
            (p.font_id, p.glyph_id): p for p in load_predictions(args.predictions)
        }
    out = []
    skipped_total = 0
    for i, rec in enumerate(records):
        _require_normalized(i, rec)
        glyph = _record_glyph(i, rec)
        if preds is not None:
            key = (rec.font_id, rec.glyph_id)
            if key not in preds:
                raise ValueError(f"record {i}: no predictions for {key}")
            junction_preds = [list(t) for t in preds[key].continuity]
            align_preds = [list(t) for t in preds[key].alignment]
        else:
            junctions, aligns = label_glyph(glyph, cfg.thresholds)
            junction_preds = [list(_one_hot(int(v))) for v in junctions]
            align_preds = [list(_one_hot(int(v))) for v in aligns]
        result = refine_glyph(glyph, junction_preds, align_preds, confidence)
        skipped_total += len(result.skipped)
        out.append(
            CorpusRecord(
                rec.font_id,
                rec.glyph_id,
                rec.units_per_em,
                glyph_to_paths(result.glyph, cfg.output_precision),
                labels=None,
            )
        )
    if skipped_total:
        print(f"refine: skipped {skipped_total} unrepairable junction(s)", file=sys.stderr)
    save_corpus(out, args.corpus_out)
    return EXIT_OK


def _cmd_metrics(args, cfg: Config, resolution: int) -> int:
    recs_a = load_corpus(args.corpus_a)
    recs_b = load_corpus(args.corpus_b)
    by_key_b = {(r.font_id, r.glyph_id): (i, r) for i, r in enumerate(recs_b)}
    keys_a = [(r.font_id, r.glyph_id) for r in recs_a]
    missing = [k for k in keys_a if k not in by_key_b]
    extra = [k for k in by_key_b if k not in set(keys_a)]
    if missing or extra:
        raise _PairingError(
            f"unpaired records: missing from B {missing[:5]}, extra in B {extra[:5]}"
        )

    rows = []
    for i, rec_a in enumerate(recs_a):
        _require_normalized(i, rec_a)
        j, rec_b = by_key_b[(rec_a.font_id, rec_a.glyph_id)]
        _require_normalized(j, rec_b)
        ga = _record_glyph(i, rec_a)
        gb = _record_glyph(j, rec_b)
        grid_a = rasterize(ga, resolution, cfg.raster.fill_rule, cfg.raster.view_box)
        grid_b = rasterize(gb, resolution, cfg.raster.fill_rule, cfg.raster.view_box)
        la_j, la_a = label_glyph(ga, cfg.thresholds)
        lb_j, lb_a = label_glyph(gb, cfg.thresholds)
        acc_cont = (
            met.accuracy_continuity(lb_j, la_j) if la_j and len(la_j) == len(lb_j) else None
        )
        acc_align = (
            met.accuracy_alignment(lb_a, la_a) if la_a and len(la_a) == len(lb_a) else None
        )
        rows.append(
            {
                "font_id": rec_a.font_id,
                "glyph_id": rec_a.glyph_id,
                "iou": met.iou(grid_a, grid_b),
                "l1": met.l1_image(grid_a, grid_b),
                "re": met.chamfer_re(
                    ga, gb, cfg.chamfer.n_per_segment, cfg.chamfer.arclength
                ),
                "acc_cont": acc_cont,
                "acc_align": acc_align,
            }
        )

    def mean_of(field):
        vals = [r[field] for r in rows if r[field] is not None]
        return sum(vals) / len(vals) if vals else None

    mean_row = {
        "font_id": MEAN_ROW_ID,
        "glyph_id": MEAN_ROW_ID,
        "iou": mean_of("iou"),
        "l1": mean_of("l1"),
        "re": mean_of("re"),
        "acc_cont": mean_of("acc_cont"),
        "acc_align": mean_of("acc_align"),
    }
    with open(args.report_out, "w", encoding="utf-8") as fh:
        for row in rows + [mean_row]:
            fh.write(json.dumps(row) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gradient-check suite


def _wsum(values, weights):
    acc = values[0] * weights[0]
    for v, w in zip(values[1:], weights[1:]):
        acc = acc + v * w
    return acc


def _flat_segment(seg) -> list[float]:
    if isinstance(seg, Line):
        return [seg.a[0], seg.a[1], seg.b[0], seg.b[1]]
    return [v for pt in (seg.p1, seg.p2, seg.p3, seg.p4) for v in pt]


def _flat_diffseg(seg) -> list:
    pts = (seg.a, seg.b) if isinstance(seg, DiffLine) else (seg.p1, seg.p2, seg.p3, seg.p4)
    return [v for pt in pts for v in pt]


def _softmax_floats(values, temperature):
    import math

    top = max(values)
    exps = [math.exp((v - top) / temperature) for v in values]
    z = sum(exps)
    return [e / z for e in exps]


def _junction_branch_scalars(prev, nxt, weights) -> list[float]:
    """Weighted-sum scalar of each refinement branch, in plain floats."""
    out = []
    for label in (ContinuityLabel.C0, ContinuityLabel.G1, ContinuityLabel.C1):
        rp, rn = refine_continuity_junction(prev, nxt, label)
        out.append(_wsum(_flat_segment(rp) + _flat_segment(rn), weights))
    return out


def _snap_branch_scalars(line, weights) -> list[float]:
    out = []
    for label in (AlignLabel.H, AlignLabel.V, AlignLabel.NONE):
        snapped = snap_alignment(line, label)
        out.append(_wsum(_flat_segment(snapped), weights))
    return out


def _logits_with_margin(rng, margin: float = 0.1) -> list[float]:
    while True:
        ls = [rng.uniform(-1.0, 1.0) for _ in range(3)]
        top, second = sorted(ls)[-1], sorted(ls)[-2]
        if top - second >= margin:
            return ls


@dataclass
class GradSuiteResult:
    passed: int
    total: int

    @property
    def rate(self) -> float:
        return self.passed / self.total if self.total else 0.0


def _pack_junction(prev, nxt):
    """Independent coordinates of a junction pair, with the shared point once.

    Returns the flat input list and a rebuild function parameterized by the
    segment classes, so the same packing serves plain and DiffValue modes.
    """
    jx, jy = prev.b if isinstance(prev, Line) else prev.p4
    if isinstance(prev, Line):
        head = [prev.a[0], prev.a[1]]
    else:
        head = [v for pt in (prev.p1, prev.p2, prev.p3) for v in pt]
    if isinstance(nxt, Line):
        tail = [nxt.b[0], nxt.b[1]]
    else:
        tail = [v for pt in (nxt.p2, nxt.p3, nxt.p4) for v in pt]
    inputs = head + [jx, jy] + tail
    n_head = len(head)
    prev_is_line = isinstance(prev, Line)
    next_is_line = isinstance(nxt, Line)

    def rebuild(vals, line_cls, cubic_cls):
        j = (vals[n_head], vals[n_head + 1])
        if prev_is_line:
            p = line_cls((vals[0], vals[1]), j)
        else:
            p = cubic_cls(
                (vals[0], vals[1]), (vals[2], vals[3]), (vals[4], vals[5]), j
            )
        t = vals[n_head + 2 :]
        if next_is_line:
            n = line_cls(j, (t[0], t[1]))
        else:
            n = cubic_cls(j, (t[0], t[1]), (t[2], t[3]), (t[4], t[5]))
        return p, n

    return inputs, rebuild


def _make_junction_checks(rng, cfg: Config, line_curve: bool):
    prev, nxt = (
        random_line_curve_pair(rng) if line_curve else random_cubic_pair(rng)
    )
    logits = _logits_with_margin(rng)
    n_out = len(_flat_segment(prev)) + len(_flat_segment(nxt))
    weights = [rng.uniform(0.5, 1.5) for _ in range(n_out)]
    inputs, rebuild = _pack_junction(prev, nxt)
    temp = cfg.ste.temperature
    soft = cfg.ste.soft_branch_grads

    def fn_geom(xs):
        tape = xs[0].tape
        dprev, dnxt = rebuild(xs, DiffLine, DiffCubic)
        dlogits = [tape.leaf(v) for v in logits]
        rp, rn = diff_refine_junction(dprev, dnxt, dlogits, temp, soft)
        return _wsum(_flat_diffseg(rp) + _flat_diffseg(rn), weights)

    def plain_geom(vals):
        p, n = rebuild(vals, Line, Cubic)
        if soft:
            sig = _softmax_floats(logits, temp)
            scalars = _junction_branch_scalars(p, n, weights)
            return sum(s * b for s, b in zip(sig, scalars))
        label = ContinuityLabel(logits.index(max(logits)))
        rp, rn = refine_continuity_junction(p, n, label)
        return _wsum(_flat_segment(rp) + _flat_segment(rn), weights)

    def fn_logit(ls):
        tape = ls[0].tape
        dprev = lift_segment(tape, prev)
        dnxt = lift_segment(tape, nxt)
        rp, rn = diff_refine_junction(dprev, dnxt, list(ls), temp, soft)
        return _wsum(_flat_diffseg(rp) + _flat_diffseg(rn), weights)

    def plain_logit(ls):
        sig = _softmax_floats(ls, temp)
        scalars = _junction_branch_scalars(prev, nxt, weights)
        return sum(s * b for s, b in zip(sig, scalars))

    return [(fn_geom, inputs, plain_geom), (fn_logit, logits, plain_logit)]


def _make_snap_checks(rng, cfg: Config):
    line = random_line(rng)
    logits = _logits_with_margin(rng)
    weights = [rng.uniform(0.5, 1.5) for _ in range(4)]
    temp = cfg.ste.temperature
    soft = cfg.ste.soft_branch_grads

    def fn_geom(xs):
        tape = xs[0].tape
        dline = DiffLine((xs[0], xs[1]), (xs[2], xs[3]))
        dlogits = [tape.leaf(v) for v in logits]
        out = diff_snap_line(dline, dlogits, temp, soft)
        return _wsum(_flat_diffseg(out), weights)

    def plain_geom(vals):
        l = Line((vals[0], vals[1]), (vals[2], vals[3]))
        if soft:
            sig = _softmax_floats(logits, temp)
            return sum(s * b for s, b in zip(sig, _snap_branch_scalars(l, weights)))
        label = AlignLabel(logits.index(max(logits)))
        return _wsum(_flat_segment(snap_alignment(l, label)), weights)

    def fn_logit(ls):
        tape = ls[0].tape
        dline = lift_segment(tape, line)
        out = diff_snap_line(dline, list(ls), temp, soft)
        return _wsum(_flat_diffseg(out), weights)

    def plain_logit(ls):
        sig = _softmax_floats(ls, temp)
        return sum(s * b for s, b in zip(sig, _snap_branch_scalars(line, weights)))

    return [(fn_geom, _flat_segment(line), plain_geom), (fn_logit, logits, plain_logit)]


def _make_loss_check(rng, cfg: Config, which: int):
    kind = which % 9
    if kind == 0:  # continuity CE over 2 junctions
        labels = [rng.randrange(3) for _ in range(2)]
        probs = random_simplex(rng) + random_simplex(rng)

        def fn(xs):
            return loss_continuity([xs[0:3], xs[3:6]], labels, cfg.cost_matrix)

        return fn, probs
    if kind == 1:  # alignment CE
        labels = [rng.randrange(3) for _ in range(2)]
        probs = random_simplex(rng) + random_simplex(rng)

        def fn(xs):
            return loss_alignment([xs[0:3], xs[3:6]], labels)

        return fn, probs
    if kind == 2:  # consistency over explicit junction pairs
        vals = [rng.uniform(-0.5, 0.5) for _ in range(8)]

        def fn(xs):
            pairs = [((xs[0], xs[1]), (xs[2], xs[3])), ((xs[4], xs[5]), (xs[6], xs[7]))]
            return loss_consistency(pairs)

        return fn, vals
    if kind == 3:  # masked argument regression, gaps away from |.|'s kink
        gt = [rng.uniform(-0.5, 0.5) for _ in range(6)]
        pred = [g + rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 0.4) for g in gt]
        mask = [1, 1, 0, 1, 0, 1]

        def fn(xs):
            return loss_args(list(xs), gt, mask)

        return fn, pred
    if kind == 4:  # command-kind CE
        kinds = [rng.randrange(4)]
        probs = random_simplex(rng, 4)

        def fn(xs):
            return loss_cmd([xs], kinds)

        return fn, probs
    if kind == 5:  # visibility BCE
        flags = [rng.randrange(2) for _ in range(3)]
        probs = [rng.uniform(0.1, 0.9) for _ in range(3)]

        def fn(xs):
            return loss_visibility(list(xs), flags)

        return fn, probs
    if kind == 6:  # auxiliary point matching between two segments
        gt_line = random_line(rng)
        pred = [rng.uniform(-0.9, 0.9) for _ in range(8)]

        def fn(xs):
            seg = DiffCubic((xs[0], xs[1]), (xs[2], xs[3]), (xs[4], xs[5]), (xs[6], xs[7]))
            return loss_aux_render(seg, gt_line, n=5)

        return fn, pred
    if kind == 7:  # Gaussian KL
        mu = [rng.uniform(-1.0, 1.0) for _ in range(2)]
        sigma = [rng.uniform(0.5, 2.0) for _ in range(2)]

        def fn(xs):
            return kl_gaussian(xs[0:2], xs[2:4])

        return fn, mu + sigma
    # kind == 8: total loss over component scalars
    comps = [rng.uniform(0.0, 2.0) for _ in range(8)]
    step = rng.randrange(0, 20000)
    weights = cfg.loss_weights

    def fn(xs):
        c = LossComponents(*xs)
        return total_loss(c, weights, step)

    return fn, comps


def gradcheck_suite(seed: int, count: int, cfg: Config) -> GradSuiteResult:
    """Run ``count`` randomized gradient checks over the differentiable pipeline.

    Sites rotate over curve-curve junctions, line-curve junctions, line
    snapping (geometry and logit gradients checked separately; logit
    gradients are checked against the softmax relaxation) and every loss
    term. Argmax ties and degenerate geometry are rejected at sampling time.
    """
    rng = random.Random(seed)
    pending = []
    cycle = 0
    loss_counter = 0
    while len(pending) < count:
        kind = cycle % 5
        cycle += 1
        if kind == 0:
            pending.extend(_make_junction_checks(rng, cfg, line_curve=False))
        elif kind == 1:
            pending.extend(_make_junction_checks(rng, cfg, line_curve=True))
        elif kind == 2:
            pending.extend(_make_snap_checks(rng, cfg))
        else:
            fn, inputs = _make_loss_check(rng, cfg, loss_counter)
            loss_counter += 1
            pending.append((fn, inputs, None))
    pending = pending[:count]

    passed = 0
    for fn, inputs, plain in pending:
        report = gradcheck(fn, inputs, step=1e-6, tolerance=1e-4, plain_fn=plain)
        if report.passed:
            passed += 1
    return GradSuiteResult(passed=passed, total=len(pending))


def _cmd_gradcheck(args, cfg: Config) -> int:
    result = gradcheck_suite(args.seed, args.count, cfg)
    print(
        f"gradcheck: passed {result.passed}/{result.total} "
        f"(rate {result.rate:.4f}, seed {args.seed})"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        cfg = load_config(args.config)
        confidence = args.confidence if args.confidence is not None else cfg.confidence
        resolution = args.resolution if args.resolution is not None else cfg.raster.resolution
        if not 0.0 <= confidence <= 1.0:
            raise ConfigError("confidence must be in [0, 1]")
        if resolution < 8:
            raise ConfigError("resolution must be at least 8")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.print_config:
        effective = config_to_dict(cfg)
        effective["confidence"] = confidence
        effective["raster"]["resolution"] = resolution
        print(json.dumps(effective, indent=2))
        if args.command is None:
            return EXIT_OK
    if args.command is None:
        print("usage error: a subcommand is required", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "normalize":
            return _cmd_normalize(args, cfg)
        if args.command == "label":
            return _cmd_label(args, cfg)
        if args.command == "refine":
            return _cmd_refine(args, cfg, confidence)
        if args.command == "metrics":
            return _cmd_metrics(args, cfg, resolution)
        if args.command == "gradcheck":
            return _cmd_gradcheck(args, cfg)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusFormatError, ParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _PairingError as exc:
        print(f"pairing error: {exc}", file=sys.stderr)
        return EXIT_PAIRING
    except (ValueError, OSError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
