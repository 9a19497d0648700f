"""Training-loss reference implementations as pure functions.

Every loss accepts plain floats or :class:`glyphkit.autodiff.DiffValue`
scalars, so gradients of each term can be verified with
:func:`glyphkit.autodiff.gradcheck`. Reductions run left to right for bit
reproducibility. Logs are clamped at ``EPS_LOG`` with a RuntimeWarning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from .autodiff import abs_, log_, value_of
from .labels import AlignLabel, ContinuityLabel
from .model import CommandKind, Path

__all__ = [
    "EPS_LOG",
    "CostMatrix",
    "LossWeights",
    "LossComponents",
    "loss_continuity",
    "loss_alignment",
    "loss_consistency",
    "loss_args",
    "loss_cmd",
    "loss_visibility",
    "loss_aux_render",
    "kl_gaussian",
    "total_loss",
]

EPS_LOG = 1e-12

_DEFAULT_ROWS = (
    (0.90, 0.08, 0.02),
    (0.05, 0.90, 0.05),
    (0.02, 0.08, 0.90),
)


@dataclass(frozen=True)
class CostMatrix:
    """3x3 misclassification weights, rows indexed by the true label.

    Rows are soft target distributions: each row sums to 1 and the far
    confusions (C0 vs C1) carry no more mass than any near confusion. Use
    ``validate=False`` to evaluate the cross-entropy formula with an
    arbitrary nonnegative matrix instead.
    """

    rows: tuple[tuple[float, float, float], ...] = _DEFAULT_ROWS
    validate: bool = True

    def __post_init__(self) -> None:
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise ValueError("cost matrix must be 3x3")
        rows = tuple(tuple(float(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for r in rows:
            for v in r:
                if v < 0:
                    raise ValueError("cost matrix entries must be nonnegative")
        if self.validate:
            for i, r in enumerate(rows):
                if abs(sum(r) - 1.0) > 1e-9:
                    raise ValueError(f"row {i} must sum to 1, got {sum(r)}")
            far = max(rows[0][2], rows[2][0])
            near = min(rows[0][1], rows[1][0], rows[1][2], rows[2][1])
            if far > near:
                raise ValueError("far confusions (C0/C1) must carry the least mass")

    def __getitem__(self, true_label: int) -> tuple[float, float, float]:
        return self.rows[int(true_label)]


@dataclass(frozen=True)
class LossWeights:
    """Term weights; the KL weight ramps linearly from 0 over the first steps."""

    lambda_cont: float = 1.0
    lambda_align: float = 1.0
    lambda_kl_end: float = 10.0
    kl_ramp_steps: int = 10_000

    def __post_init__(self) -> None:
        if self.lambda_cont < 0 or self.lambda_align < 0 or self.lambda_kl_end < 0:
            raise ValueError("loss weights must be nonnegative")
        if self.kl_ramp_steps < 1:
            raise ValueError("kl_ramp_steps must be at least 1")

    def kl_at(self, step: int) -> float:
        if step < 0:
            raise ValueError("step must be nonnegative")
        return min(step / self.kl_ramp_steps, 1.0) * self.lambda_kl_end


def _clamped_log(p, clamp_count: list[int]):
    if value_of(p) < EPS_LOG:
        clamp_count[0] += 1
        return log_(EPS_LOG)
    return log_(p)


def _warn_clamped(count: int, where: str) -> None:
    if count:
        warnings.warn(
            f"{where}: clamped {count} probabilities at {EPS_LOG}", RuntimeWarning
        )


def loss_continuity(
    probs: Sequence[Sequence],
    labels: Sequence[ContinuityLabel | int],
    cost_matrix: CostMatrix = CostMatrix(),
):
    """Cost-sensitive cross entropy: mean over junctions of -sum_c W[y][c] log p(c).

    With row-stochastic W the minimum over p is at p = W[y] and equals the
    row entropy.
    """
    if len(labels) < 1:
        raise ValueError("at least one junction required")
    if len(probs) != len(labels):
        raise ValueError("one distribution per junction required")
    clamps = [0]
    total = 0.0
    for p, y in zip(probs, labels):
        row = cost_matrix[int(y)]
        term = 0.0
        for c in range(3):
            if row[c] != 0.0:
                term = term + row[c] * _clamped_log(p[c], clamps)
        total = total - term
    _warn_clamped(clamps[0], "loss_continuity")
    return total / len(labels)


def loss_alignment(probs: Sequence[Sequence], labels: Sequence[AlignLabel | int]):
    """Mean cross entropy with hard alignment targets."""
    if len(labels) < 1:
        raise ValueError("at least one line required")
    if len(probs) != len(labels):
        raise ValueError("one distribution per line required")
    clamps = [0]
    total = 0.0
    for p, y in zip(probs, labels):
        total = total - _clamped_log(p[int(y)], clamps)
    _warn_clamped(clamps[0], "loss_alignment")
    return total / len(labels)


def loss_consistency(path):
    """Mean squared gap between duplicated junction coordinates.

    Accepts a :class:`glyphkit.model.Path` (pairs are formed from consecutive
    drawing commands) or an explicit sequence of ``(end_point, start_point)``
    pairs, e.g. with DiffValue coordinates.
    """
    if isinstance(path, Path):
        idx = path.drawing_indices()
        if len(idx) < 2:
            raise ValueError("path needs at least two drawing commands")
        pairs = [
            (path.commands[a].p4, path.commands[b].p1) for a, b in zip(idx, idx[1:])
        ]
    else:
        pairs = list(path)
        if not pairs:
            raise ValueError("at least one junction pair required")
    total = 0.0
    for pa, pb in pairs:
        dx = pb[0] - pa[0]
        dy = pb[1] - pa[1]
        total = total + (dx * dx + dy * dy)
    return total / len(pairs)


def _flatten(obj):
    if isinstance(obj, (list, tuple)):
        for item in obj:
            yield from _flatten(item)
    elif hasattr(obj, "ravel"):  # numpy arrays
        for item in obj.ravel().tolist():
            yield item
    else:
        yield obj


def loss_args(pred, gt, mask, squared: bool = False):
    """Masked mean coordinate error; 0 when the mask is all zero.

    Absolute error by default; ``squared`` switches to squared error.
    """
    p = list(_flatten(pred))
    g = list(_flatten(gt))
    m = list(_flatten(mask))
    if not len(p) == len(g) == len(m):
        raise ValueError("pred, gt, and mask must have equal sizes")
    denom = sum(float(v) for v in m)
    if denom == 0:
        return 0.0
    total = 0.0
    for pv, gv, mv in zip(p, g, m):
        if mv:
            diff = pv - gv
            total = total + (diff * diff if squared else abs_(diff))
    return total / denom


def loss_cmd(pred_probs: Sequence[Sequence], gt_kinds: Sequence[CommandKind | int]):
    """Mean cross entropy over command kinds."""
    if len(pred_probs) != len(gt_kinds) or len(gt_kinds) < 1:
        raise ValueError("one distribution per command slot required")
    clamps = [0]
    total = 0.0
    for p, k in zip(pred_probs, gt_kinds):
        total = total - _clamped_log(p[int(k)], clamps)
    _warn_clamped(clamps[0], "loss_cmd")
    return total / len(gt_kinds)


def loss_visibility(pred, flags):
    """Mean binary cross entropy on per-path visibility."""
    if len(pred) != len(flags) or len(flags) < 1:
        raise ValueError("one probability per path required")
    clamps = [0]
    total = 0.0
    for p, f in zip(pred, flags):
        if f:
            total = total - _clamped_log(p, clamps)
        else:
            total = total - _clamped_log(1.0 - p, clamps)
    _warn_clamped(clamps[0], "loss_visibility")
    return total / len(flags)


def _sample_generic(seg, n: int):
    """Parameter-uniform samples, generic over the scalar type."""
    ts = [i / (n - 1) for i in range(n)]
    if hasattr(seg, "p1"):  # cubic
        pts = []
        for t in ts:
            p1, p2, p3, p4 = seg.p1, seg.p2, seg.p3, seg.p4
            def lerp(a, b):
                return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)
            a, b, c = lerp(p1, p2), lerp(p2, p3), lerp(p3, p4)
            d, e = lerp(a, b), lerp(b, c)
            pts.append(lerp(d, e))
        return pts
    return [
        (seg.a[0] + (seg.b[0] - seg.a[0]) * t, seg.a[1] + (seg.b[1] - seg.a[1]) * t)
        for t in ts
    ]


def loss_aux_render(pred_seg, gt_seg, n: int = 8):
    """Mean squared distance between corresponding segment samples."""
    if n < 2:
        raise ValueError("sample count must be at least 2")
    ps = _sample_generic(pred_seg, n)
    gs = _sample_generic(gt_seg, n)
    total = 0.0
    for (px, py), (gx, gy) in zip(ps, gs):
        dx = px - gx
        dy = py - gy
        total = total + (dx * dx + dy * dy)
    return total / n


def kl_gaussian(mu: Sequence, sigma: Sequence):
    """KL divergence of a diagonal Gaussian from the unit isotropic prior."""
    if len(mu) != len(sigma):
        raise ValueError("mu and sigma must have equal length")
    total = 0.0
    for m, s in zip(mu, sigma):
        if value_of(s) <= 0:
            raise ValueError("sigma must be strictly positive")
        total = total + 0.5 * (m * m + s * s - 1.0 - 2.0 * log_(s))
    return total


@dataclass
class LossComponents:
    """The individual terms entering the total loss (any may be DiffValues)."""

    cmd: object = 0.0
    args: object = 0.0
    visibility: object = 0.0
    consistency: object = 0.0
    aux_render: object = 0.0
    kl: object = 0.0
    continuity: object = 0.0
    alignment: object = 0.0


def total_loss(components: LossComponents, weights: LossWeights, step: int):
    """Reconstruction terms (equal unit weights) plus the weighted extras.

    The KL weight follows the linear warm-up ``min(step/ramp, 1) * end``.
    """
    c = components
    rec = c.cmd + c.args + c.visibility + c.consistency + c.aux_render
    return (
        rec
        + weights.kl_at(step) * c.kl
        + weights.lambda_cont * c.continuity
        + weights.lambda_align * c.alignment
    )
