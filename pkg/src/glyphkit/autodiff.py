"""Minimal reverse-mode differentiation on scalars, plus straight-through selection.

A :class:`Tape` records elementary operations in topological order; each node
stores its parent node ids and the local partial derivatives, so
:func:`backward` is a single reverse sweep. :func:`ste_select` implements
hard selection with soft gradients: the forward value is the argmax branch
exactly, while the logits receive the gradient of the softmax-weighted
mixture of branch values. Gradients with respect to branch inputs flow only
through the selected branch by default (the selection weights keep their
hard forward values); set ``soft_branch_grads`` to weight them by the
softmax instead.

The module-level helpers (:func:`sqrt_`, :func:`log_`, ...) dispatch between
floats and :class:`DiffValue` so the same arithmetic code can run in plain
and differentiable mode, producing bit-identical forward values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

__all__ = [
    "AutodiffError",
    "SteTieError",
    "Tape",
    "DiffValue",
    "backward",
    "ste_select",
    "gradcheck",
    "GradcheckReport",
    "dot",
    "norm",
    "softmax",
    "value_of",
    "sqrt_",
    "exp_",
    "log_",
    "abs_",
]


class AutodiffError(ValueError):
    pass


class SteTieError(AutodiffError):
    """Exact tie in the selection argmax; the caller must perturb or resolve."""


class Tape:
    """Append-only record of a scalar computation."""

    __slots__ = ("_values", "_parents", "_partials")

    def __init__(self) -> None:
        self._values: list[float] = []
        self._parents: list[tuple[int, ...]] = []
        self._partials: list[tuple[float, ...]] = []

    def __len__(self) -> int:
        return len(self._values)

    def _record(
        self,
        value: float,
        parents: tuple[int, ...] = (),
        partials: tuple[float, ...] = (),
    ) -> "DiffValue":
        value = float(value)
        if not math.isfinite(value):
            raise AutodiffError(f"non-finite value {value!r} in computation")
        self._values.append(value)
        self._parents.append(parents)
        self._partials.append(partials)
        return DiffValue(self, len(self._values) - 1)

    def leaf(self, value: float) -> "DiffValue":
        """An input node (also used for constants; their gradient is 0)."""
        return self._record(value)

    def leaves(self, values: Sequence[float]) -> list["DiffValue"]:
        return [self.leaf(v) for v in values]


class DiffValue:
    """A scalar node on a tape."""

    __slots__ = ("tape", "index")

    def __init__(self, tape: Tape, index: int):
        self.tape = tape
        self.index = index

    @property
    def value(self) -> float:
        return self.tape._values[self.index]

    def __repr__(self) -> str:
        return f"DiffValue({self.value!r})"

    def _lift(self, other) -> "DiffValue":
        if isinstance(other, DiffValue):
            if other.tape is not self.tape:
                raise AutodiffError("operands recorded on different tapes")
            return other
        return self.tape.leaf(float(other))

    def __add__(self, other) -> "DiffValue":
        o = self._lift(other)
        return self.tape._record(self.value + o.value, (self.index, o.index), (1.0, 1.0))

    __radd__ = __add__

    def __sub__(self, other) -> "DiffValue":
        o = self._lift(other)
        return self.tape._record(self.value - o.value, (self.index, o.index), (1.0, -1.0))

    def __rsub__(self, other) -> "DiffValue":
        o = self._lift(other)
        return o.__sub__(self)

    def __mul__(self, other) -> "DiffValue":
        o = self._lift(other)
        return self.tape._record(
            self.value * o.value, (self.index, o.index), (o.value, self.value)
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DiffValue":
        o = self._lift(other)
        v = self.value / o.value
        return self.tape._record(
            v, (self.index, o.index), (1.0 / o.value, -v / o.value)
        )

    def __rtruediv__(self, other) -> "DiffValue":
        o = self._lift(other)
        return o.__truediv__(self)

    def __neg__(self) -> "DiffValue":
        return self.tape._record(-self.value, (self.index,), (-1.0,))

    def sqrt(self) -> "DiffValue":
        v = math.sqrt(self.value)
        d = 0.5 / v if v > 0.0 else math.inf
        return self.tape._record(v, (self.index,), (d,))

    def exp(self) -> "DiffValue":
        v = math.exp(self.value)
        return self.tape._record(v, (self.index,), (v,))

    def log(self) -> "DiffValue":
        return self.tape._record(math.log(self.value), (self.index,), (1.0 / self.value,))

    def __abs__(self) -> "DiffValue":
        sign = 1.0 if self.value >= 0 else -1.0
        return self.tape._record(abs(self.value), (self.index,), (sign,))


def backward(tape: Tape, output: DiffValue) -> list[float]:
    """Reverse accumulation; returns the gradient indexed by node id."""
    if output.tape is not tape:
        raise AutodiffError("output does not belong to this tape")
    grads = [0.0] * len(tape)
    grads[output.index] = 1.0
    parents, partials = tape._parents, tape._partials
    for i in range(output.index, -1, -1):
        g = grads[i]
        if g == 0.0:
            continue
        for p, d in zip(parents[i], partials[i]):
            grads[p] += g * d
    return grads


# ---------------------------------------------------------------------------
# float / DiffValue dual-mode helpers


def value_of(x) -> float:
    return x.value if isinstance(x, DiffValue) else float(x)


def sqrt_(x):
    return x.sqrt() if isinstance(x, DiffValue) else math.sqrt(x)


def exp_(x):
    return x.exp() if isinstance(x, DiffValue) else math.exp(x)


def log_(x):
    return x.log() if isinstance(x, DiffValue) else math.log(x)


def abs_(x):
    return abs(x)


def dot(xs: Sequence, ys: Sequence):
    if len(xs) != len(ys):
        raise ValueError("dot operands must have equal length")
    acc = xs[0] * ys[0]
    for a, b in zip(xs[1:], ys[1:]):
        acc = acc + a * b
    return acc


def norm(xs: Sequence):
    return sqrt_(dot(xs, xs))


def softmax(xs: Sequence, temperature: float = 1.0) -> list:
    """Softmax via the recorded exp/div primitives (max-shifted for stability)."""
    shift = max(value_of(x) for x in xs)
    exps = [exp_((x - shift) / temperature) for x in xs]
    total = exps[0]
    for e in exps[1:]:
        total = total + e
    return [e / total for e in exps]


# ---------------------------------------------------------------------------
# straight-through selection


def ste_select(
    logits: Sequence[DiffValue],
    branch_outputs: Sequence[Sequence[DiffValue]],
    temperature: float = 1.0,
    soft_branch_grads: bool = False,
) -> list[DiffValue]:
    """Select the argmax branch in the forward pass, softmax in the backward.

    Forward values equal ``branch_outputs[argmax(logits)]`` exactly. Logit
    gradients are those of ``sum_c softmax(logits)_c * branch_c`` evaluated at
    the forward branch values. Exact argmax ties raise :class:`SteTieError`.
    """
    k = len(logits)
    if k < 2:
        raise ValueError("ste_select needs at least two branches")
    if len(branch_outputs) != k:
        raise ValueError("one output vector per logit required")
    dim = len(branch_outputs[0])
    if dim < 1 or any(len(row) != dim for row in branch_outputs):
        raise ValueError("branch outputs must share one nonzero dimension")
    tape = logits[0].tape
    for l in logits:
        if l.tape is not tape:
            raise AutodiffError("logits recorded on different tapes")
    if temperature <= 0:
        raise ValueError("temperature must be positive")

    lv = [l.value for l in logits]
    top = max(lv)
    if lv.count(top) > 1:
        raise SteTieError("ambiguous selection: argmax of logits is tied")
    arg = lv.index(top)

    exps = [math.exp((v - top) / temperature) for v in lv]
    z = sum(exps)
    sig = [e / z for e in exps]
    bvals = [[value_of(b) for b in row] for row in branch_outputs]

    outputs: list[DiffValue] = []
    for j in range(dim):
        bbar = sum(sig[c] * bvals[c][j] for c in range(k))
        parents: list[int] = []
        partials: list[float] = []
        if soft_branch_grads:
            for c in range(k):
                parents.append(branch_outputs[c][j].index)
                partials.append(sig[c])
        else:
            parents.append(branch_outputs[arg][j].index)
            partials.append(1.0)
        for m in range(k):
            parents.append(logits[m].index)
            partials.append(sig[m] * (bvals[m][j] - bbar) / temperature)
        outputs.append(tape._record(bvals[arg][j], tuple(parents), tuple(partials)))
    return outputs


# ---------------------------------------------------------------------------
# gradient checking


@dataclass
class GradcheckReport:
    passed: bool
    max_rel_error: float
    analytic: list[float]
    numeric: list[float]


def _rel_error(a: float, b: float, atol: float) -> float:
    gap = abs(a - b)
    if gap <= atol:  # below the resolution of central differences
        return 0.0
    return gap / max(abs(a), abs(b))


def gradcheck(
    fn: Callable,
    inputs: Sequence[float],
    step: float = 1e-6,
    tolerance: float = 1e-4,
    plain_fn: Callable | None = None,
    atol: float = 1e-9,
) -> GradcheckReport:
    """Compare reverse-mode gradients against central finite differences.

    ``fn`` maps a list of scalars to one scalar and must accept DiffValues.
    The finite-difference probes use ``plain_fn`` on floats when provided
    (it must compute the same function); otherwise ``fn`` is re-run on fresh
    tapes. Gradient pairs closer than ``atol`` count as equal: the probe
    noise floor is about ``|f| * eps / step``, beyond the reach of any
    relative comparison for near-zero gradients. The caller is responsible
    for probing only points where the function is smooth (no argmax ties,
    no threshold boundaries).
    """
    tape = Tape()
    dxs = tape.leaves(inputs)
    out = fn(dxs)
    if not isinstance(out, DiffValue):
        raise TypeError("fn must return a DiffValue scalar")
    grads = backward(tape, out)
    analytic = [grads[d.index] for d in dxs]

    def probe(values: list[float]) -> float:
        if plain_fn is not None:
            result = plain_fn(values)
        else:
            t = Tape()
            result = fn(t.leaves(values)).value
        result = float(result)
        if not math.isfinite(result):
            raise AutodiffError("non-finite evaluation during finite differences")
        return result

    numeric: list[float] = []
    base = [float(v) for v in inputs]
    for i in range(len(base)):
        hi = list(base)
        lo = list(base)
        hi[i] += step
        lo[i] -= step
        numeric.append((probe(hi) - probe(lo)) / (2.0 * step))

    errors = [_rel_error(a, b, atol) for a, b in zip(analytic, numeric)]
    max_err = max(errors) if errors else 0.0
    return GradcheckReport(
        passed=max_err <= tolerance,
        max_rel_error=max_err,
        analytic=analytic,
        numeric=numeric,
    )
