"""Canonical in-memory model for vector glyph outlines.

A glyph is an ordered collection of contour paths. Each path is a sequence of
drawing commands in a uniform four-point parameterization: every command
carries points ``p1..p4`` together with a per-kind mask saying which of them
are meaningful. Pen moves and straight lines use ``(p1, p4)``, cubic Bezier
curves use all four points, and ``EOS`` (the padding kind) uses none. The
start point of every command duplicates the end point of its predecessor, so
each command is self-contained; :func:`validate_glyph` checks that redundancy.

All types are immutable values; the operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable

import numpy as np

Point = tuple[float, float]

#: Tolerance (in EM units) for the duplicated start/end coordinates of
#: consecutive commands to be considered coincident.
EPS_JOIN = 1e-6

#: Default padding capacities: paths per glyph / commands per path.
NP_MAX_DEFAULT = 4
NC_MAX_DEFAULT = 32


class CommandKind(IntEnum):
    """The four command kinds; ``EOS`` carries no usable geometry."""

    MOVE_TO = 0
    LINE_FROM_TO = 1
    CURVE_FROM_TO = 2
    EOS = 3


_MASK_ROWS: dict[CommandKind, tuple[bool, bool, bool, bool]] = {
    CommandKind.MOVE_TO: (True, False, False, True),
    CommandKind.LINE_FROM_TO: (True, False, False, True),
    CommandKind.CURVE_FROM_TO: (True, True, True, True),
    CommandKind.EOS: (False, False, False, False),
}

_ZERO: Point = (0.0, 0.0)


@dataclass(frozen=True)
class Command:
    """One drawing primitive: a kind plus four 2-D argument points.

    ``p1`` is the start point and ``p4`` the end point; ``p2``/``p3`` are the
    Bezier control points and are zeroed (masked out) for non-curve kinds.
    """

    kind: CommandKind
    p1: Point = _ZERO
    p2: Point = _ZERO
    p3: Point = _ZERO
    p4: Point = _ZERO

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "p3", "p4"):
            x, y = getattr(self, name)
            object.__setattr__(self, name, (float(x), float(y)))

    @classmethod
    def move(cls, point: Point) -> "Command":
        """A pen move; the start point duplicates the target (no prior cursor)."""
        return cls(CommandKind.MOVE_TO, p1=point, p4=point)

    @classmethod
    def line(cls, start: Point, end: Point) -> "Command":
        return cls(CommandKind.LINE_FROM_TO, p1=start, p4=end)

    @classmethod
    def curve(cls, p1: Point, p2: Point, p3: Point, p4: Point) -> "Command":
        return cls(CommandKind.CURVE_FROM_TO, p1=p1, p2=p2, p3=p3, p4=p4)

    @classmethod
    def eos(cls) -> "Command":
        return cls(CommandKind.EOS)

    @property
    def points(self) -> tuple[Point, Point, Point, Point]:
        return (self.p1, self.p2, self.p3, self.p4)

    @property
    def mask_rows(self) -> tuple[bool, bool, bool, bool]:
        """Which of ``p1..p4`` carry geometry for this kind."""
        return _MASK_ROWS[self.kind]

    @property
    def mask(self) -> np.ndarray:
        """The 4x2 binary argument mask."""
        rows = _MASK_ROWS[self.kind]
        return np.array([[int(r)] * 2 for r in rows], dtype=np.uint8)

    def is_drawing(self) -> bool:
        return self.kind in (CommandKind.LINE_FROM_TO, CommandKind.CURVE_FROM_TO)


@dataclass(frozen=True)
class Path:
    """An ordered contour: a MoveTo followed by drawing commands."""

    commands: tuple[Command, ...]
    visible: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "commands", tuple(self.commands))

    def drawing_indices(self) -> list[int]:
        return [k for k, c in enumerate(self.commands) if c.is_drawing()]


@dataclass(frozen=True)
class Glyph:
    """An ordered collection of contour paths.

    ``units_per_em`` is present only before EM-normalization; afterwards it is
    ``None`` and ``normalized`` is set.
    """

    paths: tuple[Path, ...]
    units_per_em: float | None = None
    normalized: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))


@dataclass(frozen=True)
class Violation:
    """One broken invariant found by :func:`validate_glyph`."""

    path: int
    command: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)


class GlyphCapacityError(ValueError):
    """Raised when a glyph exceeds the padding capacity."""

    def __init__(self, axis: str, actual: int, maximum: int):
        self.axis = axis
        self.actual = actual
        self.maximum = maximum
        super().__init__(f"too many {axis}: {actual} > {maximum}")


@dataclass
class PaddedGlyphTensor:
    """Fixed-shape tensor form of a glyph for batch processing.

    ``coords`` has shape ``(np_max, nc_max, 4, 2)``; ``kinds`` holds
    :class:`CommandKind` values and ``visibility`` one flag per path slot.
    Padding slots are ``EOS`` with all-zero coordinates. Arrays are to be
    treated as read-only.
    """

    coords: np.ndarray
    kinds: np.ndarray
    visibility: np.ndarray

    @property
    def np_max(self) -> int:
        return self.coords.shape[0]

    @property
    def nc_max(self) -> int:
        return self.coords.shape[1]


def _mapped_command(cmd: Command, fn) -> Command:
    pts = tuple(
        fn(p) if used else _ZERO for p, used in zip(cmd.points, cmd.mask_rows)
    )
    return Command(cmd.kind, *pts)


def normalize_glyph(glyph: Glyph) -> Glyph:
    """Scale a glyph to EM units and recenter it on the origin.

    Coordinates are divided by ``units_per_em`` and then translated so the
    bounding-box center of all visible geometry (control points included,
    masked slots excluded) lands on ``(0, 0)``.
    """
    if glyph.normalized:
        raise ValueError("glyph is already normalized")
    upm = glyph.units_per_em
    if upm is None or upm <= 0:
        raise ValueError("units_per_em must be positive")

    xs: list[float] = []
    ys: list[float] = []
    for path in glyph.paths:
        if not path.visible:
            continue
        for cmd in path.commands:
            for (x, y), used in zip(cmd.points, cmd.mask_rows):
                if used:
                    xs.append(x / upm)
                    ys.append(y / upm)
    if not xs:
        raise ValueError("empty glyph")
    cx = (min(xs) + max(xs)) / 2.0
    cy = (min(ys) + max(ys)) / 2.0

    def fn(p: Point) -> Point:
        return (p[0] / upm - cx, p[1] / upm - cy)

    paths = tuple(
        Path(tuple(_mapped_command(c, fn) for c in p.commands), visible=p.visible)
        for p in glyph.paths
    )
    return Glyph(paths, units_per_em=None, normalized=True)


def pad_glyph(
    glyph: Glyph,
    np_max: int = NP_MAX_DEFAULT,
    nc_max: int = NC_MAX_DEFAULT,
) -> PaddedGlyphTensor:
    """Pack a glyph into the fixed ``(np_max, nc_max, 4, 2)`` tensor form."""
    if len(glyph.paths) > np_max:
        raise GlyphCapacityError("paths", len(glyph.paths), np_max)
    for p in glyph.paths:
        if len(p.commands) > nc_max:
            raise GlyphCapacityError("commands", len(p.commands), nc_max)

    coords = np.zeros((np_max, nc_max, 4, 2), dtype=np.float64)
    kinds = np.full((np_max, nc_max), int(CommandKind.EOS), dtype=np.int8)
    visibility = np.zeros(np_max, dtype=bool)
    for i, path in enumerate(glyph.paths):
        visibility[i] = path.visible
        for k, cmd in enumerate(path.commands):
            kinds[i, k] = int(cmd.kind)
            coords[i, k] = cmd.points
    return PaddedGlyphTensor(coords=coords, kinds=kinds, visibility=visibility)


def strip_padding(tensor: PaddedGlyphTensor) -> Glyph:
    """Inverse of :func:`pad_glyph`: drop EOS slots and empty path slots."""
    paths = []
    for i in range(tensor.np_max):
        commands = []
        for k in range(tensor.nc_max):
            kind = CommandKind(int(tensor.kinds[i, k]))
            if kind is CommandKind.EOS:
                break
            pts = [tuple(float(v) for v in pt) for pt in tensor.coords[i, k]]
            commands.append(Command(kind, *pts))
        if commands:
            paths.append(Path(tuple(commands), visible=bool(tensor.visibility[i])))
    return Glyph(tuple(paths), units_per_em=None, normalized=True)


def _dist(a: Point, b: Point) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2)


def validate_glyph(glyph: Glyph, eps_join: float = EPS_JOIN) -> ValidationReport:
    """Report every violated model invariant; an empty report means valid."""
    out: list[Violation] = []
    if glyph.units_per_em is not None and glyph.units_per_em <= 0:
        out.append(Violation(-1, -1, "units_per_em must be positive"))
    for pi, path in enumerate(glyph.paths):
        if not path.commands:
            out.append(Violation(pi, -1, "path has no commands"))
            continue
        first = path.commands[0]
        if first.kind is not CommandKind.MOVE_TO:
            out.append(Violation(pi, 0, "path must start with MoveTo"))
        for k, cmd in enumerate(path.commands):
            if cmd.kind is CommandKind.EOS:
                out.append(Violation(pi, k, "EOS command inside path"))
                continue
            if cmd.kind is CommandKind.MOVE_TO:
                if k > 0:
                    out.append(Violation(pi, k, "MoveTo allowed only as first command"))
                if _dist(cmd.p1, cmd.p4) > eps_join:
                    out.append(Violation(pi, k, "MoveTo start must duplicate its target"))
            for name, pt, used in zip(("p1", "p2", "p3", "p4"), cmd.points, cmd.mask_rows):
                if not used and pt != _ZERO:
                    out.append(Violation(pi, k, f"masked point {name} must be zero"))
            if k > 0:
                gap = _dist(cmd.p1, path.commands[k - 1].p4)
                if gap > eps_join:
                    out.append(
                        Violation(pi, k, f"start point deviates {gap:.3g} from previous end")
                    )
    return ValidationReport(tuple(out))


def glyph_coordinates(glyph: Glyph) -> Iterable[tuple[int, int, int, Point]]:
    """Yield ``(path, command, point, (x, y))`` for every stored coordinate."""
    for pi, path in enumerate(glyph.paths):
        for k, cmd in enumerate(path.commands):
            for j, pt in enumerate(cmd.points):
                yield pi, k, j, pt
