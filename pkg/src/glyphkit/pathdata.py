"""SVG path-data parsing and serialization for the four-point command model.

The parser accepts the opcodes ``M m L l H h V v C c S s Q q Z z`` with the
usual grammar: comma/whitespace separators, implicit command repetition, and
extra pairs after a MoveTo treated as implicit LineTo. Everything is resolved
to absolute coordinates; H/V become lines, S reflects the previous cubic
control point, quadratics are degree-elevated to cubics, and Z emits a closing
line back to the contour start whenever the cursor is not already there.
Elliptical arcs (``A``/``a``) have no analogue in the command model and are
rejected. Serialization emits absolute ``M L C Z`` only.
"""

from __future__ import annotations

import math
import re

from .model import Command, Path, Point

__all__ = [
    "ParseError",
    "parse_path_data",
    "serialize_path_data",
    "elevate_quadratic",
]


class ParseError(ValueError):
    """Path-data syntax error; ``offset`` is the character offset in the input."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")


_WSP = " \t\r\n,"
_NUM_RE = re.compile(r"[+-]?(?:[0-9]*\.[0-9]+|[0-9]+\.?)(?:[eE][+-]?[0-9]+)?")

# Number of operands per opcode group (coordinates, not pairs).
_ARITY = {
    "M": 2, "L": 2, "H": 1, "V": 1, "C": 6, "S": 4, "Q": 4, "Z": 0,
}

_UNSUPPORTED = {"A": "elliptical arcs are not supported",
                "T": "smooth quadratics are not supported"}


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_separators(self) -> None:
        t, n = self.text, len(self.text)
        while self.pos < n and t[self.pos] in _WSP:
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_separators()
        return self.pos >= len(self.text)

    def peek_is_number(self) -> bool:
        self.skip_separators()
        if self.pos >= len(self.text):
            return False
        return self.text[self.pos] in "+-.0123456789"

    def read_opcode(self) -> tuple[str, int]:
        self.skip_separators()
        off = self.pos
        ch = self.text[off]
        self.pos += 1
        return ch, off

    def read_number(self, what: str) -> float:
        self.skip_separators()
        off = self.pos
        m = _NUM_RE.match(self.text, off)
        if m is None:
            raise ParseError(f"expected number for {what}", off)
        value = float(m.group(0))
        if not math.isfinite(value):
            raise ParseError("non-finite number", off)
        self.pos = m.end()
        return value


def elevate_quadratic(p0: Point, q: Point, p2: Point) -> tuple[Point, Point]:
    """Exact degree elevation of a quadratic Bezier to cubic control points."""
    c1 = ((p0[0] + 2.0 * q[0]) / 3.0, (p0[1] + 2.0 * q[1]) / 3.0)
    c2 = ((p2[0] + 2.0 * q[0]) / 3.0, (p2[1] + 2.0 * q[1]) / 3.0)
    return c1, c2


def parse_path_data(text: str) -> list[Path]:
    """Parse SVG path data into contour paths of the four-point model."""
    sc = _Scanner(text)
    paths: list[Path] = []
    cmds: list[Command] = []

    cursor: Point | None = None
    start: Point | None = None
    prev_cubic_ctrl: Point | None = None  # reflection basis for S/s

    def flush() -> None:
        nonlocal cmds
        if cmds:
            paths.append(Path(tuple(cmds)))
            cmds = []

    def read_pair(rel: bool, what: str) -> Point:
        x = sc.read_number(what)
        y = sc.read_number(what)
        if rel and cursor is not None:
            return (cursor[0] + x, cursor[1] + y)
        return (x, y)

    while not sc.at_end():
        op, off = sc.read_opcode()
        upper = op.upper()
        if upper in _UNSUPPORTED:
            raise ParseError(_UNSUPPORTED[upper], off)
        if upper not in _ARITY:
            raise ParseError(f"unknown opcode {op!r}", off)
        if cursor is None and upper != "M":
            raise ParseError("path data must begin with MoveTo", off)
        rel = op.islower()

        if upper == "M":
            target = read_pair(rel, "MoveTo")
            flush()
            cursor = target
            start = target
            cmds.append(Command.move(target))
            prev_cubic_ctrl = None
            # Extra pairs are implicit LineTo (relative iff the M was).
            while sc.peek_is_number():
                end = read_pair(rel, "LineTo")
                cmds.append(Command.line(cursor, end))
                cursor = end
            continue

        if upper == "Z":
            assert cursor is not None and start is not None
            if cursor != start:
                cmds.append(Command.line(cursor, start))
            cursor = start
            prev_cubic_ctrl = None
            if sc.peek_is_number():
                raise ParseError("number after close; expected opcode", sc.pos)
            if not sc.at_end():
                nxt = sc.text[sc.pos].upper()
                if nxt != "M":
                    # A new subpath continues from the closed contour's start.
                    flush()
                    cmds.append(Command.move(start))
            continue

        first = True
        while first or sc.peek_is_number():
            first = False
            assert cursor is not None
            if upper == "L":
                end = read_pair(rel, "LineTo")
                cmds.append(Command.line(cursor, end))
                cursor = end
                prev_cubic_ctrl = None
            elif upper == "H":
                x = sc.read_number("HLineTo")
                end = (cursor[0] + x, cursor[1]) if rel else (x, cursor[1])
                cmds.append(Command.line(cursor, end))
                cursor = end
                prev_cubic_ctrl = None
            elif upper == "V":
                y = sc.read_number("VLineTo")
                end = (cursor[0], cursor[1] + y) if rel else (cursor[0], y)
                cmds.append(Command.line(cursor, end))
                cursor = end
                prev_cubic_ctrl = None
            elif upper == "C":
                c1 = read_pair(rel, "CurveTo")
                c2 = read_pair(rel, "CurveTo")
                end = read_pair(rel, "CurveTo")
                cmds.append(Command.curve(cursor, c1, c2, end))
                cursor = end
                prev_cubic_ctrl = c2
            elif upper == "S":
                if prev_cubic_ctrl is not None:
                    c1 = (2.0 * cursor[0] - prev_cubic_ctrl[0],
                          2.0 * cursor[1] - prev_cubic_ctrl[1])
                else:
                    c1 = cursor
                c2 = read_pair(rel, "SmoothCurveTo")
                end = read_pair(rel, "SmoothCurveTo")
                cmds.append(Command.curve(cursor, c1, c2, end))
                cursor = end
                prev_cubic_ctrl = c2
            elif upper == "Q":
                q = read_pair(rel, "QuadTo")
                end = read_pair(rel, "QuadTo")
                c1, c2 = elevate_quadratic(cursor, q, end)
                cmds.append(Command.curve(cursor, c1, c2, end))
                cursor = end
                prev_cubic_ctrl = None

    flush()
    return paths


def _fmt(value: float, precision: int) -> str:
    s = f"{value:.{precision}f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def serialize_path_data(paths: list[Path] | tuple[Path, ...], precision: int = 6) -> str:
    """Emit absolute ``M L C Z`` path data; inverse of :func:`parse_path_data`
    up to the given number of decimal digits."""
    chunks: list[str] = []
    for path in paths:
        if not path.commands or path.commands[0].kind.name != "MOVE_TO":
            raise ValueError("path must start with MoveTo")
        move = path.commands[0]
        contour_start = move.p4
        body = path.commands[1:]
        closed_by_line = (
            len(body) >= 1
            and body[-1].kind.name == "LINE_FROM_TO"
            and body[-1].p4 == contour_start
        )
        emit = body[:-1] if closed_by_line else body

        parts = ["M", _fmt(move.p4[0], precision), _fmt(move.p4[1], precision)]
        for cmd in emit:
            if cmd.kind.name == "LINE_FROM_TO":
                parts += ["L", _fmt(cmd.p4[0], precision), _fmt(cmd.p4[1], precision)]
            elif cmd.kind.name == "CURVE_FROM_TO":
                parts.append("C")
                for pt in (cmd.p2, cmd.p3, cmd.p4):
                    parts += [_fmt(pt[0], precision), _fmt(pt[1], precision)]
            else:
                raise ValueError(f"cannot serialize command kind {cmd.kind!r}")
        if closed_by_line:
            parts.append("Z")
        elif body and body[-1].p4 == contour_start:
            parts.append("Z")  # closed by a curve; Z is a no-op marker
        chunks.append(" ".join(parts))
    return " ".join(chunks)
