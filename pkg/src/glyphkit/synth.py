"""Seeded random geometry for gradient checks, property tests, and benchmarks."""

from __future__ import annotations

import math
import random

from .geometry import Cubic, Line
from .model import Command, Glyph, Path, Point

__all__ = [
    "random_point",
    "random_line",
    "random_cubic_pair",
    "random_line_curve_pair",
    "random_glyph",
    "random_simplex",
]


def random_point(rng: random.Random, lo: float = -0.9, hi: float = 0.9) -> Point:
    return (rng.uniform(lo, hi), rng.uniform(lo, hi))


def random_line(rng: random.Random, min_len: float = 0.05) -> Line:
    while True:
        a = random_point(rng)
        b = random_point(rng)
        if math.dist(a, b) >= min_len:
            return Line(a, b)


def _unit(angle: float) -> Point:
    return (math.cos(angle), math.sin(angle))


def random_cubic_pair(rng: random.Random) -> tuple[Cubic, Cubic]:
    """Two cubics sharing an endpoint, with non-degenerate, non-cusp tangents."""
    while True:
        j = random_point(rng, -0.5, 0.5)
        am = rng.uniform(0.0, 2.0 * math.pi)
        ap = rng.uniform(0.0, 2.0 * math.pi)
        um = _unit(am)
        up = _unit(ap)
        # reject near-antiparallel unit tangents (undefined bisector)
        if math.hypot(um[0] + up[0], um[1] + up[1]) < 0.2:
            continue
        mm = rng.uniform(0.2, 1.2)
        mp = rng.uniform(0.2, 1.2)
        p3 = (j[0] - mm * um[0], j[1] - mm * um[1])
        p2n = (j[0] + mp * up[0], j[1] + mp * up[1])
        prev = Cubic(random_point(rng), random_point(rng), p3, j)
        nxt = Cubic(j, p2n, random_point(rng), random_point(rng))
        return prev, nxt


def random_line_curve_pair(rng: random.Random) -> tuple[Line | Cubic, Line | Cubic]:
    """A line meeting a cubic (either order) with usable tangents."""
    j = random_point(rng, -0.5, 0.5)
    ang_line = rng.uniform(0.0, 2.0 * math.pi)
    length = rng.uniform(0.2, 1.0)
    w = _unit(ang_line)
    ang_curve = rng.uniform(0.0, 2.0 * math.pi)
    mag = rng.uniform(0.2, 1.0)
    u = _unit(ang_curve)
    if rng.random() < 0.5:
        # line into curve
        a = (j[0] - length * w[0], j[1] - length * w[1])
        line = Line(a, j)
        curve = Cubic(j, (j[0] + mag * u[0], j[1] + mag * u[1]),
                      random_point(rng), random_point(rng))
        return line, curve
    # curve into line
    curve = Cubic(random_point(rng), random_point(rng),
                  (j[0] - mag * u[0], j[1] - mag * u[1]), j)
    b = (j[0] + length * w[0], j[1] + length * w[1])
    return curve, Line(j, b)


def random_simplex(rng: random.Random, k: int = 3) -> list[float]:
    raw = [rng.uniform(0.05, 1.0) for _ in range(k)]
    total = sum(raw)
    return [v / total for v in raw]


def random_glyph(
    rng: random.Random,
    max_paths: int = 3,
    max_drawing: int = 6,
    coord_range: float = 0.9,
) -> Glyph:
    """A structurally valid glyph with chained commands; some contours closed."""
    paths = []
    for _ in range(rng.randint(1, max_paths)):
        start = random_point(rng, -coord_range, coord_range)
        cmds = [Command.move(start)]
        cursor = start
        for _ in range(rng.randint(1, max_drawing)):
            end = random_point(rng, -coord_range, coord_range)
            if rng.random() < 0.5:
                cmds.append(Command.line(cursor, end))
            else:
                cmds.append(
                    Command.curve(
                        cursor,
                        random_point(rng, -coord_range, coord_range),
                        random_point(rng, -coord_range, coord_range),
                        end,
                    )
                )
            cursor = end
        if rng.random() < 0.5 and cursor != start:
            cmds.append(Command.line(cursor, start))
        paths.append(Path(tuple(cmds)))
    return Glyph(tuple(paths), units_per_em=1.0, normalized=False)
