"""Continuous type-A quivers.

A quiver is the real line cut at finitely many breakpoints, with each of
the complementary segments oriented ``asc`` (structure maps run toward larger
coordinates) or ``desc``.  Coordinates are exact :class:`Fraction` values.
"""

from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import NoNeighbor, NotExtremal, OutOfWindow

ASC = "asc"
DESC = "desc"

SINK = "sink"
SOURCE = "source"
FLOW_LEFT = "flow_left"
FLOW_RIGHT = "flow_right"

Coordinate = Fraction


def coord(x) -> Fraction:
    """Coerce ints, strings like ``"5/2"`` or ``"2.5"``, and floats exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class OrientedQuiver:
    breakpoints: tuple[Fraction, ...]
    segment_dirs: tuple[str, ...]

    def __init__(self, breakpoints: Iterable, segment_dirs: Iterable[str]):
        bps = tuple(coord(b) for b in breakpoints)
        dirs = tuple(segment_dirs)
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(dirs) != len(bps) + 1:
            raise ValueError("need exactly one direction per segment (breakpoints + 1)")
        if any(d not in (ASC, DESC) for d in dirs):
            raise ValueError(f"segment directions must be {ASC!r} or {DESC!r}")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "segment_dirs", dirs)

    def __len__(self) -> int:
        return len(self.breakpoints)

    def segment_of_open(self, lo: Fraction | None, hi: Fraction | None) -> int:
        """Index of the segment containing the open interval (lo, hi)."""
        if lo is None:
            return 0
        return bisect.bisect_right(self.breakpoints, lo)

    def segment_at(self, x: Fraction) -> int:
        """Segment containing a non-breakpoint coordinate."""
        i = bisect.bisect_left(self.breakpoints, x)
        if i < len(self.breakpoints) and self.breakpoints[i] == x:
            raise ValueError(f"{x} is a breakpoint")
        return i

    def index_of(self, x) -> int:
        x = coord(x)
        i = bisect.bisect_left(self.breakpoints, x)
        if i == len(self.breakpoints) or self.breakpoints[i] != x:
            raise ValueError(f"{x} is not a breakpoint")
        return i

    def sinks(self) -> list[int]:
        return [i for i in range(len(self)) if classify_point(self, i) == SINK]

    def sources(self) -> list[int]:
        return [i for i in range(len(self)) if classify_point(self, i) == SOURCE]

    def redundant_breakpoints(self) -> list[int]:
        return [i for i in range(len(self)) if self.segment_dirs[i] == self.segment_dirs[i + 1]]


def validate_quiver(q: OrientedQuiver) -> list[str]:
    """Warnings only: breakpoints without an orientation change are legal."""
    notes = [f"breakpoint {q.breakpoints[i]} does not change orientation" for i in q.redundant_breakpoints()]
    for n in notes:
        warnings.warn(n, stacklevel=2)
    return notes


def classify_point(q: OrientedQuiver, i: int) -> str:
    if not 0 <= i < len(q):
        raise IndexError(i)
    left, right = q.segment_dirs[i], q.segment_dirs[i + 1]
    if left == ASC and right == DESC:
        return SINK
    if left == DESC and right == ASC:
        return SOURCE
    return FLOW_RIGHT if left == ASC else FLOW_LEFT


def comparable(q: OrientedQuiver, x, y) -> tuple[Fraction, Fraction] | None:
    """``(lo, hi)`` with lo ⪯ hi when x and y are comparable, else None."""
    x, y = coord(x), coord(y)
    if x == y:
        return (x, y)
    a, b = min(x, y), max(x, y)
    first = bisect.bisect_right(q.breakpoints, a)
    last = bisect.bisect_left(q.breakpoints, b)
    dirs = set(q.segment_dirs[first : last + 1])
    if dirs == {ASC}:
        return (a, b)
    if dirs == {DESC}:
        return (b, a)
    return None


def precedes(q: OrientedQuiver, x, y) -> bool:
    c = comparable(q, x, y)
    return c is not None and c == (coord(x), coord(y))


def _window(q: OrientedQuiver, k: int) -> tuple[Fraction, Fraction]:
    if not 0 <= k < len(q):
        raise IndexError(k)
    if k == 0 or k == len(q) - 1:
        raise NoNeighbor(f"breakpoint {k} lacks a neighbour on both sides")
    return q.breakpoints[k - 1], q.breakpoints[k + 1]


def mirror_map(q: OrientedQuiver, k: int, x) -> Fraction:
    """x ↦ S_{k-1} + S_{k+1} - x on the closed window around breakpoint k."""
    a, b = _window(q, k)
    x = coord(x)
    if not a <= x <= b:
        raise OutOfWindow(f"{x} outside [{a}, {b}]")
    return a + b - x


def reflect_quiver(q: OrientedQuiver, k: int, orientation: str = "source") -> OrientedQuiver:
    """Replace the sink/source S_k by its mirror point and flip the window.

    ``orientation="sink"`` keeps the window orientation of a sink unchanged;
    it exists only to reproduce the alternative reading of the construction.
    """
    kind = classify_point(q, k)
    if kind not in (SINK, SOURCE):
        raise NotExtremal(f"breakpoint {q.breakpoints[k]} is {kind}")
    a, b = _window(q, k)
    bps = list(q.breakpoints)
    bps[k] = a + b - q.breakpoints[k]
    dirs = list(q.segment_dirs)
    if orientation == "source":
        if kind == SINK:
            dirs[k], dirs[k + 1] = DESC, ASC
        else:
            dirs[k], dirs[k + 1] = ASC, DESC
    elif orientation != "sink":
        raise ValueError(f"unknown orientation reading {orientation!r}")
    return OrientedQuiver(bps, dirs)
