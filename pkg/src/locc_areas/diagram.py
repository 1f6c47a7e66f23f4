"""Area diagrams: coloured column stacks over unit-width columns.

A column is a bottom-to-top stack of :class:`ColourSegment` values. The colour
of a segment is the (0-based) Bob index ``j`` of the Schmidt term it came
from, so the per-colour area is conserved by every local operation on Alice's
side. Segments rather than ``1/N`` cells are stored; ``N`` is kept as the
least common denominator of every segment boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .core import RationalLike, SchmidtVector, dominated_suffixes, format_rational, to_rational
from .errors import (
    DestinationOccupied,
    InputError,
    RegionOutOfBounds,
    ResolutionTooFine,
    SumNotOne,
)

ZERO = Fraction(0)

# 12-colour qualitative palette, cycled by colour index
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
)

ASCII_GLYPHS = "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
ASCII_MAX_N = 400


@dataclass(frozen=True)
class StepProfile:
    """Non-increasing column heights with total area one."""

    heights: tuple[Fraction, ...]

    def __post_init__(self):
        hs = tuple(to_rational(h) for h in self.heights)
        object.__setattr__(self, "heights", hs)
        if not hs:
            raise InputError("profile must have at least one column")
        if any(h < 0 for h in hs):
            raise InputError("profile heights must be non-negative")
        if any(a < b for a, b in zip(hs, hs[1:])):
            raise InputError("profile heights must be non-increasing")
        total = sum(hs)
        if total != 1:
            raise SumNotOne(f"profile area {format_rational(total)} ≠ 1")

    @classmethod
    def of(cls, state: SchmidtVector | Sequence[RationalLike]) -> "StepProfile":
        if isinstance(state, SchmidtVector):
            return cls(state.lambdas)
        return cls(tuple(state))

    def __len__(self):
        return len(self.heights)

    def __getitem__(self, i):
        return self.heights[i]

    def padded(self, length: int) -> tuple[Fraction, ...]:
        return self.heights + (ZERO,) * (length - len(self.heights))


@dataclass(frozen=True)
class ColourSegment:
    colour: int
    height: Fraction

    def __post_init__(self):
        object.__setattr__(self, "height", to_rational(self.height))
        if self.height <= 0:
            raise InputError("segment height must be positive")


@dataclass(frozen=True)
class Region:
    """Height interval ``[lo, hi)`` of one column. ``lo == hi`` is the empty region."""

    column: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_rational(self.hi))
        if self.lo < 0 or self.hi < self.lo:
            raise RegionOutOfBounds(f"bad region [{self.lo}, {self.hi})")

    @property
    def area(self) -> Fraction:
        return self.hi - self.lo


def _merge(stack: Iterable[tuple[int, Fraction]]) -> tuple[ColourSegment, ...]:
    out: list[list] = []
    for colour, h in stack:
        if h <= 0:
            continue
        if out and out[-1][0] == colour:
            out[-1][1] += h
        else:
            out.append([colour, h])
    return tuple(ColourSegment(c, h) for c, h in out)


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    n = 1
    for v in values:
        n = math.lcm(n, v.denominator)
    return n


@dataclass(frozen=True)
class ColouredDiagram:
    """Coloured column stacks. Use :meth:`from_stacks` to build from raw data."""

    columns: tuple[tuple[ColourSegment, ...], ...]
    N: int = 0

    def __post_init__(self):
        cols = tuple(_merge((s.colour, s.height) for s in col) for col in self.columns)
        object.__setattr__(self, "columns", cols)
        bounds = [b for col in cols for b in _boundaries(col)]
        needed = _lcm_denominators(bounds)
        if self.N == 0:
            object.__setattr__(self, "N", needed)
        elif self.N % needed:
            raise InputError(f"N={self.N} is not a multiple of the boundary denominators ({needed})")

    @classmethod
    def from_stacks(cls, stacks: Sequence[Sequence[tuple[int, RationalLike]]]) -> "ColouredDiagram":
        return cls(tuple(tuple(ColourSegment(c, to_rational(h)) for c, h in col) for col in stacks))

    @property
    def heights(self) -> tuple[Fraction, ...]:
        return tuple(sum((s.height for s in col), ZERO) for col in self.columns)

    def profile(self) -> StepProfile:
        return StepProfile(self.heights)

    def colour_areas(self) -> dict[int, Fraction]:
        areas: dict[int, Fraction] = {}
        for col in self.columns:
            for seg in col:
                areas[seg.colour] = areas.get(seg.colour, ZERO) + seg.height
        return areas

    def intervals(self, column: int) -> list[tuple[Fraction, Fraction, int]]:
        """Absolute ``(lo, hi, colour)`` triples of one column, bottom to top."""
        out, y = [], ZERO
        for seg in self.columns[column]:
            out.append((y, y + seg.height, seg.colour))
            y += seg.height
        return out

    def colour_at(self, column: int, height: Fraction) -> int | None:
        for lo, hi, c in self.intervals(column):
            if lo <= height < hi:
                return c
        return None

    def columns_of(self, colour: int) -> list[int]:
        return [i for i, col in enumerate(self.columns) if any(s.colour == colour for s in col)]

    def stacks(self) -> list[list[tuple[int, Fraction]]]:
        return [[(s.colour, s.height) for s in col] for col in self.columns]


def _boundaries(col: Sequence[ColourSegment]) -> list[Fraction]:
    out, y = [], ZERO
    for seg in col:
        y += seg.height
        out.append(y)
    return out


def canonical_diagram(state: SchmidtVector) -> ColouredDiagram:
    """Start diagram: column ``i`` is one segment of colour ``i`` and height ``lambda_i``."""
    return ColouredDiagram(tuple((ColourSegment(i, lam),) for i, lam in enumerate(state.lambdas)))


def _cut(col: Sequence[ColourSegment], lo: Fraction, hi: Fraction):
    """Split a stack into (below lo, inside [lo, hi), above hi) lists of (colour, height)."""
    below, inside, above = [], [], []
    y = ZERO
    for seg in col:
        a, b = y, y + seg.height
        y = b
        for part, (p, q) in ((below, (a, min(b, lo))), (inside, (max(a, lo), min(b, hi))), (above, (max(a, hi), b))):
            if q > p:
                part.append((seg.colour, q - p))
    return below, inside, above


def move_area(d: ColouredDiagram, src: Region, dst_column: int, dst_offset: RationalLike) -> ColouredDiagram:
    """Cut ``src`` out of its column and paste it on the free top of ``dst_column``.

    Content above the cut drops to close the gap (columns are stacks).
    ``dst_offset`` must equal the destination's height after the cut.
    Colours travel with the area, so per-colour totals never change.
    """
    dst_offset = to_rational(dst_offset)
    ncol = len(d.columns)
    if not (0 <= src.column < ncol) or not (0 <= dst_column < ncol):
        raise RegionOutOfBounds(f"column out of range (diagram has {ncol} columns)")
    heights = d.heights
    if src.hi > heights[src.column]:
        raise RegionOutOfBounds(
            f"region top {format_rational(src.hi)} exceeds column {src.column} height {format_rational(heights[src.column])}"
        )
    if src.area == 0:
        return d
    stacks = d.stacks()
    below, inside, above = _cut(d.columns[src.column], src.lo, src.hi)
    stacks[src.column] = below + above
    top = sum((h for _, h in stacks[dst_column]), ZERO)
    if dst_offset != top:
        raise DestinationOccupied(
            f"destination offset {format_rational(dst_offset)} is not the free top {format_rational(top)} of column {dst_column}"
        )
    stacks[dst_column] = stacks[dst_column] + inside
    return ColouredDiagram.from_stacks(stacks)


def breakpoints(d: ColouredDiagram) -> list[Fraction]:
    pts = {ZERO}
    for i in range(len(d.columns)):
        for lo, hi, _ in d.intervals(i):
            pts.add(lo)
            pts.add(hi)
    return sorted(pts)


def rows(d: ColouredDiagram, points: Sequence[Fraction] | None = None):
    """Yield ``(lo, hi, [(column, colour), ...])`` for each elementary horizontal band."""
    pts = breakpoints(d) if points is None else list(points)
    for lo, hi in zip(pts, pts[1:]):
        mid = (lo + hi) / 2
        members = []
        for i in range(len(d.columns)):
            c = d.colour_at(i, mid)
            if c is not None:
                members.append((i, c))
        yield lo, hi, members


def verify_row_distinct(d: ColouredDiagram, points: Sequence[Fraction] | None = None) -> bool:
    """No colour may appear twice in any row (rows checked between breakpoints)."""
    for _, _, members in rows(d, points):
        colours = [c for _, c in members]
        if len(colours) != len(set(colours)):
            return False
    return True


def verify_colour_conservation(d: ColouredDiagram, state: SchmidtVector) -> bool:
    areas = d.colour_areas()
    expected = {j: lam for j, lam in enumerate(state.lambdas)}
    return areas == expected


def verify_no_downward_flow(start: StepProfile | SchmidtVector, target: StepProfile | SchmidtVector) -> bool:
    """Suffix-sum test: area only ever moves up (and hence left)."""
    a = start.heights if isinstance(start, StepProfile) else start.lambdas
    b = target.heights if isinstance(target, StepProfile) else target.lambdas
    return dominated_suffixes(a, b)


def render(d: ColouredDiagram, format: str = "ascii", *, max_n: int = ASCII_MAX_N) -> str:
    if format == "ascii":
        return _render_ascii(d, max_n)
    if format == "svg":
        return _render_svg(d)
    raise InputError(f"unknown render format {format!r}")


def _glyph(colour: int) -> str:
    return ASCII_GLYPHS[colour % len(ASCII_GLYPHS)]


def _render_ascii(d: ColouredDiagram, max_n: int) -> str:
    if d.N > max_n:
        raise ResolutionTooFine(f"N={d.N} exceeds the ascii cap of {max_n} rows per unit height")
    top = max(d.heights, default=ZERO)
    nrows = int(top * d.N)
    lines = []
    for r in range(nrows - 1, -1, -1):
        mid = (Fraction(r) + Fraction(1, 2)) / d.N
        line = []
        for i in range(len(d.columns)):
            c = d.colour_at(i, mid)
            line.append("." if c is None else _glyph(c))
        lines.append("".join(line))
    return "\n".join(lines) + "\n"


SVG_COLUMN_WIDTH = 100
SVG_UNIT_HEIGHT = 400


def _render_svg(d: ColouredDiagram) -> str:
    width = SVG_COLUMN_WIDTH * max(len(d.columns), 1)
    top = max(d.heights, default=ZERO)
    height = float(top) * SVG_UNIT_HEIGHT
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height:.6g}" '
        f'viewBox="0 0 {width} {height:.6g}">'
    ]
    for i in range(len(d.columns)):
        for lo, hi, c in d.intervals(i):
            y = float(top - hi) * SVG_UNIT_HEIGHT
            h = float(hi - lo) * SVG_UNIT_HEIGHT
            title = escape(f"column {i} colour {c} [{format_rational(lo)}, {format_rational(hi)})")
            parts.append(
                f'<rect x="{i * SVG_COLUMN_WIDTH}" y="{y:.6g}" width="{SVG_COLUMN_WIDTH}" height="{h:.6g}" '
                f'fill="{PALETTE[c % len(PALETTE)]}" stroke="black" stroke-width="1">'
                f"<title>{title}</title></rect>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
