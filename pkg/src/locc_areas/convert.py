"""Deterministic state-to-state conversion by slice-distinct recolouring.

The start diagram is first recoloured onto the target steps with
:func:`locc_areas.distill.colour_transform`. That leaves colours that share a
relative height in two columns, which breaks the equal-slice measurement.
The correction pass fixes this one filled column at a time, right to left,
by equal-area colour exchanges placed at matching relative heights.

Geometry is done in relative coordinates: a column of height ``h`` is the
unit interval, and a block of area ``a`` covers a relative length ``a / h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import SchmidtVector, nielsen_condition
from .diagram import ColouredDiagram, ColourSegment, StepProfile, ZERO, verify_colour_conservation
from .distill import colour_transform_trace
from .errors import InternalColouringFailure, NotConvertible

ONE = Fraction(1)

Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CorrectionRecord:
    """Audit entry for one corrected column ``L``.

    ``Rk[k]`` donated the directly swapped piece ``Xk[k]`` (k = 0 is the piece
    placed lowest in ``L``); ``Yk[k]`` is the area of ``L``'s own colour
    exchanged into ``Rk[k]``. ``S_back`` is the swapped-back piece sitting in
    ``L`` and ``W`` the area of ``L``'s colour exchanged into ``R_back`` to keep
    that piece clear of its own colour. ``z`` is ``L``'s original colour
    before any exchange.
    """

    L: int
    Rk: tuple[int, ...]
    Xk: tuple[Fraction, ...]
    Yk: tuple[Fraction, ...]
    S_back: Fraction
    W: Fraction
    z: Fraction
    R_back: Optional[int] = None


@dataclass(frozen=True)
class SliceReport:
    """``violations`` holds ``(q, colour, (column_a, column_b))`` with ``q`` 1-based."""

    Q: int
    violations: tuple[tuple[int, int, tuple[int, int]], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _measure(ivs: Sequence[Interval]) -> Fraction:
    return sum((b - a for a, b in ivs), ZERO)


def _take_top(ivs: Sequence[Interval], amount: Fraction) -> list[Interval]:
    out = []
    for a, b in sorted(ivs, reverse=True):
        if amount <= 0:
            break
        take = min(amount, b - a)
        out.append((b - take, b))
        amount -= take
    if amount > 0:
        raise InternalColouringFailure("exchange region too small for swapped-back piece")
    return sorted(out)


def _complement(ivs: Sequence[Interval]) -> list[Interval]:
    out, y = [], ZERO
    for a, b in sorted(ivs):
        if a > y:
            out.append((y, a))
        y = max(y, b)
    if y < ONE:
        out.append((y, ONE))
    return out


def _fill_bottom_up(free: Sequence[Interval], blocks: Sequence[tuple[int, Fraction]]):
    """Lay blocks bottom-up through the free intervals; returns one interval list per block."""
    gaps = [list(iv) for iv in sorted(free)]
    g = 0
    out = []
    for _, size in blocks:
        got = []
        while size > 0:
            if g >= len(gaps):
                raise InternalColouringFailure("column overfilled during correction")
            a, b = gaps[g]
            take = min(size, b - a)
            got.append((a, a + take))
            size -= take
            gaps[g][0] = a + take
            if gaps[g][0] == b:
                g += 1
        out.append(got)
    return out


def _recolour(layout, where: Sequence[Interval], old: int, new: int):
    """Repaint ``where`` inside a relative layout; every repainted piece must be ``old``."""
    out = []
    for lo, hi, c in layout:
        cuts = sorted({lo, hi} | {x for a, b in where for x in (a, b) if lo < x < hi})
        for a, b in zip(cuts, cuts[1:]):
            inside = any(p <= a and b <= q for p, q in where)
            if inside:
                if c != old:
                    raise InternalColouringFailure(f"expected colour {old} under exchange, found {c}")
                out.append((a, b, new))
            else:
                out.append((a, b, c))
    return out


def _relative_layout(d: ColouredDiagram, column: int, h: Fraction):
    return [(lo / h, hi / h, c) for lo, hi, c in d.intervals(column)]


def colour_transform_nielsen(
    start: SchmidtVector, target: SchmidtVector
) -> tuple[ColouredDiagram, list[CorrectionRecord]]:
    """Slice-distinct colouring of the start diagram on the target steps.

    Raises NotConvertible when the majorization condition fails.
    """
    if not nielsen_condition(start, target):
        raise NotConvertible("target does not majorize start")
    n = len(start)
    trace = colour_transform_trace(start, StepProfile(target.padded(n)))
    h = trace.target
    layouts = {i: _relative_layout(trace.diagram, i, h[i]) for i in range(n) if h[i] > 0}
    records: list[CorrectionRecord] = []

    # where the colour of the last overflowing column can still be traded:
    # (column holding it there or None if nobody does, relative region, that column's height)
    exchange: Optional[tuple[Optional[int], list[Interval], Fraction]] = None

    for fc in trace.filled:
        L = fc.column
        hL = h[L]
        back = fc.pieces[0] if fc.pieces and fc.pieces[0].swapped_back else None
        directs = [p for p in fc.pieces if not p.swapped_back][::-1]  # lowest first
        S = back.length if back else ZERO

        Ys = []
        for p in directs:
            r = h[p.origin_column]
            if r and not hL > r:
                raise InternalColouringFailure(f"column {L} is not taller than donor {p.origin_column}")
            Ys.append(r * p.length / (hL - r) if r else ZERO)

        W, R_back, P = ZERO, None, []
        if back is not None:
            if exchange is None:
                raise InternalColouringFailure("swapped-back piece without an exchange region")
            ex_col, Z, rE = exchange
            if ex_col is not None:
                if not hL > rE:
                    raise InternalColouringFailure(f"column {L} is not taller than exchange column {ex_col}")
                W = rE * S / (hL - rE)
                R_back = ex_col
            P = _take_top(Z, (S + W) / hL)

        own_left = fc.z - sum(Ys, ZERO) - W
        if own_left < 0:
            raise InternalColouringFailure(f"column {L} lacks its own colour for the exchanges")

        blocks = [(L, own_left / hL)] + [
            (p.colour, (p.length + y) / hL) for p, y in reversed(list(zip(directs, Ys)))
        ]
        placed = _fill_bottom_up(_complement(P), blocks)
        layout = [(a, b, colour) for (colour, _), ivs in zip(blocks, placed) for a, b in ivs]
        if back is not None:
            layout += [(a, b, back.colour) for a, b in P]
        layouts[L] = sorted(layout)

        # donor columns get L's colour exactly where their colour sits in L
        block_of = {p.colour: ivs for (colour, _), ivs, p in zip(blocks[1:], placed[1:], directs[::-1])}
        for p in directs:
            R = p.origin_column
            if h[R] == 0:
                continue
            mine = block_of[p.colour]
            layouts[R] = sorted(
                [(a, b, L) for a, b in mine] + [(a, b, p.colour) for a, b in _complement(mine)]
            )

        if W > 0:
            layouts[R_back] = _recolour(layouts[R_back], P, back.colour, L)

        if any(Ys) or W:
            records.append(
                CorrectionRecord(
                    L=L,
                    Rk=tuple(p.origin_column for p in directs),
                    Xk=tuple(p.length for p in directs),
                    Yk=tuple(Ys),
                    S_back=S,
                    W=W,
                    z=fc.z,
                    R_back=R_back,
                )
            )

        if fc.displaced > 0:
            if directs:
                x1 = directs[0]
                r1 = h[x1.origin_column]
                exchange = (x1.origin_column if r1 else None, block_of[x1.colour], r1)
            else:
                ex_col, _, rE = exchange
                exchange = (ex_col if W > 0 else None, P, rE if W > 0 else ZERO)
        else:
            exchange = None

    stacks = []
    for i in range(n):
        if h[i] == 0:
            stacks.append(())
            continue
        stacks.append(tuple(ColourSegment(c, (b - a) * h[i]) for a, b, c in sorted(layouts[i]) if b > a))
    diagram = ColouredDiagram(tuple(stacks))

    if diagram.heights != tuple(h) or not verify_colour_conservation(diagram, start):
        raise InternalColouringFailure("correction changed column heights or colour areas")
    if not verify_slice_distinct(diagram).ok:
        raise InternalColouringFailure("corrected diagram is not slice-distinct")
    return diagram, records


def relative_breakpoints(d: ColouredDiagram) -> list[list[Fraction]]:
    out = []
    h = d.heights
    for i in range(len(d.columns)):
        if h[i] == 0:
            out.append([])
            continue
        out.append([hi / h[i] for _, hi, _ in d.intervals(i)])
    return out


def choose_Q(d: ColouredDiagram) -> int:
    """Smallest number of equal slices that leaves every slice of every column one colour."""
    Q = 1
    for pts in relative_breakpoints(d):
        for x in pts:
            Q = math.lcm(Q, x.denominator)
    return Q


def slice_colours(d: ColouredDiagram, Q: int):
    """Per colour, the ``(column, first_slice, end_slice)`` ranges it touches (0-based, half-open)."""
    h = d.heights
    ranges: dict[int, list[tuple[int, int, int]]] = {}
    for i in range(len(d.columns)):
        if h[i] == 0:
            continue
        for lo, hi, c in d.intervals(i):
            a = math.floor(lo / h[i] * Q)
            b = math.ceil(hi / h[i] * Q)
            ranges.setdefault(c, []).append((i, a, b))
    return ranges


def verify_slice_distinct(d: ColouredDiagram, Q: Optional[int] = None) -> SliceReport:
    """Report every slice in which a colour shows up in two different columns."""
    Q = choose_Q(d) if Q is None else Q
    violations = []
    for colour, spans in sorted(slice_colours(d, Q).items()):
        for x in range(len(spans)):
            for y in range(x + 1, len(spans)):
                (i, a, b), (j, c, e) = spans[x], spans[y]
                if i != j and max(a, c) < min(b, e):
                    violations.append((max(a, c) + 1, colour, (min(i, j), max(i, j))))
    return SliceReport(Q, tuple(sorted(violations)))


def check_record(rec: CorrectionRecord, target_heights: Sequence[Fraction]) -> list[str]:
    """Return the list of broken invariants of one correction record (empty when sound)."""
    h = list(target_heights)
    hL = h[rec.L]
    problems = []
    for R, X, Y in zip(rec.Rk, rec.Xk, rec.Yk):
        if h[R] and not hL > h[R]:
            problems.append(f"column {rec.L} not taller than donor {R}")
            continue
        if Y != h[R] * X / (hL - h[R]):
            problems.append(f"Y for donor {R} breaks the equal-proportion rule")
    if rec.R_back is not None:
        rb = h[rec.R_back]
        if not hL > rb or rec.W > rec.S_back * rb / (hL - rb):
            problems.append("W exceeds its bound")
    elif rec.W:
        problems.append("W without an exchange column")
    if sum(rec.Yk, ZERO) + rec.W > rec.z:
        problems.append("not enough of the column's own colour for the exchanges")
    return problems
