"""Distillation of maximally entangled m-states from one copy of a pure state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import OutcomeDistribution, SchmidtVector, dominated_suffixes
from .diagram import ColouredDiagram, ColourSegment, StepProfile, ZERO
from .errors import DomainError, InternalColouringFailure, NotReachable


def distribution_from_profile(target: StepProfile) -> OutcomeDistribution:
    """Outcome ``m`` occurs with the area of the width-``m`` rectangle under the steps."""
    hs = target.heights + (ZERO,)
    probs = {}
    for m in range(1, len(hs)):
        p = (hs[m - 1] - hs[m]) * m
        if p:
            probs[m] = p
    return OutcomeDistribution(probs)


def optimal_distribution(state: SchmidtVector) -> OutcomeDistribution:
    """Yield-maximizing distribution: measure the untouched start diagram."""
    return distribution_from_profile(StepProfile(state.lambdas))


def swap_delta(mA: int, mB: int) -> float:
    """Change in yield (times N) from moving one element from a width-mA row to a width-mB row."""
    if mB < 1 or mA < 1:
        raise DomainError("row widths must be at least 1")
    if mA == 1:
        raise DomainError("mA = 1: the source row would vanish")
    ratio = (
        Fraction(mB + 1, mB) ** mB
        * Fraction(mA - 1, mA) ** mA
        * Fraction(mB + 1, mA - 1)
    )
    # log of numerator and denominator separately keeps precision for huge ints
    return math.log2(ratio.numerator) - math.log2(ratio.denominator)


@dataclass(frozen=True)
class MaxProbResult:
    p_max: Fraction
    r0: int
    h_max: Fraction
    target: StepProfile


def max_prob(state: SchmidtVector, m: int) -> MaxProbResult:
    """Largest probability of obtaining an m-state, with the profile that achieves it.

    Ties in the minimizing block width are broken toward the smallest width.
    """
    if m < 1:
        raise DomainError("m must be a positive integer")
    n = max(len(state), m)
    lam = state.padded(n)
    tail = [ZERO] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail[i] = tail[i + 1] + lam[i]
    best = None
    for r in range(1, m + 1):
        value = Fraction(m, r) * tail[m - r]
        if best is None or value < best[0]:
            best = (value, r)
    p_max, r0 = best
    h_max = tail[m - r0] / r0
    heights = list(lam[: m - r0]) + [h_max] * r0 + [ZERO] * (n - m)
    return MaxProbResult(p_max, r0, h_max, StepProfile(tuple(heights)))


@dataclass(frozen=True)
class Placement:
    """One piece moved by the colouring procedure.

    ``origin_lo`` is where the piece sat before it moved (a displaced piece's
    origin is inside the column it was pushed out of).
    """

    colour: int
    length: Fraction
    origin_column: int
    origin_lo: Fraction
    dest_column: int
    dest_lo: Fraction
    swapped_back: bool


@dataclass(frozen=True)
class FilledColumn:
    """A column that gained area, in the order it was filled.

    ``z`` is the original colour left at the bottom, ``pieces`` are in
    placement order (a swapped-back piece, if any, comes first) and
    ``displaced`` is the length of original colour pushed out to the left.
    """

    column: int
    z: Fraction
    pieces: tuple[Placement, ...]
    displaced: Fraction


@dataclass(frozen=True)
class ColouringTrace:
    diagram: ColouredDiagram
    start: tuple[Fraction, ...]
    target: tuple[Fraction, ...]
    placements: tuple[Placement, ...]
    filled: tuple[FilledColumn, ...]


def colour_transform_trace(state: SchmidtVector, target: StepProfile) -> ColouringTrace:
    n = max(len(state), len(target))
    lam = state.padded(n)
    tgt = target.padded(n)
    if not dominated_suffixes(lam, tgt):
        raise NotReachable("target needs a net downward movement of area")

    deficit_cols = [j for j in range(n - 1, -1, -1) if tgt[j] > lam[j]]
    surplus_cols = [i for i in range(n - 1, -1, -1) if lam[i] > tgt[i]]
    free_top = {j: tgt[j] for j in deficit_cols}
    z = {j: lam[j] for j in deficit_cols}
    received: dict[int, list[Placement]] = {j: [] for j in deficit_cols}
    displaced = {j: ZERO for j in deficit_cols}
    placements: list[Placement] = []
    cursor = 0

    for i in surplus_cols:
        colour, length, origin_col, origin_lo, back = i, lam[i] - tgt[i], i, tgt[i], False
        while length > 0:
            if cursor >= len(deficit_cols):
                raise InternalColouringFailure("ran out of deficit columns")
            j = deficit_cols[cursor]
            top = free_top[j]
            room = top - lam[j]
            piece = Placement(colour, length, origin_col, origin_lo, j, top - length, back)
            placements.append(piece)
            received[j].append(piece)
            if length < room:
                free_top[j] = top - length
                break
            cursor += 1
            free_top[j] = lam[j]
            spill = length - room
            if spill == 0:
                break
            # the piece pokes below the old step and pushes that slice of colour j left
            z[j] = lam[j] - spill
            displaced[j] = spill
            colour, length, origin_col, origin_lo, back = j, spill, j, lam[j] - spill, True

    stacks = []
    for c in range(n):
        if c in received:
            col = [(c, z[c])] + [(p.colour, p.length) for p in sorted(received[c], key=lambda p: p.dest_lo)]
        else:
            col = [(c, min(lam[c], tgt[c]))]
        stacks.append(col)
    diagram = ColouredDiagram(tuple(tuple(ColourSegment(c, h) for c, h in col if h > 0) for col in stacks))
    if diagram.heights != tuple(tgt):
        raise InternalColouringFailure("colouring did not reproduce the target profile")
    filled = tuple(
        FilledColumn(j, z[j], tuple(received[j]), displaced[j]) for j in deficit_cols
    )
    return ColouringTrace(diagram, tuple(lam), tuple(tgt), tuple(placements), filled)


def colour_transform(state: SchmidtVector, target: StepProfile) -> ColouredDiagram:
    """Recolour the start diagram onto ``target`` with no colour repeated in any row.

    Surplus is taken from the rightmost surplus column and pasted as high as
    possible in the rightmost unfilled deficit column; whatever it pushes out
    below the old step is carried on to the next deficit column leftwards.
    """
    return colour_transform_trace(state, target).diagram
