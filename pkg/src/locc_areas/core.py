"""Exact scalars, Schmidt vectors, the majorization test and yield arithmetic.

All probabilities and squared Schmidt coefficients are ``fractions.Fraction``
values. Floats only appear at explicit reporting boundaries such as
:func:`average_yield`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import InputError, NegativeCoefficient, NonIntegerLabel, ParseError, SumNotOne

Rational = Fraction
RationalLike = Union[Fraction, int, str, Decimal]


def to_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Strings may be ``"a/b"`` or a finite decimal such as ``"0.3"``; floats are
    refused because their binary expansion is almost never what was meant.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ParseError(f"not a finite number: {value}")
        return Fraction(value)
    if isinstance(value, float):
        raise ParseError(f"float {value!r} is not exact; pass a decimal string or 'a/b'")
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                n, d = int(num), int(den)
            except ValueError:
                raise ParseError(f"not a rational: {value!r}") from None
            if d == 0:
                raise ParseError(f"zero denominator: {value!r}")
            return Fraction(n, d)
        try:
            dec = Decimal(text)
        except InvalidOperation:
            raise ParseError(f"not a rational or exact decimal: {value!r}") from None
        if not dec.is_finite():
            raise ParseError(f"not a finite number: {value!r}")
        return Fraction(dec)
    raise ParseError(f"cannot interpret {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    """Lowest-terms ``"num/den"`` string (denominator always present)."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class SchmidtVector:
    """Squared Schmidt coefficients sorted descending, all positive, summing to 1.

    ``source_permutation[k]`` is the input position that became ``lambdas[k]``.
    Input positions holding zeros are absent from the permutation.
    """

    lambdas: tuple[Fraction, ...]
    source_permutation: tuple[int, ...] = ()

    def __post_init__(self):
        lams = tuple(to_rational(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if not lams:
            raise InputError("Schmidt vector must be non-empty")
        if any(x <= 0 for x in lams):
            raise InputError("Schmidt coefficients must be positive (zeros are trimmed by make_schmidt)")
        if any(a < b for a, b in zip(lams, lams[1:])):
            raise InputError("Schmidt coefficients must be sorted in descending order")
        total = sum(lams)
        if total != 1:
            raise SumNotOne(f"sum {format_rational(total)} ≠ 1")
        perm = tuple(self.source_permutation) or tuple(range(len(lams)))
        if len(perm) != len(lams):
            raise InputError("source_permutation length must match lambdas")
        object.__setattr__(self, "source_permutation", perm)

    def __len__(self) -> int:
        return len(self.lambdas)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.lambdas)

    def __getitem__(self, k):
        return self.lambdas[k]

    def __eq__(self, other):
        if isinstance(other, SchmidtVector):
            return self.lambdas == other.lambdas
        return NotImplemented

    def __hash__(self):
        return hash(self.lambdas)

    def padded(self, length: int) -> tuple[Fraction, ...]:
        return self.lambdas + (Fraction(0),) * (length - len(self.lambdas))


def make_schmidt(coeffs: Iterable[RationalLike]) -> SchmidtVector:
    """Validate, sort descending and zero-trim a list of squared coefficients."""
    values = [to_rational(c) for c in coeffs]
    if not values:
        raise InputError("Schmidt vector must be non-empty")
    for v in values:
        if v < 0:
            raise NegativeCoefficient(f"negative coefficient {format_rational(v)}")
    total = sum(values)
    if total != 1:
        raise SumNotOne(f"sum {format_rational(total)} ≠ 1")
    # stable sort keeps equal coefficients in input order
    order = sorted((k for k, v in enumerate(values) if v > 0), key=lambda k: -values[k])
    return SchmidtVector(tuple(values[k] for k in order), tuple(order))


def suffix_sums(values: Sequence[Fraction]) -> list[Fraction]:
    """``out[p] = sum(values[p:])``."""
    return list(accumulate(reversed(values)))[::-1]


def _pad_pair(a: Sequence[Fraction], b: Sequence[Fraction]):
    n = max(len(a), len(b))
    zero = Fraction(0)
    return list(a) + [zero] * (n - len(a)), list(b) + [zero] * (n - len(b))


def dominated_suffixes(start: Sequence[Fraction], target: Sequence[Fraction]) -> bool:
    """True iff every suffix sum of ``target`` is at most that of ``start``.

    Both sequences are zero-padded to a common length; totals must agree.
    """
    a, b = _pad_pair(start, target)
    if sum(a) != sum(b):
        return False
    return all(tb <= ta for ta, tb in zip(suffix_sums(a), suffix_sums(b)))


def nielsen_condition(start: SchmidtVector, target: SchmidtVector) -> bool:
    """Whether ``start`` can be converted into ``target`` with certainty by LOCC."""
    return dominated_suffixes(start.lambdas, target.lambdas)


@dataclass(frozen=True)
class OutcomeDistribution(Mapping):
    """Exact probability for each outcome label; probabilities sum to one."""

    entries: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for label, p in self.entries.items():
            p = to_rational(p)
            if p < 0 or p > 1:
                raise InputError(f"probability {format_rational(p)} outside [0, 1]")
            clean[label] = p
        total = sum(clean.values(), Fraction(0))
        if total != 1:
            raise SumNotOne(f"probabilities sum to {format_rational(total)} ≠ 1")
        ordered = dict(sorted(clean.items(), key=lambda kv: _label_key(kv[0])))
        object.__setattr__(self, "entries", ordered)

    def __getitem__(self, label):
        return self.entries[label]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __hash__(self):
        return hash(tuple(self.entries.items()))


def _label_key(label):
    return (0, label, "") if isinstance(label, int) else (1, 0, str(label))


def average_yield(dist: OutcomeDistribution) -> float:
    """Mean number of ebits ``sum_m p_m log2 m`` in double precision."""
    total = 0.0
    for m, p in dist.items():
        if isinstance(m, bool) or not isinstance(m, int) or m < 1:
            raise NonIntegerLabel(f"outcome label {m!r} is not a positive integer")
        if p:
            total += float(p) * math.log2(m)
    return total
