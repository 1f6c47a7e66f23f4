"""Measurement protocols read off coloured diagrams, and their verification.

An operator maps Alice's source index ``j`` to index ``i`` with a real,
non-negative coefficient. Only squared coefficients are stored, so every
identity checked here is exact rational arithmetic; :func:`simulate_float` is
the independent floating-point cross-check.

Consecutive outcomes with identical operators (equal slices of a conversion
diagram, for instance) are stored once with a ``multiplicity``. Each of the
represented outcomes keeps its own probability ``probabilities[k]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from .core import SchmidtVector, format_rational
from .convert import choose_Q, verify_slice_distinct
from .diagram import ColouredDiagram, ZERO, rows, verify_row_distinct
from .errors import InputError, RowsNotDistinct, SlicesNotDistinct, ToleranceExceeded, ZeroProbabilityOutcome


@dataclass(frozen=True)
class KrausOperator:
    """Squared coefficients keyed by ``(i, j)``: the operator sends ``|j>`` to ``|i>``."""

    entries: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), c2 in sorted(self.entries.items()):
            c2 = Fraction(c2)
            if c2 < 0:
                raise InputError("squared coefficients must be non-negative")
            if c2:
                clean[(int(i), int(j))] = c2
        sources = [j for _, j in clean]
        if len(sources) != len(set(sources)):
            raise InputError("an operator may hold at most one entry per source index")
        object.__setattr__(self, "entries", clean)

    def __hash__(self):
        return hash(tuple(self.entries.items()))

    def is_biorthogonal(self) -> bool:
        targets = [i for i, _ in self.entries]
        return len(targets) == len(set(targets))

    def matrix(self, dim: int) -> np.ndarray:
        m = np.zeros((dim, dim))
        for (i, j), c2 in self.entries.items():
            m[i, j] = np.sqrt(float(c2))
        return m


@dataclass(frozen=True)
class KrausProtocol:
    dimension: int
    operators: tuple[KrausOperator, ...]
    outcome_labels: tuple[int, ...]
    probabilities: tuple[Fraction, ...]
    multiplicities: tuple[int, ...] = ()

    def __post_init__(self):
        k = len(self.operators)
        mult = tuple(self.multiplicities) or (1,) * k
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "probabilities", tuple(Fraction(p) for p in self.probabilities))
        if not (len(self.outcome_labels) == len(self.probabilities) == len(mult) == k):
            raise InputError("operators, labels, probabilities and multiplicities must align")
        if any(m < 1 for m in mult):
            raise InputError("multiplicities must be positive")
        for op in self.operators:
            if any(not (0 <= i < self.dimension and 0 <= j < self.dimension) for i, j in op.entries):
                raise InputError("operator index outside the protocol dimension")

    @classmethod
    def identity(cls, dimension: int, label: int = 1) -> "KrausProtocol":
        op = KrausOperator({(j, j): Fraction(1) for j in range(dimension)})
        return cls(dimension, (op,), (label,), (Fraction(1),))

    @property
    def num_outcomes(self) -> int:
        return sum(self.multiplicities)

    def total_probability(self) -> Fraction:
        return sum((p * m for p, m in zip(self.probabilities, self.multiplicities)), ZERO)

    def by_label(self) -> dict[int, Fraction]:
        """Total probability per outcome label (distillation: per m)."""
        out: dict[int, Fraction] = {}
        for label, p, m in zip(self.outcome_labels, self.probabilities, self.multiplicities):
            out[label] = out.get(label, ZERO) + p * m
        return dict(sorted(out.items()))

    def outcomes(self) -> Iterator[tuple[int, KrausOperator, Fraction]]:
        """Every outcome individually; slice runs expand to consecutive labels."""
        for op, label, p, m in zip(self.operators, self.outcome_labels, self.probabilities, self.multiplicities):
            step = 1 if m > 1 else 0
            for r in range(m):
                yield label + r * step, op, p


def kraus_distill(d: ColouredDiagram, state: SchmidtVector) -> KrausProtocol:
    """One operator per maximal band of rows sharing the same (column, colour) content."""
    if not verify_row_distinct(d):
        raise RowsNotDistinct("a colour repeats within a row")
    lam = state.lambdas
    bands: list[list] = []
    for lo, hi, members in rows(d):
        if not members:
            continue
        if bands and bands[-1][2] == members and bands[-1][1] == lo:
            bands[-1][1] = hi
        else:
            bands.append([lo, hi, members])
    ops, labels, probs = [], [], []
    for lo, hi, members in bands:
        h = hi - lo
        try:
            entries = {(i, j): h / lam[j] for i, j in members}
        except IndexError:
            raise InputError("diagram colour outside the state's Schmidt rank") from None
        ops.append(KrausOperator(entries))
        labels.append(len(members))
        probs.append(h * len(members))
    return KrausProtocol(len(lam), tuple(ops), tuple(labels), tuple(probs))


def kraus_convert(d: ColouredDiagram, start: SchmidtVector, target: SchmidtVector, Q: int) -> KrausProtocol:
    """Q equally likely outcomes, one per relative-height slice, each leaving the target state."""
    n = len(start)
    heights = target.padded(n)
    if d.heights != tuple(heights):
        raise InputError("diagram columns do not match the target heights")
    if Q < 1 or Q % choose_Q(d):
        raise SlicesNotDistinct(f"Q={Q} leaves some slice multicoloured (needs a multiple of {choose_Q(d)})")
    if not verify_slice_distinct(d, Q).ok:
        raise SlicesNotDistinct("a colour repeats within a slice")
    lam = start.lambdas
    cuts = {ZERO, Fraction(1)}
    layouts = {}
    for i in range(n):
        if heights[i] == 0:
            continue
        layouts[i] = [(lo / heights[i], hi / heights[i], c) for lo, hi, c in d.intervals(i)]
        cuts.update(x for lo, hi, _ in layouts[i] for x in (lo, hi))
    cuts = sorted(cuts)
    ops, labels, probs, mults = [], [], [], []
    p = Fraction(1, Q)
    for a, b in zip(cuts, cuts[1:]):
        entries = {}
        for i, lay in layouts.items():
            c = next(c for lo, hi, c in lay if lo <= a < hi)
            entries[(i, c)] = heights[i] / (Q * lam[c])
        op = KrausOperator(entries)
        first, count = int(a * Q) + 1, int((b - a) * Q)
        if ops and ops[-1] == op:
            mults[-1] += count
            continue
        ops.append(op)
        labels.append(first)
        probs.append(p)
        mults.append(count)
    return KrausProtocol(n, tuple(ops), tuple(labels), tuple(probs), tuple(mults))


def verify_completeness(p: KrausProtocol) -> bool:
    """Exact check that the squared operators sum to the identity on every source index."""
    totals = [ZERO] * p.dimension
    for op, m in zip(p.operators, p.multiplicities):
        if not op.is_biorthogonal():
            return False
        for (_, j), c2 in op.entries.items():
            totals[j] += m * c2
    return all(t == 1 for t in totals)


def post_state(op: KrausOperator, state: SchmidtVector) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Probability and normalized squared Schmidt coefficients after outcome ``op``."""
    weights = [state.lambdas[j] * c2 for (_, j), c2 in op.entries.items()]
    prob = sum(weights, ZERO)
    if prob == 0:
        return prob, ()
    return prob, tuple(sorted((w / prob for w in weights if w), reverse=True))


def post_states(p: KrausProtocol, state: SchmidtVector, expand: bool = False):
    """``(probability, coefficients)`` for each stored operator, or for every outcome if ``expand``."""
    if p.dimension != len(state):
        raise InputError("protocol dimension does not match the state")
    ops = [op for _, op, _ in p.outcomes()] if expand else list(p.operators)
    out = []
    for k, op in enumerate(ops):
        prob, coeffs = post_state(op, state)
        if prob == 0:
            warnings.warn(f"outcome {k} has probability zero", ZeroProbabilityOutcome, stacklevel=2)
        out.append((prob, coeffs))
    return out


@dataclass(frozen=True)
class SimulationReport:
    completeness_deviation: float
    probability_deviation: float
    coefficient_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.completeness_deviation, self.probability_deviation, self.coefficient_deviation) <= self.tol


def simulate_float(p: KrausProtocol, state: SchmidtVector, tol: float = 1e-12) -> SimulationReport:
    """Rebuild the protocol as dense float matrices and compare with the exact values.

    Post-measurement Schmidt coefficients come from an SVD, independent of the
    rational bookkeeping.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    n = p.dimension
    if n != len(state):
        raise InputError("protocol dimension does not match the state")
    root = np.sqrt(np.array([float(x) for x in state.lambdas]))
    gram = np.zeros((n, n))
    prob_dev = coeff_dev = 0.0
    for op, m, p_exact in zip(p.operators, p.multiplicities, p.probabilities):
        M = op.matrix(n)
        gram += m * (M.T @ M)
        amp = M * root[np.newaxis, :]
        prob = float(np.sum(amp**2))
        prob_dev = max(prob_dev, abs(prob - float(p_exact)))
        exact_prob, exact_coeffs = post_state(op, state)
        prob_dev = max(prob_dev, abs(prob - float(exact_prob)))
        if exact_prob == 0:
            continue
        sv = np.linalg.svd(amp, compute_uv=False) ** 2 / prob
        ref = np.zeros(n)
        ref[: len(exact_coeffs)] = [float(c) for c in exact_coeffs]
        coeff_dev = max(coeff_dev, float(np.max(np.abs(np.sort(sv)[::-1] - ref))))
    comp_dev = float(np.max(np.abs(gram - np.eye(n)))) if n else 0.0
    report = SimulationReport(comp_dev, prob_dev, coeff_dev, tol)
    if not report.passed:
        raise ToleranceExceeded(
            f"float simulation deviates: completeness {comp_dev:.3g}, probability {prob_dev:.3g}, "
            f"coefficients {coeff_dev:.3g} (tol {tol:g})",
            report,
        )
    return report


def describe(p: KrausProtocol) -> str:
    lines = []
    for op, label, prob, m in zip(p.operators, p.outcome_labels, p.probabilities, p.multiplicities):
        terms = ", ".join(f"{i}<-{j}: {format_rational(c2)}" for (i, j), c2 in op.entries.items())
        rep = f" x{m}" if m > 1 else ""
        lines.append(f"outcome {label}{rep}  p={format_rational(prob)}  {{{terms}}}")
    return "\n".join(lines)
