"""JSON state files, protocol files and the audit run by ``locc-areas verify``.

Rationals are written as lowest-terms ``"num/den"`` strings. Float fields are
only conveniences for humans and are never read back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Optional

from .convert import CorrectionRecord, check_record, choose_Q, verify_slice_distinct
from .core import SchmidtVector, format_rational, make_schmidt, nielsen_condition, to_rational
from .diagram import (
    ColouredDiagram,
    ColourSegment,
    StepProfile,
    verify_colour_conservation,
    verify_no_downward_flow,
    verify_row_distinct,
)
from .distill import distribution_from_profile
from .errors import AreaError, InputError, ParseError, ToleranceExceeded
from .protocol import (
    KrausOperator,
    KrausProtocol,
    kraus_convert,
    kraus_distill,
    post_state,
    simulate_float,
    verify_completeness,
)

FORMAT_VERSION = 1


def _load_json(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def _rational(value) -> Fraction:
    if isinstance(value, float):
        value = Decimal(repr(value))
    return to_rational(value)


def _lambda_list(doc) -> list[Fraction]:
    if not isinstance(doc, dict) or "lambda" not in doc:
        raise ParseError('state document needs a "lambda" array')
    values = doc["lambda"]
    if not isinstance(values, list):
        raise ParseError('"lambda" must be an array')
    return [_rational(v) for v in values]


def parse_state(text: str) -> SchmidtVector:
    """Parse a StateFile document into a validated Schmidt vector."""
    return make_schmidt(_lambda_list(_load_json(text)))


def state_payload(values, label: Optional[str] = None) -> dict:
    doc = {"lambda": [format_rational(Fraction(v)) for v in values]}
    if label:
        doc["label"] = label
    return doc


def diagram_to_json(d: ColouredDiagram) -> dict:
    return {
        "N": d.N,
        "columns": [[{"colour": s.colour, "height": format_rational(s.height)} for s in col] for col in d.columns],
    }


def diagram_from_json(doc) -> ColouredDiagram:
    try:
        cols = tuple(
            tuple(ColourSegment(int(s["colour"]), _rational(s["height"])) for s in col) for col in doc["columns"]
        )
        return ColouredDiagram(cols, int(doc.get("N", 0)))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed diagram: {exc}") from None


def protocol_to_json(p: KrausProtocol) -> dict:
    return {
        "dimension": p.dimension,
        "outcomes": [
            {
                "label": label,
                "multiplicity": m,
                "probability": format_rational(prob),
                "entries": [{"i": i, "j": j, "c2": format_rational(c2)} for (i, j), c2 in op.entries.items()],
            }
            for op, label, prob, m in zip(p.operators, p.outcome_labels, p.probabilities, p.multiplicities)
        ],
    }


def protocol_from_json(doc) -> KrausProtocol:
    try:
        outs = doc["outcomes"]
        ops = tuple(
            KrausOperator({(int(e["i"]), int(e["j"])): _rational(e["c2"]) for e in o["entries"]}) for o in outs
        )
        return KrausProtocol(
            int(doc["dimension"]),
            ops,
            tuple(int(o["label"]) for o in outs),
            tuple(_rational(o["probability"]) for o in outs),
            tuple(int(o.get("multiplicity", 1)) for o in outs),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed protocol: {exc}") from None


def record_to_json(r: CorrectionRecord) -> dict:
    return {
        "L": r.L,
        "Rk": list(r.Rk),
        "Xk": [format_rational(x) for x in r.Xk],
        "Yk": [format_rational(y) for y in r.Yk],
        "S_back": format_rational(r.S_back),
        "W": format_rational(r.W),
        "z": format_rational(r.z),
        "R_back": r.R_back,
    }


def record_from_json(doc) -> CorrectionRecord:
    try:
        return CorrectionRecord(
            L=int(doc["L"]),
            Rk=tuple(int(x) for x in doc["Rk"]),
            Xk=tuple(_rational(x) for x in doc["Xk"]),
            Yk=tuple(_rational(x) for x in doc["Yk"]),
            S_back=_rational(doc["S_back"]),
            W=_rational(doc["W"]),
            z=_rational(doc["z"]),
            R_back=None if doc.get("R_back") is None else int(doc["R_back"]),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed correction record: {exc}") from None


@dataclass
class ProtocolFile:
    """Everything needed to re-check a synthesized protocol without recomputing the colouring.

    For ``kind == "distill"`` the target is a step profile (zeros allowed);
    for ``"convert"`` it is the target Schmidt vector and ``Q`` is set.
    """

    kind: str
    start: SchmidtVector
    target: tuple[Fraction, ...]
    diagram: ColouredDiagram
    protocol: KrausProtocol
    corrections: list[CorrectionRecord] = field(default_factory=list)
    Q: Optional[int] = None

    def to_json(self) -> dict:
        doc = {
            "format": FORMAT_VERSION,
            "kind": self.kind,
            "start": state_payload(self.start.lambdas),
            "target": state_payload(self.target),
            "diagram": diagram_to_json(self.diagram),
            "operators": protocol_to_json(self.protocol),
            "corrections": [record_to_json(r) for r in self.corrections],
        }
        if self.Q is not None:
            doc["Q"] = self.Q
        doc["summary"] = {
            "outcomes": self.protocol.num_outcomes,
            "probability_by_label": {str(k): float(v) for k, v in self.protocol.by_label().items()},
        }
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ProtocolFile":
        doc = _load_json(text)
        if not isinstance(doc, dict):
            raise ParseError("protocol file must be a JSON object")
        kind = doc.get("kind")
        if kind not in ("distill", "convert"):
            raise ParseError(f'unknown protocol kind {kind!r} (expected "distill" or "convert")')
        try:
            start = make_schmidt(_lambda_list(doc["start"]))
            target = tuple(_lambda_list(doc["target"]))
            Q = doc.get("Q")
            return cls(
                kind=kind,
                start=start,
                target=target,
                diagram=diagram_from_json(doc["diagram"]),
                protocol=protocol_from_json(doc["operators"]),
                corrections=[record_from_json(r) for r in doc.get("corrections", [])],
                Q=None if Q is None else int(Q),
            )
        except KeyError as exc:
            raise ParseError(f"protocol file is missing {exc}") from None


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def audit(pf: ProtocolFile, tol: float = 1e-12) -> list[Check]:
    """Re-run every invariant on a stored protocol. Nothing is recoloured."""
    checks: list[Check] = []

    def add(name, ok, detail=""):
        checks.append(Check(name, bool(ok), detail))

    start, d, proto = pf.start, pf.diagram, pf.protocol
    n = max(len(start), len(pf.target), len(d.columns))
    padded_target = tuple(pf.target) + (Fraction(0),) * (n - len(pf.target))
    heights = d.heights + (Fraction(0),) * (n - len(d.columns))
    add("diagram heights match target", heights == padded_target)
    add("colour conservation", verify_colour_conservation(d, start))
    add("protocol dimension", proto.dimension == len(start), f"{proto.dimension} vs {len(start)}")
    add("completeness", verify_completeness(proto))
    add("probabilities sum to one", proto.total_probability() == 1, format_rational(proto.total_probability()))

    post_ok = True
    for op, prob in zip(proto.operators, proto.probabilities):
        p_exact, coeffs = post_state(op, start)
        if p_exact != prob:
            post_ok = False
        elif pf.kind == "distill":
            m = len(coeffs)
            post_ok &= coeffs == tuple(Fraction(1, m) for _ in range(m))
        else:
            post_ok &= coeffs == tuple(x for x in pf.target if x)
    add("post-measurement states", post_ok)

    if pf.kind == "distill":
        try:
            profile = StepProfile(padded_target)
        except AreaError as exc:
            add("target is a step profile", False, str(exc))
            profile = None
        if profile is not None:
            add("no downward flow", verify_no_downward_flow(StepProfile(start.lambdas), profile))
            expected = dict(distribution_from_profile(profile).items())
            add("outcome distribution", proto.by_label() == expected)
        add("rows distinct", verify_row_distinct(d))
        try:
            add("operators match diagram", kraus_distill(d, start) == proto)
        except AreaError as exc:
            add("operators match diagram", False, str(exc))
    else:
        try:
            target = make_schmidt(pf.target)
            add("majorization condition", nielsen_condition(start, target))
        except AreaError as exc:
            add("target is a Schmidt vector", False, str(exc))
            target = None
        Q = pf.Q or 0
        add("Q refines every colour boundary", Q >= 1 and Q % choose_Q(d) == 0, f"Q={Q}, minimal {choose_Q(d)}")
        add("slices distinct", Q >= 1 and verify_slice_distinct(d, Q).ok)
        add("outcome count equals Q", proto.num_outcomes == Q)
        add("each outcome has probability 1/Q", Q >= 1 and all(p == Fraction(1, Q) for p in proto.probabilities))
        if target is not None and Q >= 1:
            try:
                add("operators match diagram", kraus_convert(d, start, target, Q) == proto)
            except AreaError as exc:
                add("operators match diagram", False, str(exc))
        broken = [f"L={r.L}: {msg}" for r in pf.corrections for msg in check_record(r, padded_target)]
        add("correction records", not broken, "; ".join(broken))

    try:
        rep = simulate_float(proto, start, tol)
        add("float simulation", True, f"max deviation {max(rep.completeness_deviation, rep.probability_deviation, rep.coefficient_deviation):.2e}")
    except ToleranceExceeded as exc:
        add("float simulation", False, str(exc))
    except InputError as exc:
        add("float simulation", False, str(exc))
    return checks
