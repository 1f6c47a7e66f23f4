import json
import random
from fractions import Fraction as F

import pytest

from locc_areas import (
    ProtocolFile,
    StepProfile,
    audit,
    choose_Q,
    colour_transform,
    colour_transform_nielsen,
    kraus_convert,
    kraus_distill,
    make_schmidt,
    max_prob,
    parse_state,
)
from locc_areas.errors import ParseError, SumNotOne
from oracles import rand_majorizing, rand_state


def convert_file(start, target):
    d, recs = colour_transform_nielsen(start, target)
    Q = choose_Q(d)
    return ProtocolFile("convert", start, target.padded(len(start)), d, kraus_convert(d, start, target, Q), recs, Q)


def test_parse_state_examples():
    assert parse_state('{"lambda": ["1/2","1/2"]}').lambdas == (F(1, 2), F(1, 2))
    assert parse_state('{"lambda": ["0.5","0.3","0.2"]}').lambdas == (F(1, 2), F(3, 10), F(1, 5))
    # bare JSON numbers are read as exact decimals
    assert parse_state('{"lambda": [0.3, 0.7], "label": "x"}').lambdas == (F(7, 10), F(3, 10))
    with pytest.raises(SumNotOne, match="sum 3/4 ≠ 1"):
        parse_state('{"lambda": ["1/2","1/4"]}')


@pytest.mark.parametrize("text", ["", "[1]", '{"lam": []}', '{"lambda": "1"}', '{"lambda": ["x"]}', "{"])
def test_parse_state_malformed(text):
    with pytest.raises(ParseError):
        parse_state(text)


def test_convert_file_round_trip():
    pf = convert_file(make_schmidt(["1/2", "1/4", "1/4"]), make_schmidt(["1/2", "7/20", "3/20"]))
    text = pf.dumps()
    back = ProtocolFile.loads(text)
    assert back == pf
    assert back.dumps() == text
    assert all(c.passed for c in audit(back))


def test_rationals_are_lowest_terms_strings():
    pf = convert_file(make_schmidt(["1/2", "3/10", "1/5"]), make_schmidt(["1/2", "1/2"]))
    doc = json.loads(pf.dumps())
    assert doc["start"]["lambda"] == ["1/2", "3/10", "1/5"]
    assert doc["target"]["lambda"] == ["1/2", "1/2", "0/1"]
    for out in doc["operators"]["outcomes"]:
        assert isinstance(out["probability"], str)
        for e in out["entries"]:
            n, d = map(int, e["c2"].split("/"))
            assert F(n, d).denominator == d


def test_distill_file_round_trip_and_audit():
    s = make_schmidt(["7/10", "1/5", "1/10"])
    r = max_prob(s, 2)
    d = colour_transform(s, r.target)
    pf = ProtocolFile("distill", s, r.target.heights, d, kraus_distill(d, s))
    back = ProtocolFile.loads(pf.dumps())
    assert back == pf
    checks = audit(back)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_audit_detects_tampering():
    pf = convert_file(make_schmidt(["1/2", "1/4", "1/4"]), make_schmidt(["1/2", "7/20", "3/20"]))
    doc = json.loads(pf.dumps())
    doc["operators"]["outcomes"][0]["entries"][0]["c2"] = "1/3"
    bad = ProtocolFile.loads(json.dumps(doc))
    failed = {c.name for c in audit(bad) if not c.passed}
    assert "completeness" in failed and "operators match diagram" in failed

    doc = json.loads(pf.dumps())
    doc["diagram"]["columns"][1][0]["colour"] = 2
    bad = ProtocolFile.loads(json.dumps(doc))
    failed = {c.name for c in audit(bad) if not c.passed}
    assert "colour conservation" in failed


def test_loads_rejects_unknown_kind():
    with pytest.raises(ParseError):
        ProtocolFile.loads('{"kind": "teleport"}')
    with pytest.raises(ParseError):
        ProtocolFile.loads('{"kind": "convert", "start": {"lambda": ["1"]}}')


def test_random_round_trips():
    rng = random.Random(3)
    for _ in range(40):
        lam = rand_state(rng)
        tgt = rand_majorizing(rng, lam, 3)
        pf = convert_file(make_schmidt(lam), make_schmidt(tgt))
        back = ProtocolFile.loads(pf.dumps())
        assert back == pf
        assert all(c.passed for c in audit(back))
        s = make_schmidt(lam)
        d = colour_transform(s, StepProfile(s.lambdas))
        dp = ProtocolFile("distill", s, s.lambdas, d, kraus_distill(d, s))
        assert all(c.passed for c in audit(ProtocolFile.loads(dp.dumps())))
