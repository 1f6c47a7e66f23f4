import math
from decimal import Decimal
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from conftest import schmidt_lists
from locc_areas import (
    OutcomeDistribution,
    SchmidtVector,
    average_yield,
    format_rational,
    make_schmidt,
    nielsen_condition,
    to_rational,
)
from locc_areas.errors import InputError, NegativeCoefficient, NonIntegerLabel, ParseError, SumNotOne
from oracles import emax, majorizes


@pytest.mark.parametrize(
    "value, expected",
    [("3/10", F(3, 10)), ("0.3", F(3, 10)), (" 1/2 ", F(1, 2)), (Decimal("0.25"), F(1, 4)), (2, F(2)), ("6/4", F(3, 2))],
)
def test_to_rational_exact(value, expected):
    assert to_rational(value) == expected


@pytest.mark.parametrize("bad", [0.3, True, "abc", "1/0", "nan", "inf", None])
def test_to_rational_rejects(bad):
    with pytest.raises(ParseError):
        to_rational(bad)


def test_format_rational_lowest_terms():
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(0)) == "0/1"
    assert format_rational(F(1)) == "1/1"


def test_make_schmidt_sorts_and_records_permutation():
    s = make_schmidt([F(1, 5), F(1, 2), F(3, 10)])
    assert s.lambdas == (F(1, 2), F(3, 10), F(1, 5))
    # input positions are 0-based
    assert s.source_permutation == (1, 2, 0)


def test_make_schmidt_already_sorted():
    assert make_schmidt(["1/2", "1/2"]).lambdas == (F(1, 2), F(1, 2))


def test_make_schmidt_trims_zeros():
    s = make_schmidt([F(0), F(1, 2), F(0), F(1, 2)])
    assert s.lambdas == (F(1, 2), F(1, 2))
    assert s.source_permutation == (1, 3)


def test_make_schmidt_sum_message():
    with pytest.raises(SumNotOne, match="sum 3/4 ≠ 1"):
        make_schmidt([F(1, 2), F(1, 4)])


def test_make_schmidt_negative():
    with pytest.raises(NegativeCoefficient):
        make_schmidt([F(3, 2), F(-1, 2)])


def test_schmidt_vector_validates_directly():
    with pytest.raises(InputError):
        SchmidtVector((F(1, 4), F(3, 4)))
    with pytest.raises(InputError):
        SchmidtVector(())


@pytest.mark.parametrize(
    "start, target, expected",
    [
        ((F(1, 2), F(3, 10), F(1, 5)), (F(1, 2), F(1, 2)), True),
        ((F(1, 2), F(3, 10), F(1, 5)), (F(1, 2), F(3, 10), F(1, 5)), True),
        ((F(7, 10), F(3, 10)), (F(1, 2), F(1, 2)), False),
        ((F(1, 2), F(1, 2)), (F(1),), True),
    ],
)
def test_nielsen_examples(start, target, expected):
    assert nielsen_condition(make_schmidt(start), make_schmidt(target)) is expected


@settings(max_examples=200, deadline=None)
@given(schmidt_lists(), schmidt_lists())
def test_nielsen_matches_prefix_oracle(a, b):
    assert nielsen_condition(make_schmidt(a), make_schmidt(b)) == majorizes(b, a)


@settings(max_examples=100, deadline=None)
@given(schmidt_lists())
def test_nielsen_reflexive(a):
    s = make_schmidt(a)
    assert nielsen_condition(s, s)


def test_average_yield_examples():
    assert average_yield(OutcomeDistribution({2: F(1)})) == 1.0
    assert average_yield(OutcomeDistribution({1: F(1)})) == 0.0
    value = average_yield(OutcomeDistribution({1: F(1, 5), 2: F(1, 5), 3: F(3, 5)}))
    assert value == pytest.approx(0.2 + 0.6 * math.log2(3), abs=1e-15)
    assert round(value, 10) == 1.1509775004


def test_average_yield_rejects_bad_labels():
    with pytest.raises(NonIntegerLabel):
        average_yield(OutcomeDistribution({"two": F(1)}))
    with pytest.raises(NonIntegerLabel):
        average_yield(OutcomeDistribution({0: F(1)}))


def test_outcome_distribution_validation():
    with pytest.raises(SumNotOne):
        OutcomeDistribution({1: F(1, 2)})
    with pytest.raises(InputError):
        OutcomeDistribution({1: F(3, 2), 2: F(-1, 2)})
    d = OutcomeDistribution({3: F(1, 2), 1: F(1, 2)})
    assert list(d) == [1, 3]


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_emax_oracle_on_uniform_states(n):
    assert emax([F(1, n)] * n) == pytest.approx(math.log2(n), abs=1e-12)
