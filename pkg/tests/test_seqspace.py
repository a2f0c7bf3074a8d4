from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncrand.errors import ValidationError
from ncrand.seqspace import (
    BitString,
    DyadicValue,
    PrefixSet,
    cylinder_measure,
    dyadic_expand,
    format_dyadic,
    parse_dyadic,
    prefix_set_measure,
)

words = st.text(alphabet="01", max_size=16)


def interval(x: str):
    """Image of the cylinder under the dyadic map, built digit by digit."""
    left = sum((Fraction(int(b), 2 ** (i + 1)) for i, b in enumerate(x)), Fraction(0))
    return left, left + Fraction(1, 2 ** len(x))


def union_length(members):
    spans = sorted(interval(m) for m in members)
    total, cur_lo, cur_hi = Fraction(0), None, None
    for lo, hi in spans:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def test_bitstring_rejects_other_symbols():
    with pytest.raises(ValidationError):
        BitString("012")
    assert len(BitString("")) == 0


@pytest.mark.parametrize(
    "prefix,tail,expected",
    [("1", "zeros", Fraction(1, 2)), ("01", "ones", Fraction(1, 2)), ("", "zeros", Fraction(0))],
)
def test_dyadic_expand_examples(prefix, tail, expected):
    assert dyadic_expand(prefix, tail).as_fraction() == expected


def test_dyadic_value_is_reduced():
    v = dyadic_expand("", "ones")
    assert (v.numerator, v.exponent) == (1, 0)
    assert DyadicValue(4, 3) == DyadicValue(1, 1)
    with pytest.raises(ValidationError):
        DyadicValue(3, 1)


@pytest.mark.parametrize("x,expected", [("", 1), ("01", Fraction(1, 4)), ("101", Fraction(1, 8))])
def test_cylinder_measure_examples(x, expected):
    lo, hi = interval(x)
    assert hi - lo == expected
    assert cylinder_measure(x) == expected


@pytest.mark.parametrize(
    "members,expected",
    [(["0", "1"], 1), (["0", "01"], Fraction(1, 2)), (["00", "01"], Fraction(1, 2))],
)
def test_prefix_set_measure_examples(members, expected):
    assert union_length(members) == expected
    assert prefix_set_measure(members) == expected


@given(words)
def test_cylinder_additivity(x):
    assert cylinder_measure(x) == cylinder_measure(x + "0") + cylinder_measure(x + "1")


@given(st.text(alphabet="01", max_size=12))
def test_two_tails_consistency(x):
    assert dyadic_expand(x + "1", "zeros") == dyadic_expand(x + "0", "ones")


@given(st.integers(0, 12).flatmap(lambda n: st.tuples(st.text("01", min_size=n, max_size=n), st.text("01", min_size=n, max_size=n))))
def test_dyadic_monotone_in_lex_order(pair):
    a, b = sorted(pair)
    assert dyadic_expand(a).as_fraction() <= dyadic_expand(b).as_fraction()


@given(st.lists(words, max_size=12))
def test_prefix_set_measure_matches_interval_union(members):
    assert prefix_set_measure(members) == union_length(members)


@given(st.lists(words, min_size=1, max_size=10), st.data())
def test_measure_invariant_under_adding_extension(members, data):
    base = data.draw(st.sampled_from(members))
    ext = base + data.draw(st.text("01", min_size=1, max_size=6))
    assert prefix_set_measure(members + [ext]) == prefix_set_measure(members)


@given(st.lists(words, max_size=12))
def test_canonical_is_prefix_free_and_keeps_shorter(members):
    canon = [str(m) for m in PrefixSet(members).canonical()]
    assert len(set(canon)) == len(canon)
    for a in canon:
        for b in canon:
            assert a == b or not b.startswith(a)
    for m in members:
        assert any(m.startswith(c) for c in canon)


def test_prefix_set_from_codes_and_membership():
    s = PrefixSet.from_codes(3, [0, 5, 5])
    assert len(s) == 2
    assert "101" in s and "000" in s and "001" not in s
    assert s == PrefixSet(["000", "101"])


def test_dyadic_serialization_round_trip():
    assert format_dyadic(Fraction(3, 8)) == "3/2^3"
    assert parse_dyadic("3/2^3") == Fraction(3, 8)
    assert str(dyadic_expand("", "ones")) == "1/2^0"
    with pytest.raises(ValidationError):
        format_dyadic(Fraction(1, 3))
