import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from univoque.words import (
    DigitStream,
    EventuallyPeriodicWord,
    Order,
    Word,
    compare_prefix,
    format_sequence,
    is_alpha_admissible,
    lex_compare,
    metric_rho,
    minus_one,
    parse_sequence,
    plus_one,
    reflect,
    shift,
)


def epw(text, M=1):
    return parse_sequence(text, M)


@st.composite
def words(draw, M=None):
    M = draw(st.integers(1, 3)) if M is None else M
    pre = draw(st.lists(st.integers(0, M), max_size=5))
    per = draw(st.lists(st.integers(0, M), min_size=1, max_size=5))
    return EventuallyPeriodicWord(tuple(pre), tuple(per), M)


def test_canonical_form_merges_representations():
    assert epw("1(01)") == epw("(10)")
    assert epw("11(0101)") == epw("11(01)")
    assert epw("110(1001)").preperiod == (1, 1, 0)
    assert epw("1101(1001)") == epw("110(1100)")
    assert str(epw("10(10)")) == "(10)"


def test_parse_and_format_round_trip():
    for text in ("(1)", "11(01)", "2(10)", "0(0)"):
        s = parse_sequence(text, 2)
        assert parse_sequence(format_sequence(s), 2) == s
    assert parse_sequence("11") == EventuallyPeriodicWord((1, 1), (0,), 1)
    with pytest.raises(ValueError):
        parse_sequence("1(", 1)
    with pytest.raises(ValueError):
        parse_sequence("12", 1)


def test_indexing_is_one_based():
    s = epw("10(01)")
    assert [s[i] for i in range(1, 7)] == [1, 0, 0, 1, 0, 1]
    with pytest.raises(IndexError):
        s[0]
    assert s.prefix(5) == Word((1, 0, 0, 1, 0), 1)


def test_reflect_plus_minus():
    assert reflect(Word.from_str("1101")) == Word.from_str("0010")
    assert plus_one(reflect(Word.from_str("1101"))) == Word.from_str("0011")
    assert minus_one(Word.from_str("11")) == Word.from_str("10")
    with pytest.raises(ValueError):
        plus_one(Word.from_str("1"))
    with pytest.raises(ValueError):
        minus_one(Word.from_str("10"))
    assert reflect(epw("2(10)", 2)) == epw("0(12)", 2)


def test_lex_compare_exact_cases():
    assert lex_compare(epw("(10)"), epw("11")) is Order.LESS
    assert lex_compare(epw("(1)"), epw("(1)")) is Order.EQUAL
    assert lex_compare(epw("(1100)"), epw("(1101)")) is Order.LESS
    # differ only far into the periodic part
    a = EventuallyPeriodicWord((), (1,) * 7 + (0,), 1)
    b = EventuallyPeriodicWord((), (1,) * 7 + (0,) + (1,) * 8 + (0, 0), 1)
    assert lex_compare(a, b) is Order.LESS


def test_lex_compare_with_streams():
    tm = DigitStream(lambda i: bin(i).count("1") & 1)
    assert lex_compare(tm, epw("(1)")) is Order.LESS
    same = DigitStream(lambda i: 1)
    assert lex_compare(same, epw("(1)"), depth_hint=20) is Order.TIED_TO_DEPTH


def test_compare_prefix_and_shift():
    s = epw("110(10)")
    assert compare_prefix(s, Word.from_str("110")) is Order.EQUAL
    assert compare_prefix(s, Word.from_str("111")) is Order.LESS
    assert shift(s, 3) == epw("(10)")
    assert shift(s, 4) == epw("(01)")
    with pytest.raises(ValueError):
        shift(s, -1)


def test_metric_rho():
    assert metric_rho(epw("(10)"), epw("(10)")) == 0
    assert metric_rho(epw("(10)"), epw("11")) == Fraction(1, 4)
    assert metric_rho(epw("(0)", 2), epw("1", 2)) == Fraction(1, 3)


def test_alpha_admissibility():
    assert is_alpha_admissible(epw("(10)"))
    assert is_alpha_admissible(epw("(1100)"))
    assert not is_alpha_admissible(epw("(01)"))
    assert not is_alpha_admissible(epw("11"))
    assert is_alpha_admissible(Word.from_str("110"))
    assert is_alpha_admissible(Word.from_str("101"))
    assert not is_alpha_admissible(Word.from_str("011"))


def test_alphabet_mismatch_and_digit_range():
    with pytest.raises(ValueError):
        lex_compare(epw("(1)", 1), epw("(1)", 2))
    with pytest.raises(ValueError):
        Word((0, 3), 2)


@given(words())
def test_canonical_idempotent(w):
    again = EventuallyPeriodicWord(w.preperiod, w.period, w.M)
    assert again == w and again.preperiod == w.preperiod and again.period == w.period
    unrolled = EventuallyPeriodicWord(w.preperiod + w.period, w.period * 3, w.M)
    assert unrolled == w


@settings(max_examples=200)
@given(st.integers(1, 2).flatmap(lambda M: st.tuples(words(M), words(M), words(M))))
def test_lex_is_a_total_order(t):
    a, b, c = t
    ab, ba = lex_compare(a, b), lex_compare(b, a)
    if ab is Order.EQUAL:
        assert ba is Order.EQUAL and a == b
    else:
        assert {ab, ba} == {Order.LESS, Order.GREATER}
    if ab is Order.LESS and lex_compare(b, c) is Order.LESS:
        assert lex_compare(a, c) is Order.LESS


@settings(max_examples=200)
@given(st.tuples(words(1), words(1), words(1)))
def test_rho_ultrametric(t):
    a, b, c = t
    assert metric_rho(a, c) <= max(metric_rho(a, b), metric_rho(b, c))


@given(words(), st.integers(0, 12))
def test_shift_commutes_with_stream(w, n):
    s1 = shift(w.to_stream(), n)
    s2 = shift(w, n).to_stream()
    assert all(s1[i] == s2[i] for i in range(1, 60))


@pytest.mark.parametrize("M", [1, 2])
def test_reflection_reverses_order_exhaustive(M):
    ws = [Word(d, M).infinite() for n in range(1, 5) for d in itertools.product(range(M + 1), repeat=n)]
    for a, b in itertools.product(ws, repeat=2):
        assert (lex_compare(a, b) is Order.LESS) == (lex_compare(reflect(b), reflect(a)) is Order.LESS)


@pytest.mark.parametrize("M", [1, 2])
def test_reflection_reverses_order_same_length_words(M):
    # finite words of one length, up to 6, compared as tuples
    for n in range(1, 7):
        ws = list(itertools.product(range(M + 1), repeat=n))
        refl = {w: reflect(Word(w, M)).digits for w in ws}
        for a, b in itertools.combinations(ws, 2):
            assert (a < b) == (refl[b] < refl[a])
