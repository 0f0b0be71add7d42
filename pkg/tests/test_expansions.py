import random

import pytest
from flint import fmpq
from hypothesis import given, settings
from hypothesis import strategies as st

from univoque.bases import golden_ratio_base, komornik_loreti_base, thue_morse_shift
from univoque.expansions import (
    Verdict,
    alpha,
    greedy_expand,
    is_unique_expansion,
    periodic_expansion,
    pi_polynomial,
    pi_q,
    prefix_violation,
    quasi_greedy_expand,
)
from univoque.words import EventuallyPeriodicWord, Word, parse_sequence


def epw(text, M=1):
    return parse_sequence(text, M)


def test_pi_closed_form():
    assert pi_q(epw("(1)"), 2).exact == 1
    assert pi_q(epw("1"), 3).exact == fmpq(1, 3)
    assert pi_q(epw("(2)", 2), 3).exact == 1
    phi = golden_ratio_base(1)
    assert abs(float(pi_q(epw("(10)"), phi)) - 1) < 1e-15


def test_pi_of_stream_brackets_value():
    v = pi_q(thue_morse_shift(), komornik_loreti_base(1), depth=200)
    assert abs(float(v) - 1) < 1e-10


def test_pi_polynomial_sign():
    d = epw("(1100)")
    F = pi_polynomial(d, 1)
    q = fmpq(17, 10)
    assert (F(q) > 0) == (pi_q(d, q).exact > 1)


def test_integer_base_digits():
    assert str(greedy_expand(fmpq(1, 3), 2, 8).digits) == "01010101"
    assert str(greedy_expand("0.5", 2, 4).digits) == "1000"
    assert greedy_expand("0.5", 2, 4).terminated
    assert str(quasi_greedy_expand("0.5", 2, 4).digits) == "0111"
    assert str(greedy_expand(1, 3, 5, M=2).digits) == "22222"


def test_golden_boundaries_are_exact():
    phi = golden_ratio_base(1)
    assert str(greedy_expand(1, phi, 8).digits) == "11000000"
    assert str(quasi_greedy_expand(1, phi, 8).digits) == "10101010"
    assert str(alpha(phi, 6).digits) == "101010"


def test_alpha_at_M_plus_one():
    assert str(alpha(2, 10).digits) == "1" * 10
    assert str(alpha(3, 5, 2).digits) == "22222"


def test_uniqueness_verdicts():
    phi = golden_ratio_base(1)
    assert is_unique_expansion(epw("(10)"), phi) is Verdict.NOT_UNIQUE
    assert is_unique_expansion(epw("11"), phi) is Verdict.NOT_UNIQUE
    assert is_unique_expansion(epw("(1)"), phi) is Verdict.UNIQUE
    assert is_unique_expansion(epw("(0)"), "1.5") is Verdict.UNIQUE
    q = fmpq(19, 10)
    assert is_unique_expansion(epw("(110)"), q) is Verdict.UNIQUE
    assert is_unique_expansion(epw("(10)"), fmpq(3, 2)) is Verdict.NOT_UNIQUE


def test_prefix_violation():
    a = Word.from_str("110011")
    assert prefix_violation(Word.from_str("10110"), a) is None
    assert prefix_violation(Word.from_str("01110"), a) == 1


def test_periodic_expansion():
    assert periodic_expansion(fmpq(1, 3), 2) == epw("(01)")
    assert periodic_expansion(fmpq(1, 2), 2) == epw("0(1)")
    assert periodic_expansion(fmpq(1, 2), 2, quasi=False) == epw("1")
    with pytest.raises(ValueError):
        periodic_expansion(3, 2)


def test_bad_inputs():
    with pytest.raises(ValueError):
        greedy_expand(1, 1, 4)
    with pytest.raises(ValueError):
        greedy_expand(5, "1.5", 4)
    with pytest.raises(ValueError):
        quasi_greedy_expand(0, "1.5", 4)


rationals = st.integers(1, 999).map(lambda k: fmpq(k, 1000))
bases = st.integers(1030, 1990).map(lambda k: fmpq(k, 1000))


@settings(max_examples=150, deadline=None)
@given(rationals, bases)
def test_round_trip(frac, q):
    x = frac / (q - 1)
    n = 24
    g = greedy_expand(x, q, n)
    v = pi_q(g.digits.infinite(), q).exact
    assert v <= x and x - v <= q ** (-n) / (q - 1)


@settings(max_examples=150, deadline=None)
@given(rationals, bases)
def test_sandwich(frac, q):
    x = frac / (q - 1)
    g = greedy_expand(x, q, 20)
    h = quasi_greedy_expand(x, q, 20)
    assert h.digits.digits <= g.digits.digits
    if not g.terminated:
        assert h.digits == g.digits


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 900).map(lambda k: fmpq(k, 1000)), bases, bases)
def test_quasi_greedy_increasing_in_q(x, q1, q2):
    q1, q2 = sorted((q1, q2))
    assert quasi_greedy_expand(x, q1, 20).digits.digits <= quasi_greedy_expand(x, q2, 20).digits.digits


@settings(max_examples=100, deadline=None)
@given(rationals, st.integers(1, 2), st.integers(1050, 2950))
def test_quasi_greedy_tail_condition(frac, M, k):
    q = min(fmpq(k, 1000), fmpq(M + 1) - fmpq(1, 100))
    x = frac * M / (q - 1)
    d = quasi_greedy_expand(x, q, 24, M).digits.digits
    a = alpha(q, 24, M).digits.digits
    for i, c in enumerate(d):
        if c < M:
            assert d[i + 1:] <= a[: 23 - i]


def test_uniqueness_consistency_random():
    rng = random.Random(0)
    hits = 0
    for _ in range(200):
        q = fmpq(rng.randint(1650, 1990), 1000)
        pre = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 3)))
        per = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 6)))
        d = EventuallyPeriodicWord(pre, per, 1)
        if d.ends_with_zeros and not d.preperiod:
            continue
        if is_unique_expansion(d, q) is Verdict.UNIQUE:
            hits += 1
            x = pi_q(d, q)
            assert greedy_expand(x, q, 16).digits == quasi_greedy_expand(x, q, 16).digits == d.prefix(16)
    assert hits > 5
