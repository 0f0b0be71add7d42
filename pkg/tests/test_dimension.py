import math

import pytest

from univoque.dimension import (
    Strictness,
    build_automaton,
    count_words,
    dim_real_Uq,
    dim_Uq,
    dim_Ux,
    entropy_estimate,
    spectral_entropy,
    staircase_samples,
)
from univoque.words import Word

LOG2_PHI = math.log2((1 + 5 ** 0.5) / 2)


def test_two_ones_inner_keeps_alternating_words():
    aut = build_automaton(Word.from_str("11"), "inner")
    assert [count_words(aut, n) for n in range(1, 7)] == [2, 2, 2, 2, 2, 2]


def test_one_sided_golden_mean_shift():
    aut = build_automaton(Word.from_str("10"), Strictness.OUTER, symmetric=False)
    fib = [2, 3, 5, 8, 13, 21]
    assert [count_words(aut, n) for n in range(1, 7)] == fib
    assert abs(spectral_entropy(aut) - LOG2_PHI) < 1e-9


def test_full_shift():
    aut = build_automaton(Word.from_str("11"), "outer")
    assert count_words(aut, 10) == 2 ** 10
    assert abs(spectral_entropy(aut) - 1) < 1e-12


def test_accepts():
    aut = build_automaton(Word.from_str("110"), "inner")
    assert aut.accepts([1, 0, 1, 0])
    assert not aut.accepts([1, 1, 1])


def test_rejects_inadmissible_prefix():
    with pytest.raises(ValueError):
        build_automaton(Word.from_str("011"))
    with pytest.raises(ValueError):
        build_automaton(Word.from_str(""))


@pytest.mark.parametrize("text", ["110", "1100", "11010", "111001", "1101001"])
def test_inner_le_outer(text):
    w = Word.from_str(text)
    inner, outer = build_automaton(w, "inner"), build_automaton(w, "outer")
    for n in range(1, 14):
        assert count_words(inner, n) <= count_words(outer, n)
    assert spectral_entropy(inner) <= spectral_entropy(outer) + 1e-12


def test_difference_close_to_spectral():
    aut = build_automaton(Word.from_str("10"), "outer", symmetric=False)
    assert abs(entropy_estimate(aut, 24, 48) - LOG2_PHI) < 1e-3


def test_dimension_brackets():
    assert dim_Uq(2).lower > 0.99
    below = dim_Uq("1.7")
    assert below.upper < 1e-9
    mid = dim_Uq("1.9")
    assert 0 < mid.lower <= mid.upper < 1
    diff = dim_Uq("1.9", method="difference")
    assert diff.lower <= mid.upper + 0.05 and mid.lower <= diff.upper + 0.05
    with pytest.raises(ValueError):
        dim_Uq("1.9", method="bogus")


def test_phi_equals_psi_at_q_x():
    a, b = dim_Ux("1.25"), dim_Uq("1.8")
    assert (a.lower, a.upper) == (b.lower, b.upper)


def test_real_dimension_is_rescaled():
    sym = dim_Uq("1.9")
    real = dim_real_Uq("1.9")
    scale = math.log2(1.9)
    assert abs(real.upper - min(1.0, sym.upper / scale)) < 1e-12
    assert dim_real_Uq(2).upper == dim_Uq(2).upper


def test_staircase_monotone_and_parallel_deterministic():
    grid = [f"1.{k}" for k in range(5, 10)] + ["2"]
    rows = staircase_samples("psi", 1, grid)
    assert [r[0] for r in rows] == sorted(r[0] for r in rows)
    lows = [r[1] for r in rows]
    assert all(a <= b + 1e-12 for a, b in zip(lows, lows[1:]))
    assert staircase_samples("psi", 1, grid, jobs=2) == rows
    with pytest.raises(ValueError):
        staircase_samples("chi", 1, grid)
