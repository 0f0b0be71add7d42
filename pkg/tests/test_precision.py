import pytest
from flint import arb, fmpq, fmpq_poly, fmpz_poly

from univoque.precision import (
    MAX_PRECISION_BITS,
    PrecisionExhausted,
    PrecisionReal,
    as_real,
    to_fmpq,
)


def test_decimal_parsing_is_exact():
    assert to_fmpq("1.7") == fmpq(17, 10)
    assert to_fmpq(1.7) == fmpq(17, 10)
    assert to_fmpq("3/7") == fmpq(3, 7)
    with pytest.raises(ValueError):
        to_fmpq("1.2.3")


def test_poly_root_bracket_and_refine():
    golden = PrecisionReal.from_poly_root(fmpz_poly([-1, -1, 1]), 1, 2, 64, tol=fmpq(1, 10**15))
    assert abs(float(golden) - 1.6180339887498949) < 1e-14
    fine = golden.refine(256)
    lo, hi = fine.interval()
    assert hi - lo < fmpq(1, 2**200)
    assert golden.is_root_of(fmpq_poly([-1, -1, 1]))
    assert golden.is_root_of(fmpq_poly([-1, 1])) is False


def test_compare_exact_equal_and_ordered():
    a = as_real("1.5")
    assert a.compare(fmpq(3, 2)) == 0
    assert a.compare("1.4") == 1
    assert as_real(1).compare(a) == -1


def test_compare_algebraic_equality():
    golden = PrecisionReal.from_poly_root(fmpz_poly([-1, -1, 1]), 1, 2)
    other = PrecisionReal.from_poly_root(fmpz_poly([-1, -1, 1]) * fmpz_poly([-5, 1]), 1, 2)
    assert golden.compare(other) == 0


def test_compare_undecidable_raises():
    fuzzy = PrecisionReal.from_ball(arb(1, 1e-3))
    with pytest.raises(PrecisionExhausted):
        fuzzy.compare(1)
    assert MAX_PRECISION_BITS >= 1024


def test_arithmetic_keeps_exactness():
    x = as_real("0.5") + as_real("0.25")
    assert x.exact == fmpq(3, 4)
    y = 1 / as_real("4")
    assert y.exact == fmpq(1, 4)


def test_to_string_shape():
    s = as_real("1.25").to_string(5)
    assert s.startswith("1.25") and "+/-" in s
