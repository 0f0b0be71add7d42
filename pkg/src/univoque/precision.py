"""Certified real numbers: a midpoint/radius ball plus optional exact data.

A ``PrecisionReal`` always carries an Arb ball that contains the real it
stands for. Some reals know more about themselves:

* ``exact`` -- the value is this rational number;
* ``poly`` and ``bracket`` -- the value is the only root of the integer
  polynomial ``poly`` inside the closed rational interval ``bracket``;
* ``refiner`` -- a callable returning the same real at a higher precision.

Exact and algebraic data make it possible to decide equalities (for instance
whether q * r is exactly an integer) that ball arithmetic alone can only
bracket.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Callable, Optional

import flint
from flint import arb, fmpq, fmpq_poly, fmpz, fmpz_poly

__all__ = [
    "PrecisionReal",
    "PrecisionExhausted",
    "working_precision",
    "to_fmpq",
    "as_real",
    "horner",
    "DEFAULT_PRECISION_BITS",
    "MAX_PRECISION_BITS",
]

DEFAULT_PRECISION_BITS = 128
MAX_PRECISION_BITS = 4096


class PrecisionExhausted(ArithmeticError):
    """Ball arithmetic could not separate a decision even at the precision cap."""


@contextlib.contextmanager
def working_precision(bits: int):
    """Temporarily set the Arb working precision (process-global)."""
    old = flint.ctx.prec
    flint.ctx.prec = max(int(bits), 16)
    try:
        yield
    finally:
        flint.ctx.prec = old


def to_fmpq(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, (int, fmpz)):
        return fmpq(int(x))
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return to_fmpq(_parse_decimal(x))
    if isinstance(x, float):
        # decimal semantics: 1.7 means 17/10, not the nearest double
        return to_fmpq(_parse_decimal(repr(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def _parse_decimal(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a decimal or rational number: {text!r}") from exc


def _fmpq_to_fraction(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def horner(coeffs, x: arb) -> arb:
    """Evaluate sum coeffs[i] x^i (ascending order) on a ball."""
    acc = arb(0)
    for c in reversed(coeffs):
        acc = acc * x + arb(c)
    return acc


def _interval_ball(lo: fmpq, hi: fmpq) -> arb:
    return arb(lo).union(arb(hi))


def _arb_to_fmpq_bounds(b: arb) -> tuple[fmpq, fmpq]:
    lo_m, lo_e = b.lower().mid().man_exp()
    hi_m, hi_e = b.upper().mid().man_exp()

    def val(m, e):
        m, e = int(m), int(e)
        return fmpq(m * 2**e) if e >= 0 else fmpq(m, 2 ** (-e))

    lo, hi = val(lo_m, lo_e), val(hi_m, hi_e)
    # lower()/upper() are themselves rounded outward, so widen by one ulp
    ulp = fmpq(1, 2 ** (flint.ctx.prec + 8))
    return lo - ulp * (abs(lo) + 1), hi + ulp * (abs(hi) + 1)


@dataclass(frozen=True, eq=False)
class PrecisionReal:
    """A real number together with a certified enclosure."""

    ball: arb
    precision_bits: int = DEFAULT_PRECISION_BITS
    exact: Optional[fmpq] = None
    poly: Optional[fmpz_poly] = None
    bracket: Optional[tuple[fmpq, fmpq]] = None
    refiner: Optional[Callable[[int], "PrecisionReal"]] = field(default=None, repr=False)
    label: str = ""

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_rational(cls, x, bits: int = DEFAULT_PRECISION_BITS, label: str = "") -> "PrecisionReal":
        q = to_fmpq(x)
        with working_precision(bits):
            ball = arb(q)
        return cls(ball, bits, exact=q, label=label)

    @classmethod
    def from_decimal(cls, text: str, bits: int = DEFAULT_PRECISION_BITS) -> "PrecisionReal":
        return cls.from_rational(_parse_decimal(text), bits)

    @classmethod
    def from_ball(cls, ball: arb, bits: int = DEFAULT_PRECISION_BITS,
                  refiner: Optional[Callable[[int], "PrecisionReal"]] = None,
                  label: str = "") -> "PrecisionReal":
        return cls(ball, bits, refiner=refiner, label=label)

    @classmethod
    def from_poly_root(cls, poly: fmpz_poly, lo, hi, bits: int = DEFAULT_PRECISION_BITS,
                       tol=None, label: str = "") -> "PrecisionReal":
        """The unique root of ``poly`` in [lo, hi], bisected to width <= tol.

        The caller guarantees uniqueness of the root in the bracket (e.g. by a
        monotonicity argument); a sign change at the endpoints is checked.
        """
        lo, hi = to_fmpq(lo), to_fmpq(hi)
        if not lo < hi:
            raise ValueError("empty bracket")
        poly = fmpz_poly(poly)
        width = to_fmpq(tol) if tol is not None else fmpq(1, 2**bits)
        s_lo = _sign(poly(lo))
        if s_lo == 0:
            return cls._rational_root(poly, lo, bits, label)
        s_hi = _sign(poly(hi))
        if s_hi == 0:
            return cls._rational_root(poly, hi, bits, label)
        if s_lo == s_hi:
            raise ValueError("polynomial has no sign change on the bracket")
        while hi - lo > width:
            mid = (lo + hi) / 2
            s = _sign(poly(mid))
            if s == 0:
                return cls._rational_root(poly, mid, bits, label)
            if s == s_lo:
                lo = mid
            else:
                hi = mid
        with working_precision(bits):
            ball = _interval_ball(lo, hi)
        return cls(ball, bits, poly=poly, bracket=(lo, hi), label=label)

    @classmethod
    def _rational_root(cls, poly, r, bits, label):
        out = cls.from_rational(r, bits, label)
        return replace(out, poly=poly, bracket=(r, r))

    # -- accessors ------------------------------------------------------
    @property
    def value(self) -> arb:
        return self.ball.mid()

    @property
    def radius(self) -> arb:
        return self.ball.rad()

    @property
    def lower(self) -> arb:
        return self.ball.lower()

    @property
    def upper(self) -> arb:
        return self.ball.upper()

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def is_algebraic(self) -> bool:
        return self.exact is not None or self.poly is not None

    def __float__(self) -> float:
        return float(self.ball.mid())

    def __repr__(self) -> str:
        tag = f" {self.label}" if self.label else ""
        return f"PrecisionReal({self.to_string(20)}{tag})"

    def to_string(self, digits: int = 20) -> str:
        """Decimal midpoint and radius, e.g. ``1.61803398874989484820 +/- 2.2e-39``."""
        with working_precision(max(self.precision_bits, 64)):
            mid = self.ball.mid().str(digits, radius=False)
            rad = self.ball.rad()
            r = "0" if rad == 0 else f"{float(rad.upper()):.2e}"
        return f"{mid} +/- {r}"

    def interval(self) -> tuple[fmpq, fmpq]:
        """Rational bounds lo <= value <= hi."""
        if self.exact is not None:
            return self.exact, self.exact
        if self.bracket is not None:
            return self.bracket
        with working_precision(self.precision_bits):
            return _arb_to_fmpq_bounds(self.ball)

    # -- refinement -----------------------------------------------------
    def refine(self, bits: int) -> "PrecisionReal":
        """The same real at ``bits`` of precision (or self if it cannot improve)."""
        if bits <= self.precision_bits and self.radius_bits() >= bits - 4:
            return self
        if self.exact is not None:
            return replace(PrecisionReal.from_rational(self.exact, bits, self.label), poly=self.poly,
                           bracket=self.bracket)
        if self.poly is not None and self.bracket is not None:
            lo, hi = self.bracket
            out = PrecisionReal.from_poly_root(self.poly, lo, hi, bits, label=self.label)
            return replace(out, refiner=self.refiner)
        if self.refiner is not None:
            return self.refiner(bits)
        return self

    def radius_bits(self) -> int:
        """-log2(radius), i.e. how many bits after the binary point are certain."""
        rad = self.ball.rad()
        if rad == 0:
            return 1 << 30
        return int(-float(arb(rad).log() / arb(2).log()))

    # -- exact decisions --------------------------------------------------
    def is_root_of(self, T: fmpq_poly) -> Optional[bool]:
        """Decide T(self) == 0 exactly, or None when no exact data is known."""
        T = fmpq_poly(T)
        if T.is_zero():
            return True
        if self.exact is not None:
            return T(self.exact) == 0
        if self.poly is None or self.bracket is None:
            return None
        g = fmpq_poly(self.poly).gcd(T)
        if g.degree() < 1:
            return False
        # squarefree part, so a root of g inside the bracket gives a sign change
        g = g // g.gcd(g.derivative()) if g.degree() > 1 else g
        lo, hi = self.bracket
        a, b = g(lo), g(hi)
        return a == 0 or b == 0 or _sign(a) != _sign(b)

    # -- certified comparisons -------------------------------------------
    def certainly_less(self, other) -> bool:
        return bool(self.ball < as_real(other, self.precision_bits).ball)

    def certainly_greater(self, other) -> bool:
        return bool(self.ball > as_real(other, self.precision_bits).ball)

    def equals_exactly(self, other) -> Optional[bool]:
        other = as_real(other, self.precision_bits)
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        if not self.ball.overlaps(other.ball):
            return False
        if other.exact is not None:
            return self.is_root_of(fmpq_poly([-other.exact, 1]))
        if self.exact is not None:
            return other.is_root_of(fmpq_poly([-self.exact, 1]))
        if other.poly is not None and other.bracket is not None and self.bracket is not None:
            # other is the only root of its polynomial inside its bracket
            root = self.is_root_of(fmpq_poly(other.poly))
            if root is False:
                return False
            lo, hi = other.bracket
            if root and lo <= self.bracket[0] and self.bracket[1] <= hi:
                return True
        return None

    def compare(self, other) -> int:
        """-1, 0 or +1 with certainty; raises PrecisionExhausted if undecidable."""
        other = as_real(other, self.precision_bits)
        if other is self:
            return 0
        a, b = self, other
        bits = max(a.precision_bits, b.precision_bits)
        while True:
            if a.ball < b.ball:
                return -1
            if a.ball > b.ball:
                return 1
            eq = a.equals_exactly(b)
            if eq:
                return 0
            if bits >= MAX_PRECISION_BITS:
                raise PrecisionExhausted(f"cannot order {a!r} and {b!r}")
            bits *= 2
            a2, b2 = a.refine(bits), b.refine(bits)
            if a2 is a and b2 is b:
                raise PrecisionExhausted(f"cannot order {a!r} and {b!r} (no refinement available)")
            a, b = a2, b2

    # -- light arithmetic (results lose algebraic data) -------------------
    def _combine(self, other, op) -> "PrecisionReal":
        other = as_real(other, self.precision_bits)
        bits = max(self.precision_bits, other.precision_bits)
        if self.exact is not None and other.exact is not None:
            return PrecisionReal.from_rational(op(self.exact, other.exact), bits)
        with working_precision(bits):
            ball = op(self.ball, other.ball)
        a, b = self, other
        return PrecisionReal.from_ball(ball, bits, refiner=lambda k: op_refined(a, b, op, k))

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v)

    def __radd__(self, other):
        return as_real(other, self.precision_bits)._combine(self, lambda u, v: u + v)

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v)

    def __rsub__(self, other):
        return as_real(other, self.precision_bits)._combine(self, lambda u, v: u - v)

    def __mul__(self, other):
        return self._combine(other, lambda u, v: u * v)

    def __rmul__(self, other):
        return as_real(other, self.precision_bits)._combine(self, lambda u, v: u * v)

    def __truediv__(self, other):
        return self._combine(other, lambda u, v: u / v)

    def __rtruediv__(self, other):
        return as_real(other, self.precision_bits)._combine(self, lambda u, v: u / v)


def op_refined(a: PrecisionReal, b: PrecisionReal, op, bits: int) -> PrecisionReal:
    return a.refine(bits)._combine(b.refine(bits), op)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def as_real(x, bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
    """Coerce ints, Fractions, decimal strings and floats to ``PrecisionReal``.

    Floats are read through their shortest repr, so ``1.7`` is the rational 17/10.
    """
    if isinstance(x, PrecisionReal):
        return x
    if isinstance(x, arb):
        return PrecisionReal.from_ball(x, bits)
    return PrecisionReal.from_rational(x, bits)
