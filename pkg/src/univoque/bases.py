"""Inverting expansions to bases, and the critical constants q_x, q_G, q_KL,
x_G and x_KL.

All root finding is bisection. For a fixed sequence d other than 0^infinity the
map q -> pi_q(d) is strictly decreasing on (1, oo), so a sign change brackets
a unique root. When x is rational the equation pi_q(d) = x is equivalent to an
integer polynomial equation and the bisection runs on exact signs; the result
remembers the polynomial so that later digit computations can settle exact
boundary cases.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

from flint import arb, fmpq, fmpz_poly

from .expansions import _pi_ball, alpha, greedy_expand, pi_polynomial, prefix_violation
from .precision import (
    DEFAULT_PRECISION_BITS,
    PrecisionReal,
    _interval_ball,
    as_real,
    horner,
    to_fmpq,
    working_precision,
)
from .words import DigitStream, EventuallyPeriodicWord

__all__ = [
    "CriticalConstants",
    "q_of_x",
    "invert_base",
    "golden_ratio_base",
    "komornik_loreti_base",
    "critical_constants",
    "thue_morse_shift",
    "doubling_prefix",
    "DEFAULT_TOL",
]

DEFAULT_TOL = fmpq(1, 10**12)
# pi_q(d) is evaluated here instead of at q = 1 itself, where it may diverge
_LOW_CUTOFF = fmpq(1) + fmpq(1, 10**9)


def _tol(tol) -> fmpq:
    t = DEFAULT_TOL if tol is None else to_fmpq(tol)
    if not t > 0:
        raise ValueError("tol must be positive")
    return t


def q_of_x(x, M: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
    """q_x = min(M+1, 1 + M/x), the largest base in which x has an expansion.

    Examples
    --------
    >>> float(q_of_x(2, 1))
    1.5
    """
    x = as_real(x, precision_bits)
    if not x.ball > 0:
        raise ValueError(f"x must be positive, got {x!r}")
    if x.exact is not None:
        return PrecisionReal.from_rational(min(fmpq(M + 1), 1 + M / x.exact), precision_bits)
    if x.ball >= 1:
        return 1 + M / x
    if x.ball <= 1:
        return PrecisionReal.from_rational(M + 1, precision_bits)
    with working_precision(precision_bits):
        ball = (1 + M / x.ball).union(arb(M + 1)).intersection(arb(M + 1) - arb(0).union(arb(M)))
    return PrecisionReal.from_ball(ball, precision_bits,
                                   refiner=lambda bits: q_of_x(x.refine(bits), M, bits))


def _pi_range(d: EventuallyPeriodicWord, bits: int) -> tuple[arb, arb]:
    with working_precision(bits):
        return _pi_ball(d, arb(_LOW_CUTOFF)), _pi_ball(d, arb(d.M + 1))


def invert_base(d: EventuallyPeriodicWord, x, tol=None,
                precision_bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
    """Solve pi_q(d) = x for q in (1, M+1].

    Parameters
    ----------
    d : EventuallyPeriodicWord
        Any sequence except 0^infinity.
    x : real
        Target value; rational input gives an exactly bracketed algebraic root.
    tol : real, default=1e-12
        Width of the final bracket.

    Returns
    -------
    PrecisionReal
        The base, with radius at most ``tol``.
    """
    if d.ends_with_zeros and not d.preperiod:
        raise ValueError("cannot invert the zero sequence")
    x = as_real(x, precision_bits)
    M = d.M
    tol = _tol(tol)
    lo, hi = _LOW_CUTOFF, fmpq(M + 1)
    p_lo, p_hi = _pi_range(d, precision_bits)
    if x.ball > p_lo or x.ball < p_hi:
        raise ValueError(f"no base in (1, {M + 1}] solves pi_q({d}) = {x.to_string(12)}")
    if x.exact is not None:
        return PrecisionReal.from_poly_root(pi_polynomial(d, x.exact), lo, hi, precision_bits,
                                            tol=tol, label="base")
    return _invert_ball(d, x, tol, precision_bits)


def _invert_ball(d, x: PrecisionReal, tol: fmpq, bits: int) -> PrecisionReal:
    lo, hi = _LOW_CUTOFF, fmpq(d.M + 1)
    with working_precision(bits):
        while hi - lo > tol:
            mid = (lo + hi) / 2
            diff = _pi_ball(d, arb(mid)) - x.ball
            if diff > 0:
                lo = mid
            elif diff < 0:
                hi = mid
            else:
                break
        ball = _interval_ball(lo, hi)
    refiner = None
    if x.refiner is not None or x.exact is not None:
        def refiner(k: int) -> PrecisionReal:
            return _invert_ball(d, x.refine(k), fmpq(1, 2 ** (k - 2)), k)
    return PrecisionReal(ball, bits, bracket=(lo, hi), refiner=refiner, label="base")


def golden_ratio_base(M: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
    """The generalized golden ratio q_G.

    For M = 2k it is k+1; for M = 2k+1 it is the positive root of
    q^2 - (k+1) q - (k+1), i.e. (k+1+sqrt(k^2+6k+5))/2.

    Examples
    --------
    >>> golden_ratio_base(1).to_string(10)
    '1.618033989 +/- ...'  # doctest: +SKIP
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    k, odd = divmod(M, 2)
    if not odd:
        out = PrecisionReal.from_rational(k + 1, precision_bits, label="q_G")
        return replace(out, poly=fmpz_poly([-(k + 1), 1]), bracket=(fmpq(k + 1), fmpq(k + 1)))
    poly = fmpz_poly([-(k + 1), -(k + 1), 1])
    return PrecisionReal.from_poly_root(poly, k + 1, M + 1, precision_bits, label="q_G")


def thue_morse_shift(M: int = 1) -> DigitStream:
    """The stream tau_1 tau_2 ... = 1101 0011 ... (only M = 1)."""
    if M != 1:
        raise ValueError("the Thue-Morse shift is used for M = 1 only")
    return DigitStream(lambda i: bin(i).count("1") & 1, 1)


def _thue_morse_f(q: fmpq, bits: int) -> arb:
    """pi_q(tau) - 1 as a ball, truncation tail included."""
    tm = thue_morse_shift()
    u = 1 / arb(q)
    depth = int(bits / math.log2(float(q))) + 8
    s = horner([0] + [tm[i] for i in range(1, depth + 1)], u)
    tail = u**depth / (arb(q) - 1)
    return s + arb(0).union(tail) - 1


@functools.lru_cache(maxsize=None)
def _kl_thue_morse(bits: int, tol: fmpq) -> PrecisionReal:
    lo, hi = fmpq(178, 100), fmpq(179, 100)
    with working_precision(bits + 16):
        while hi - lo > tol:
            mid = (lo + hi) / 2
            f = _thue_morse_f(mid, bits + 16)
            if f > 0:
                lo = mid
            elif f < 0:
                hi = mid
            else:
                break
        ball = _interval_ball(lo, hi)
    return PrecisionReal(ball, bits, bracket=(lo, hi),
                         refiner=lambda k: _kl_thue_morse(k, fmpq(1, 2 ** (k - 2))),
                         label="q_KL")


def _no_violation(q: fmpq, M: int, depth: int) -> bool:
    """No uniqueness clause for the greedy expansion of 1 fails within ``depth`` digits."""
    g = greedy_expand(1, q, depth, M)
    if g.terminated:
        return False
    return prefix_violation(g.digits, alpha(q, depth, M).digits) is None


def doubling_prefix(M: int, length: int) -> tuple[int, ...]:
    """First ``length`` digits of the limit of w -> w^+ reflect(w^+) started at
    the period of alpha(q_G).

    Each step doubles the length and keeps all but the last digit, so the limit
    sequence is well defined. For M = 1 it is the Thue-Morse shift 1101 0011 ...
    """
    k, odd = divmod(M, 2)
    w = [k + 1, k] if odd else [k]
    while len(w) <= length:
        w[-1] += 1
        w = w + [M - c for c in w]
    return tuple(w[:length])


@functools.lru_cache(maxsize=None)
def _kl_oracle(M: int, bits: int, tol: fmpq) -> PrecisionReal:
    lo = to_fmpq(golden_ratio_base(M).interval()[1])
    hi = fmpq(M + 1)
    depth = int(bits / math.log2(float(lo))) + 8
    digits = (0,) + doubling_prefix(M, depth)
    with working_precision(bits + 16):
        while hi - lo > tol:
            mid = (lo + hi) / 2
            u = 1 / arb(mid)
            f = horner(digits, u) + arb(0).union(M * u**depth / (arb(mid) - 1)) - 1
            if f > 0:
                lo = mid
            elif f < 0:
                hi = mid
            else:
                break
        ball = _interval_ball(lo, hi)
    return PrecisionReal(ball, bits, bracket=(lo, hi),
                         refiner=lambda k: _kl_oracle(M, k, fmpq(1, 2 ** (k - 2))),
                         label="q_KL (oracle)")


def komornik_loreti_base(M: int = 1, tol=None,
                         precision_bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
    """The Komornik-Loreti constant q_KL(M), the smallest base in which 1 has a
    unique expansion.

    For M = 1 this is the root of sum tau_i q^(-i) = 1 with tau the
    Thue-Morse shift. For M >= 2 an oracle is used: the root of
    pi_q(lambda) = 1 where lambda is the period-doubling limit of
    ``doubling_prefix``. That value is labelled ``"q_KL (oracle)"``; the
    uniqueness of the greedy expansion of 1 at the result is checked to depth
    64 by the test suite rather than assumed.
    """
    t = _tol(tol)
    if M < 1:
        raise ValueError("M must be at least 1")
    bits = max(precision_bits, int(-math.log2(float(t))) + 8)
    if M == 1:
        return _kl_thue_morse(bits, t)
    return _kl_oracle(M, bits, t)


@dataclass(frozen=True)
class CriticalConstants:
    """q_G < q_KL and the matching thresholds x_KL < x_G for one alphabet.

    ``source`` is ``"thue-morse"`` when q_KL comes from the Thue-Morse series
    and ``"oracle"`` when it was estimated by the grid oracle.
    """

    M: int
    q_G: PrecisionReal
    q_KL: PrecisionReal
    x_G: PrecisionReal
    x_KL: PrecisionReal
    source: str

    def as_dict(self, digits: int = 15) -> dict:
        return {
            "M": self.M,
            "q_G": self.q_G.to_string(digits),
            "q_KL": self.q_KL.to_string(digits),
            "x_G": self.x_G.to_string(digits),
            "x_KL": self.x_KL.to_string(digits),
            "q_KL_source": self.source,
        }


@functools.lru_cache(maxsize=None)
def _constants(M: int, tol: fmpq, bits: int) -> CriticalConstants:
    q_g = golden_ratio_base(M, bits)
    q_kl = komornik_loreti_base(M, tol, bits)
    return CriticalConstants(M, q_g, q_kl, M / (q_g - 1), M / (q_kl - 1),
                             "thue-morse" if M == 1 else "oracle")


def critical_constants(M: int = 1, tol=None,
                       precision_bits: int = DEFAULT_PRECISION_BITS) -> CriticalConstants:
    """q_G, q_KL, x_G = M/(q_G-1) and x_KL = M/(q_KL-1)."""
    return _constants(M, _tol(tol), precision_bits)
