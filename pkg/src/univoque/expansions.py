"""The projection pi_q, greedy and quasi-greedy expansions, alpha(q) and the
lexicographic uniqueness test.

Digits are produced by the recursion r_0 = x, t_k = q r_{k-1}, r_k = t_k - d_k.
When x and q are both rational the recursion runs in exact rational
arithmetic. Otherwise it runs on Arb balls; a digit is emitted only when the
ball t_k sits inside a single decision cell. A ball straddling an integer m is
resolved exactly when possible: if q is algebraic (a root of a known integer
polynomial) and x is rational, then t_k - m is a polynomial in q and its
vanishing is decided by a gcd. Otherwise the precision is doubled and the
computation restarts, up to ``MAX_PRECISION_BITS``.
"""
from __future__ import annotations

import enum
import math
import weakref
from dataclasses import dataclass
from typing import Optional, Union

from flint import arb, fmpq, fmpq_poly, fmpz_poly

from .precision import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    PrecisionExhausted,
    PrecisionReal,
    as_real,
    horner,
    to_fmpq,
    working_precision,
)
from .words import (
    DigitStream,
    EventuallyPeriodicWord,
    Order,
    Word,
    compare_prefix,
    is_alpha_admissible,
    reflect,
    shift,
)

__all__ = [
    "ExpansionKind",
    "ExpansionResult",
    "Verdict",
    "pi_q",
    "pi_polynomial",
    "greedy_expand",
    "quasi_greedy_expand",
    "alpha",
    "is_unique_expansion",
    "periodic_expansion",
    "prefix_violation",
    "DEFAULT_ALPHA_DEPTH",
]

DEFAULT_ALPHA_DEPTH = 64
_MAX_ALPHA_DEPTH = 1024


class ExpansionKind(enum.Enum):
    GREEDY = "greedy"
    QUASI_GREEDY = "quasi"


class Verdict(enum.Enum):
    UNIQUE = "unique"
    NOT_UNIQUE = "not_unique"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class ExpansionResult:
    """First n digits of an expansion of x in base q.

    ``residual_bound`` encloses r_n, so x - pi_q(digits 0^inf) = r_n q^(-n)
    with 0 <= r_n <= M/(q-1). ``terminated`` is set when a greedy expansion was
    found to end in 0^infinity at or before digit n.
    """

    digits: Word
    kind: ExpansionKind
    residual_bound: PrecisionReal
    terminated: bool = False
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __str__(self) -> str:
        return str(self.digits)


# -- pi_q ------------------------------------------------------------------


def _check_base(q: PrecisionReal, M: Optional[int] = None) -> None:
    if not q.ball > 1:
        raise ValueError(f"base must exceed 1, got {q!r}")
    if M is not None and q.ball > M + 1:
        raise ValueError(f"base must be at most M+1={M + 1}, got {q!r}")


def _pi_exact(d: EventuallyPeriodicWord, q: fmpq) -> fmpq:
    u = 1 / q
    a = fmpq(0)
    for c in reversed(d.preperiod):
        a = (a + c) * u
    b = fmpq(0)
    for c in reversed(d.period):
        b = (b + c) * u
    L, p = len(d.preperiod), len(d.period)
    return a + u**L * b / (1 - u**p)


def _pi_ball(d: EventuallyPeriodicWord, q: arb) -> arb:
    u = 1 / q
    a = horner((0,) + d.preperiod, u)
    b = horner((0,) + d.period, u)
    L, p = len(d.preperiod), len(d.period)
    return a + u**L * b / (1 - u**p)


def pi_q(d, q, depth: int = 64) -> PrecisionReal:
    """Sum of d_i q^(-i).

    Eventually periodic input is evaluated in closed form; a finite ``Word`` is
    read as w 0^infinity; a ``DigitStream`` is truncated after ``depth`` digits
    and the tail (at most M q^-depth / (q-1)) is folded into the radius.
    """
    q = as_real(q)
    _check_base(q)
    if isinstance(d, Word):
        d = d.infinite()
    if isinstance(d, EventuallyPeriodicWord):
        if q.exact is not None:
            return PrecisionReal.from_rational(_pi_exact(d, q.exact), q.precision_bits)
        with working_precision(q.precision_bits):
            ball = _pi_ball(d, q.ball)
        return PrecisionReal.from_ball(ball, q.precision_bits,
                                       refiner=lambda bits: pi_q(d, q.refine(bits)))
    if isinstance(d, DigitStream):
        with working_precision(q.precision_bits):
            u = 1 / q.ball
            s = horner([0] + [d[i] for i in range(1, depth + 1)], u)
            tail = arb(d.M) * u**depth / (q.ball - 1)
            ball = s + arb(0).union(tail)

        def refine(bits: int) -> PrecisionReal:
            qq = q.refine(bits)
            need = int(bits / max(math.log2(float(qq.lower)), 1e-3)) + 8
            return pi_q(d, qq, max(depth, need))

        return PrecisionReal.from_ball(ball, q.precision_bits, refiner=refine)
    raise TypeError(f"cannot evaluate {type(d).__name__}")


def pi_polynomial(d: EventuallyPeriodicWord, x) -> fmpz_poly:
    """Integer polynomial F with F(q) = q^L (q^p - 1) (pi_q(d) - x).

    For q > 1 the sign of F(q) is the sign of pi_q(d) - x, so the roots of F in
    (1, oo) are exactly the bases solving pi_q(d) = x.
    """
    x = to_fmpq(x)
    L, p = len(d.preperiod), len(d.period)
    A = fmpq_poly(list(reversed(d.preperiod)) or [0])       # sum a_i Q^(L-i)
    B = fmpq_poly(list(reversed(d.period)))                  # sum b_j Q^(p-j)
    qp1 = fmpq_poly([-1] + [0] * (p - 1) + [1])              # Q^p - 1
    QL = fmpq_poly([0] * L + [1])
    F = A * qp1 + B - x * QL * qp1
    den = F.denom()
    return fmpz_poly([int(c * den) for c in F.coeffs()])


# -- digit recursion ---------------------------------------------------------


def _digit_exact(t: fmpq, M: int, quasi: bool) -> int:
    fl = int(t.floor())
    if quasi and t == fl:
        fl -= 1
    return min(M, fl)


def _expand_exact(x: fmpq, q: fmpq, n: int, M: int, quasi: bool):
    r = x
    digits = []
    terminated = False
    for _ in range(n):
        t = q * r
        d = _digit_exact(t, M, quasi)
        digits.append(d)
        r = t - d
        if not quasi and r == 0:
            terminated = True
    return digits, r, terminated


class _NeedMorePrecision(Exception):
    pass


def _expand_ball(x: PrecisionReal, q: PrecisionReal, n: int, M: int, quasi: bool, bits: int):
    track = x.exact is not None and q.poly is not None
    # R is the residual as a polynomial in q (rational coefficients)
    R = fmpq_poly([x.exact]) if track else None
    Q = fmpq_poly([0, 1])
    digits = []
    terminated = False
    with working_precision(bits):
        qb = q.ball
        r = x.ball
        for _ in range(n):
            t = qb * r
            if quasi:
                settled = t > M
            else:
                settled = t >= M
            if settled:
                d = M
            elif not t.contains_integer():
                d = min(M, int(t.mid().floor().unique_fmpz()))
            else:
                m = t.unique_fmpz()
                if m is None or R is None:
                    raise _NeedMorePrecision
                m = int(m)
                if q.is_root_of(Q * R - m) is not True:
                    raise _NeedMorePrecision
                # t is exactly the integer m
                d = min(M, m - 1) if quasi else min(M, m)
                rest = m - d
                digits.append(d)
                r = arb(rest)
                R = fmpq_poly([rest])
                if not quasi and rest == 0:
                    terminated = True
                continue
            digits.append(d)
            r = t - d
            if R is not None:
                R = Q * R - d
            if not quasi and r == 0:
                terminated = True
    return digits, r, terminated


def _expand(x, q, n: int, M: int, quasi: bool, precision_bits: int,
            max_bits: int = MAX_PRECISION_BITS) -> ExpansionResult:
    x, q = as_real(x, precision_bits), as_real(q, precision_bits)
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_base(q, M)
    if x.ball < 0 or (quasi and x.exact is not None and x.exact == 0):
        raise ValueError(f"x must be {'positive' if quasi else 'non-negative'}, got {x!r}")
    if quasi and not x.ball > 0 and x.exact is None:
        if not x.ball >= 0:
            raise ValueError(f"x must be positive, got {x!r}")
    with working_precision(max(q.precision_bits, 64)):
        top = arb(M) / (q.ball - 1)
        if x.ball > top:
            raise ValueError(f"x={x!r} exceeds M/(q-1); no expansion exists")

    kind = ExpansionKind.QUASI_GREEDY if quasi else ExpansionKind.GREEDY
    if x.exact is not None and q.exact is not None:
        digits, r, terminated = _expand_exact(x.exact, q.exact, n, M, quasi)
        return ExpansionResult(Word(tuple(digits), M), kind,
                               PrecisionReal.from_rational(r, precision_bits), terminated,
                               precision_bits)

    # digits lose about log2(q) bits each
    bits = max(precision_bits, int(n * math.log2(max(float(q.upper), 1.0001))) + 64)
    while True:
        xx, qq = x.refine(bits), q.refine(bits)
        try:
            digits, r, terminated = _expand_ball(xx, qq, n, M, quasi, bits)
        except _NeedMorePrecision:
            if bits >= max_bits:
                raise PrecisionExhausted(
                    f"cannot resolve {kind.value} digits of x={x!r} in base q={q!r} "
                    f"at {bits} bits") from None
            bits = min(2 * bits, max_bits)
            continue
        return ExpansionResult(Word(tuple(digits), M), kind,
                               PrecisionReal.from_ball(r, bits), terminated, bits)


def greedy_expand(x, q, n: int, M: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS,
                  max_bits: int = MAX_PRECISION_BITS) -> ExpansionResult:
    """First n digits of the greedy (lexicographically largest) q-expansion of x."""
    return _expand(x, q, n, M, False, precision_bits, max_bits)


def quasi_greedy_expand(x, q, n: int, M: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS,
                        max_bits: int = MAX_PRECISION_BITS) -> ExpansionResult:
    """First n digits of the largest q-expansion of x not ending in 0^infinity."""
    return _expand(x, q, n, M, True, precision_bits, max_bits)


_alpha_cache: "weakref.WeakKeyDictionary[PrecisionReal, dict]" = weakref.WeakKeyDictionary()


def alpha(q, n: int, M: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS) -> ExpansionResult:
    """alpha(q): the quasi-greedy expansion of 1 in base q, first n digits."""
    q = as_real(q, precision_bits)
    per_q = _alpha_cache.setdefault(q, {})
    best = per_q.get(M)
    if best is not None and len(best.digits) >= n:
        if len(best.digits) == n:
            return best
        return ExpansionResult(best.digits[:n], best.kind, best.residual_bound,
                               best.terminated, best.precision_bits)
    res = quasi_greedy_expand(1, q, n, M, precision_bits)
    per_q[M] = res
    return res


# -- uniqueness --------------------------------------------------------------


def _alpha_equals(s: EventuallyPeriodicWord, q: PrecisionReal) -> Optional[bool]:
    """Exactly decide alpha(q) == s, or None if q carries no exact data."""
    if not is_alpha_admissible(s):
        return False
    if q.exact is None and q.poly is None:
        return None
    # s is alpha(q') for the unique q' with pi_q'(s) = 1; compare q with q'
    return q.is_root_of(fmpq_poly(pi_polynomial(s, 1)))


def is_unique_expansion(d: EventuallyPeriodicWord, q, alpha_depth: int = DEFAULT_ALPHA_DEPTH,
                        precision_bits: int = DEFAULT_PRECISION_BITS) -> Verdict:
    """Lexicographic test of whether d is the unique q-expansion of pi_q(d).

    Checks sigma^n(d) < alpha(q) whenever d_n < M and reflect(sigma^n(d)) <
    alpha(q) whenever d_n > 0, for every n >= 1. Only finitely many shifted
    tails exist. Ties with the alpha prefix are settled exactly when q carries
    exact data, otherwise alpha is extended; a tie that survives is UNDECIDED.
    """
    q = as_real(q, precision_bits)
    M = d.M
    _check_base(q, M)
    depth = alpha_depth
    a = alpha(q, depth, M, precision_bits).digits
    undecided = False
    tails = []
    for n in range(1, len(d.preperiod) + len(d.period) + 1):
        dn = d[n]
        tail = shift(d, n)
        if dn < M:
            tails.append(tail)
        if dn > 0:
            tails.append(reflect(tail))
    for s in dict.fromkeys(tails):
        while True:
            c = compare_prefix(s, a)
            if c is Order.LESS:
                break
            if c is Order.GREATER:
                return Verdict.NOT_UNIQUE
            eq = _alpha_equals(s, q)
            if eq:
                return Verdict.NOT_UNIQUE
            if depth >= _MAX_ALPHA_DEPTH:
                undecided = True
                break
            depth = min(4 * depth, _MAX_ALPHA_DEPTH)
            a = alpha(q, depth, M, precision_bits).digits
    return Verdict.UNDECIDED if undecided else Verdict.UNIQUE


def prefix_violation(d: Word, a: Word) -> Optional[int]:
    """First n at which a uniqueness clause certainly fails on finite data.

    ``d`` is a prefix of a sequence and ``a`` a prefix of alpha(q) of at least
    the same length. A clause fails at n when the window d_(n+1)..d_D is
    lexicographically greater than alpha_1..alpha_(D-n) (after reflection for
    the d_n > 0 clause); a window equal to the alpha prefix decides nothing.
    Returns None when no clause fails.
    """
    M = d.M
    dd, aa = d.digits, a.digits
    for n in range(1, len(dd)):
        tail = dd[n:]
        ref = aa[: len(tail)]
        if dd[n - 1] < M and tail > ref:
            return n
        if dd[n - 1] > 0 and tuple(M - c for c in tail) > ref:
            return n
    return None


def periodic_expansion(x, q, M: int = 1, quasi: bool = True,
                       max_steps: int = 100_000) -> EventuallyPeriodicWord:
    """The full (quasi-)greedy expansion of rational x in rational base q, as an
    eventually periodic sequence, found by detecting a repeated residual.

    Always terminates for integer bases; for other rational bases a repeat may
    never occur, in which case ``ValueError`` is raised after ``max_steps``.
    """
    xq, qq = to_fmpq(x), to_fmpq(q)
    if not qq > 1 or qq > M + 1:
        raise ValueError("base must lie in (1, M+1]")
    if xq < 0 or xq > M / (qq - 1) or (quasi and xq == 0):
        raise ValueError("x outside the range of expansions")
    seen = {}
    digits = []
    r = xq
    for k in range(max_steps):
        if r in seen:
            start = seen[r]
            return EventuallyPeriodicWord(tuple(digits[:start]), tuple(digits[start:]), M)
        seen[r] = k
        t = qq * r
        d = _digit_exact(t, M, quasi)
        digits.append(d)
        r = t - d
    raise ValueError(f"no period found within {max_steps} digits")
