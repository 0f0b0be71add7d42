"""Isolated points of U(x) for M = 1, built from the Thue-Morse sequence.

For n >= 1 the base q_n is defined by alpha(q_n) = (tau_1..tau_(2^n)^-)^infinity;
these bases increase to q_KL. With A = tau_1..tau_(2^(n-1)),
B = reflect(A)^+, C = reflect(tau_1..tau_(2^n))^+ and
D = reflect(tau_1..tau_(2^(n-2)))^+ the two families are

    c_(n,k) = A B^k C^infinity,    d_(n,k) = A B^k D C^infinity,

and c_(n,infinity) = A B^infinity. Every base p in (q_n, q_(n+1)) with
pi_p(c_(n,k)) = x (or d_(n,k)) is isolated in U(x). The intervals
(pi_(q_(n+1))(c_(n,k)), pi_(q_n)(c_(n,k))) cover (1, x_G) except the points
z_n = pi_(q_n)(c_(n,infinity)), which the d-family covers.
"""
from __future__ import annotations

import functools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

from flint import fmpq

from .bases import DEFAULT_TOL, critical_constants, invert_base, q_of_x
from .expansions import Verdict, is_unique_expansion, pi_q, quasi_greedy_expand
from .precision import DEFAULT_PRECISION_BITS, PrecisionReal, as_real, to_fmpq
from .slices import ScanInterval, enumerate_Ux
from .words import (
    EventuallyPeriodicWord,
    Order,
    Word,
    lex_compare,
    minus_one,
    plus_one,
    reflect,
    shift,
)

__all__ = [
    "INFINITY",
    "tau",
    "tau_word",
    "doubling_identity_holds",
    "window_bounds_hold",
    "BifurcationBase",
    "bifurcation_base",
    "c_family",
    "d_family",
    "verify_member_star",
    "IsoInterval",
    "iso_intervals",
    "z_n",
    "IsolationCertificate",
    "isolate",
    "neighborhood_scan",
]

INFINITY = float("inf")


def tau(i: int) -> int:
    """Thue-Morse digit: parity of the number of ones in the binary form of i."""
    if i < 0:
        raise ValueError("index must be non-negative")
    return bin(i).count("1") & 1


def tau_word(length: int) -> Word:
    """tau_1 .. tau_length."""
    return Word(tuple(tau(i) for i in range(1, length + 1)), 1)


def doubling_identity_holds(n: int) -> bool:
    """tau_(2^n+1)..tau_(2^(n+1)) == reflect(tau_1..tau_(2^n))^+."""
    m = 2**n
    right = Word(tuple(tau(i) for i in range(m + 1, 2 * m + 1)), 1)
    return right == plus_one(reflect(tau_word(m)))


def window_bounds_hold(n: int) -> bool:
    """reflect(tau_1..tau_(2^n-i)) < tau_(i+1)..tau_(2^n) <= tau_1..tau_(2^n-i)
    for every 0 <= i < 2^n."""
    m = 2**n
    t = tau_word(m).digits
    for i in range(m):
        window = t[i:]
        head = t[: m - i]
        if not (tuple(1 - c for c in head) < window <= head):
            return False
    return True


def _check_M(M: int) -> None:
    if M != 1:
        raise ValueError("the Thue-Morse construction of isolated points is available for M = 1 only")


@dataclass(frozen=True)
class BifurcationBase:
    """q_n with alpha(q_n) = (alpha_word)^infinity."""

    n: int
    alpha_word: Word
    q: PrecisionReal

    @property
    def alpha(self) -> EventuallyPeriodicWord:
        return self.alpha_word.periodic()

    def verify(self, depth: Optional[int] = None) -> bool:
        """The quasi-greedy expansion of 1 in base q_n repeats alpha_word."""
        depth = depth or 2 * len(self.alpha_word) + 8
        got = quasi_greedy_expand(1, self.q, depth, 1).digits
        return got == self.alpha.prefix(depth)


@functools.lru_cache(maxsize=None)
def _bifurcation_base(n: int, tol: fmpq, bits: int) -> BifurcationBase:
    word = minus_one(tau_word(2**n))
    q = invert_base(word.periodic(), 1, tol, bits)
    return BifurcationBase(n, word, q)


def bifurcation_base(n: int, tol=None,
                     precision_bits: int = DEFAULT_PRECISION_BITS) -> BifurcationBase:
    """The base q_n, an exactly bracketed algebraic number.

    Examples
    --------
    >>> str(bifurcation_base(2).alpha_word)
    '1100'
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return _bifurcation_base(n, DEFAULT_TOL if tol is None else to_fmpq(tol), precision_bits)


def _blocks(n: int) -> tuple[Word, Word, Word]:
    A = tau_word(2 ** (n - 1))
    B = plus_one(reflect(A))
    C = plus_one(reflect(tau_word(2**n)))
    return A, B, C


def c_family(n: int, k: Union[int, float]) -> EventuallyPeriodicWord:
    """c_(n,k) = A B^k C^infinity, and A B^infinity for k = INFINITY.

    Examples
    --------
    >>> str(c_family(1, 1))
    '11(01)'
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    A, B, C = _blocks(n)
    if k == INFINITY:
        return EventuallyPeriodicWord(A.digits, B.digits, 1)
    if k < 1:
        raise ValueError("k must be at least 1")
    return EventuallyPeriodicWord((A + B * int(k)).digits, C.digits, 1)


def d_family(n: int, k: Union[int, float]) -> EventuallyPeriodicWord:
    """d_(n,k) = A B^k D C^infinity for n >= 2; the k = INFINITY limit is c_(n,infinity)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if k == INFINITY:
        return c_family(n, INFINITY)
    if k < 1:
        raise ValueError("k must be at least 1")
    A, B, C = _blocks(n)
    D = plus_one(reflect(tau_word(2 ** (n - 2))))
    return EventuallyPeriodicWord((A + B * int(k) + D).digits, C.digits, 1)


def _tail_index(w: EventuallyPeriodicWord, n: int) -> Optional[int]:
    """Smallest j with sigma^j(w) equal to alpha(q_n) or its reflection."""
    a = minus_one(tau_word(2**n)).periodic()
    targets = (a, reflect(a))
    L, p = len(w.preperiod), len(w.period)
    for j in range(L + p):
        if shift(w, j) in targets:
            return j
    return None


def verify_member_star(w: EventuallyPeriodicWord, n: int, two_sided: bool = False) -> bool:
    """Exact test that w lies in U*_(q_(n+1)).

    Membership in U_(q_(n+1)) is checked with the lexicographic
    characterization against a = alpha(q_(n+1)): sigma^j(w) < a after every
    digit w_j < 1, and reflect(sigma^j(w)) < a after every digit w_j > 0. In
    addition w must end with alpha(q_n) or its reflection.

    With ``two_sided=True`` the stronger condition
    reflect(a) < sigma^j(w) < a for every j >= 1 is required instead. It is
    sufficient but not necessary: c_(1,k) fails it for k >= 2.
    """
    if w.M != 1 or n < 1:
        return False
    upper = minus_one(tau_word(2 ** (n + 1))).periodic()
    lower = reflect(upper)
    for j in range(1, len(w.preperiod) + len(w.period) + 1):
        s = shift(w, j)
        digit = w[j]
        check_upper = two_sided or digit < 1
        check_lower = two_sided or digit > 0
        if check_upper and lex_compare(s, upper) is not Order.LESS:
            return False
        if check_lower and lex_compare(lower, s) is not Order.LESS:
            return False
    return _tail_index(w, n) is not None


@dataclass(frozen=True)
class IsoInterval:
    """(lo, hi) = (pi_(q_(n+1))(w), pi_(q_n)(w)) for w = c_(n,k) or d_(n,k)."""

    lo: PrecisionReal
    hi: PrecisionReal
    n: int
    k: int
    family: str

    @property
    def word(self) -> EventuallyPeriodicWord:
        return c_family(self.n, self.k) if self.family == "C" else d_family(self.n, self.k)

    def contains(self, x: PrecisionReal) -> bool:
        return bool(self.lo.ball < x.ball) and bool(x.ball < self.hi.ball)


def _interval(args) -> IsoInterval:
    n, k, family, tol, bits = args
    word = c_family(n, k) if family == "C" else d_family(n, k)
    qn = bifurcation_base(n, tol, bits).q
    qn1 = bifurcation_base(n + 1, tol, bits).q
    return IsoInterval(pi_q(word, qn1), pi_q(word, qn), n, k, family)


def iso_intervals(n_max: int = 4, k_max: int = 6, tol=None, include_d: bool = True,
                  jobs: Optional[int] = 1,
                  precision_bits: int = DEFAULT_PRECISION_BITS) -> list[IsoInterval]:
    """All c-family intervals for n <= n_max, k <= k_max, plus the d-family ones
    for 2 <= n <= n_max, sorted by (n, k, family)."""
    tol = DEFAULT_TOL if tol is None else to_fmpq(tol)
    tasks = [(n, k, "C", tol, precision_bits) for n in range(1, n_max + 1)
             for k in range(1, k_max + 1)]
    if include_d:
        tasks += [(n, k, "D", tol, precision_bits) for n in range(2, n_max + 1)
                  for k in range(1, k_max + 1)]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_interval, tasks))
    else:
        out = [_interval(t) for t in tasks]
    return sorted(out, key=lambda r: (r.n, r.k, r.family))


def z_n(n: int, tol=None, precision_bits: int = DEFAULT_PRECISION_BITS) -> PrecisionReal:
    """z_n = pi_(q_n)(c_(n,infinity))."""
    return pi_q(c_family(n, INFINITY), bifurcation_base(n, tol, precision_bits).q)


@dataclass(frozen=True)
class IsolationCertificate:
    """p is an isolated point of U(x), with the data that proves it.

    ``family`` is "C" or "D" for the Thue-Morse families and "SINGLETON" when
    x >= x_G, where U(x) = {q_x}. ``match_length`` is N + 2^n where sigma^N of
    the expansion is alpha(q_n) or its reflection: a member of U(x) in
    (q_n, q_(n+1)) whose expansion agrees with this one on that many digits is
    this one.
    """

    x: PrecisionReal
    p: PrecisionReal
    n: int
    k: int
    family: str
    expansion: EventuallyPeriodicWord
    match_length: int
    tol: fmpq = DEFAULT_TOL

    def verify(self, precision_bits: Optional[int] = None) -> bool:
        bits = precision_bits or 2 * self.p.precision_bits
        x = self.x.refine(bits)
        p = invert_base(self.expansion, x, self.tol, bits)
        if not p.ball.overlaps(self.p.ball):
            return False
        if self.family == "SINGLETON":
            qx = q_of_x(x, 1, bits)
            return bool(p.ball.overlaps(qx.ball)) and x.compare(critical_constants(1).x_G) >= 0
        qn = bifurcation_base(self.n, self.tol, bits).q
        qn1 = bifurcation_base(self.n + 1, self.tol, bits).q
        if not (p.ball > qn.ball and p.ball < qn1.ball):
            return False
        if is_unique_expansion(self.expansion, p, precision_bits=bits) is not Verdict.UNIQUE:
            return False
        return verify_member_star(self.expansion, self.n)

    def as_dict(self, digits: int = 20) -> dict:
        return {
            "schema_version": "1",
            "x": self.x.to_string(digits),
            "p": self.p.to_string(digits),
            "n": self.n,
            "k": self.k,
            "family": self.family,
            "expansion": str(self.expansion),
            "match_length": self.match_length,
        }


def _certify(x: PrecisionReal, iv: IsoInterval, tol: fmpq, bits: int) -> Optional[IsolationCertificate]:
    word = iv.word
    p = invert_base(word, x, tol, bits)
    qn = bifurcation_base(iv.n, tol, bits).q
    qn1 = bifurcation_base(iv.n + 1, tol, bits).q
    if not (p.ball > qn.ball and p.ball < qn1.ball):
        return None
    if is_unique_expansion(word, p, precision_bits=bits) is not Verdict.UNIQUE:
        return None
    if not verify_member_star(word, iv.n):
        return None
    match = _tail_index(word, iv.n) + 2**iv.n
    return IsolationCertificate(x, p, iv.n, iv.k, iv.family, word, match, tol)


def isolate(x, n_max: int = 6, k_max: int = 8, tol=None, M: int = 1,
            precision_bits: int = DEFAULT_PRECISION_BITS) -> Optional[IsolationCertificate]:
    """Find a base isolated in U(x) for x > 1, or None if the search misses x.

    c-family intervals are searched first, then d-family intervals (needed at
    the points z_n), where k may run past ``k_max`` until the interval reaches x.
    For x >= x_G the certificate is the singleton U(x) = {q_x}.
    """
    _check_M(M)
    x = as_real(x, precision_bits)
    tol = DEFAULT_TOL if tol is None else to_fmpq(tol)
    if not x.ball > 1:
        raise ValueError("isolate needs x > 1")
    consts = critical_constants(1, precision_bits=precision_bits)
    if x.compare(consts.x_G) >= 0:
        top = EventuallyPeriodicWord((), (1,), 1)
        p = q_of_x(x, 1, precision_bits)
        return IsolationCertificate(x, p, 0, 0, "SINGLETON", top, 0, tol)
    for n in range(1, n_max + 1):
        for k in range(1, k_max + 1):
            iv = _interval((n, k, "C", tol, precision_bits))
            if iv.contains(x):
                cert = _certify(x, iv, tol, precision_bits)
                if cert is not None:
                    return cert
    for n in range(2, n_max + 1):
        # the d-intervals shrink toward c_(n,infinity); keep going while k helps
        for k in range(1, 4 * k_max + 1):
            iv = _interval((n, k, "D", tol, precision_bits))
            if iv.contains(x):
                cert = _certify(x, iv, tol, precision_bits)
                if cert is not None:
                    return cert
    return None


def neighborhood_scan(cert: IsolationCertificate, hole=fmpq(1, 100), steps: int = 200,
                      depth: Optional[int] = None) -> list[ScanInterval]:
    """Depth-bounded scan of U(x) on (q_n, q_(n+1)) with (p - hole, p + hole) removed.

    ``depth`` defaults to max(match_length, 40). Isolation of p predicts
    VIOLATED everywhere except near other members of U(x), such as q_x when
    q_x lies in the component.
    """
    if cert.family == "SINGLETON":
        raise ValueError("the singleton certificate has no component to scan")
    depth = depth or max(cert.match_length, 40)
    lo = to_fmpq(bifurcation_base(cert.n, cert.tol).q.interval()[1])
    hi = to_fmpq(bifurcation_base(cert.n + 1, cert.tol).q.interval()[0])
    p_lo, p_hi = (to_fmpq(v) for v in cert.p.interval())
    hole = to_fmpq(hole)
    rows = enumerate_Ux(cert.x, 1, steps, depth, q_range=(lo, hi))
    return [r for r in rows if r.hi <= p_lo - hole or r.lo >= p_hi + hole]
