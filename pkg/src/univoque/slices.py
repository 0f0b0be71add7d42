"""The vertical slice U(x): bases q in which a fixed x has a unique expansion.

Contents: the four-regime classification by the thresholds 1, x_KL and x_G,
two constructive families of members, a depth-bounded scan of (1, q_x], the
explicit bi-Holder inequality between bases and expansions, and an exploratory
local-dimension experiment.
"""
from __future__ import annotations

import enum
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from flint import arb, fmpq

from .bases import DEFAULT_TOL, critical_constants, golden_ratio_base, invert_base, q_of_x
from .dimension import DEFAULT_N, Strictness, build_automaton
from .expansions import (
    DEFAULT_ALPHA_DEPTH,
    Verdict,
    alpha,
    is_unique_expansion,
    periodic_expansion,
    prefix_violation,
    quasi_greedy_expand,
)
from .precision import (
    DEFAULT_PRECISION_BITS,
    PrecisionExhausted,
    PrecisionReal,
    as_real,
    to_fmpq,
    working_precision,
)
from .words import EventuallyPeriodicWord, metric_rho

__all__ = [
    "Regime",
    "RegimeClassification",
    "MemberWitness",
    "ScanVerdict",
    "ScanInterval",
    "HolderReport",
    "classify",
    "golden_tail_family",
    "dense_family",
    "enumerate_Ux",
    "holder_check",
    "local_dim_experiment",
]


class Regime(enum.Enum):
    FULL_DIM = "full_dim"
    POSITIVE_DIM = "positive_dim"
    COUNTABLE = "countable"
    SINGLETON = "singleton"


@dataclass(frozen=True)
class MemberWitness:
    """A base in U(x) together with the unique expansion of x in that base."""

    x: PrecisionReal
    base: PrecisionReal
    expansion: EventuallyPeriodicWord
    uniqueness_depth: int = DEFAULT_ALPHA_DEPTH
    tol: fmpq = DEFAULT_TOL

    def verify(self, precision_bits: Optional[int] = None) -> bool:
        """Re-invert and re-test uniqueness, by default at doubled precision."""
        bits = precision_bits or 2 * self.base.precision_bits
        base = invert_base(self.expansion, self.x.refine(bits), self.tol, bits)
        with working_precision(bits):
            close = bool(abs(base.ball - self.base.ball) <= 2 * arb(self.tol) + self.base.radius)
        if not close:
            return False
        return is_unique_expansion(self.expansion, base, self.uniqueness_depth,
                                   bits) is Verdict.UNIQUE

    def as_dict(self, digits: int = 20) -> dict:
        return {
            "x": self.x.to_string(digits),
            "base": self.base.to_string(digits),
            "expansion": str(self.expansion),
            "uniqueness_depth": self.uniqueness_depth,
        }


@dataclass(frozen=True)
class RegimeClassification:
    x: PrecisionReal
    regime: Regime
    witnesses: tuple = ()


def _cmp(x: PrecisionReal, t: PrecisionReal, name: str) -> int:
    try:
        return x.compare(t)
    except PrecisionExhausted:
        raise ValueError(f"x={x.to_string(15)} cannot be separated from {name} "
                         f"at the available precision") from None


def classify(x, M: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS) -> RegimeClassification:
    """Regime of U(x): FULL_DIM on (0, 1], POSITIVE_DIM on (1, x_KL),
    COUNTABLE on [x_KL, x_G) and SINGLETON on [x_G, oo).

    The SINGLETON result carries the witness (q_x, M^infinity).

    Examples
    --------
    >>> classify(0.5).regime
    <Regime.FULL_DIM: 'full_dim'>
    """
    x = as_real(x, precision_bits)
    if not x.ball > 0:
        raise ValueError(f"x must be positive, got {x!r}")
    c = critical_constants(M, precision_bits=precision_bits)
    if _cmp(x, as_real(1), "1") <= 0:
        return RegimeClassification(x, Regime.FULL_DIM)
    if _cmp(x, c.x_KL, "x_KL") < 0:
        return RegimeClassification(x, Regime.POSITIVE_DIM)
    if _cmp(x, c.x_G, "x_G") < 0:
        return RegimeClassification(x, Regime.COUNTABLE)
    top = EventuallyPeriodicWord((), (M,), M)
    w = MemberWitness(x, q_of_x(x, M, precision_bits), top)
    return RegimeClassification(x, Regime.SINGLETON, (w,))


def _alpha_golden(M: int) -> tuple[int, ...]:
    k, odd = divmod(M, 2)
    return (k + 1, k) if odd else (k,)


def golden_tail_family(x, M: int = 1, k_max: int = 8, tol=None,
                       precision_bits: int = DEFAULT_PRECISION_BITS,
                       alpha_depth: int = DEFAULT_ALPHA_DEPTH) -> list[MemberWitness]:
    """Members M^k alpha(q_G) of U(x) for 1 < x < x_G, k = 1..k_max.

    The base p_k solves pi_p(M^k alpha(q_G)) = x. Only the k with
    q_G < p_k < q_x whose expansion passes the uniqueness test are returned;
    the bases increase with k toward q_x.
    """
    x = as_real(x, precision_bits)
    tol = DEFAULT_TOL if tol is None else to_fmpq(tol)
    c = critical_constants(M, precision_bits=precision_bits)
    if not (x.ball > 1 and _cmp(x, c.x_G, "x_G") < 0):
        raise ValueError(f"golden tail family needs 1 < x < x_G, got x={x.to_string(12)}")
    qx = q_of_x(x, M, precision_bits)
    q_g = golden_ratio_base(M, precision_bits)
    tail = _alpha_golden(M)
    out = []
    for k in range(1, k_max + 1):
        word = EventuallyPeriodicWord((M,) * k, tail, M)
        try:
            p = invert_base(word, x, tol, precision_bits)
        except ValueError:
            continue
        if not (p.ball > q_g.ball and p.ball < qx.ball):
            continue
        if is_unique_expansion(word, p, alpha_depth, precision_bits) is Verdict.UNIQUE:
            out.append(MemberWitness(x, p, word, alpha_depth, tol))
    return out


def _case_data(eps: EventuallyPeriodicWord, M: int, j: int) -> tuple[int, int, tuple[int, ...]]:
    """(N, N_j, w) for the two cases of the dense construction."""
    if eps.period == (M,):
        m = len(eps.preperiod)
        return m, m + j, ()
    N = next(n for n in range(3, 10**6) if eps[n - 2] > 0)
    found = []
    n1 = N + 1
    while len(found) < j:
        head = [eps[i] for i in range(1, n1 + 1)]
        if (eps[N + n1 + 1] > 0 and sum(1 for d in head if d > 0) >= N + 1
                and sum(1 for d in head if d < M) >= N + 1):
            found.append(n1)
        n1 += 1
    return N, found[-1], (0, M)


def _has_cyclic_run(period: Sequence[int], digit: int, length: int) -> bool:
    run = 0
    for d in list(period) * 2:
        run = run + 1 if d == digit else 0
        if run >= length:
            return True
    return False


def _random_tail(rng: random.Random, M: int, Nj: int) -> tuple[int, ...]:
    while True:
        size = rng.randint(Nj + 1, 2 * Nj + 2)
        period = tuple(rng.randint(0, M) for _ in range(size))
        if not (_has_cyclic_run(period, 0, Nj) or _has_cyclic_run(period, M, Nj)):
            return period


def dense_family(x, M: int = 1, j: int = 2, sample: int = 5, seed: int = 0, tol=None,
                 precision_bits: int = DEFAULT_PRECISION_BITS,
                 alpha_depth: int = DEFAULT_ALPHA_DEPTH) -> list[MemberWitness]:
    """Random members eps_1..eps_(N+N_j) w d of U(x) for rational 0 < x < 1.

    eps is the quasi-greedy expansion of x in base M+1. If it ends with
    M^infinity (first case) w is empty, N = m and N_j = m + j; otherwise
    w = 0M. The tail d is periodic with period length at least N_j + 1 and
    contains no run of N_j zeros or N_j digits M.

    Parameters
    ----------
    x : rational
        Decimal string, int, Fraction or fmpq in (0, 1).
    j : int, default=2
        Index into the sequence N_1 < N_2 < ...
    sample : int, default=5
        Number of witnesses to draw.
    seed : int, default=0
        Seed of the tail sampler.
    """
    xq = as_real(x, precision_bits)
    if xq.exact is None:
        raise ValueError("dense_family needs a rational x")
    if not (0 < xq.exact < 1):
        raise ValueError(f"dense_family needs 0 < x < 1, got {xq.exact}")
    tol = DEFAULT_TOL if tol is None else to_fmpq(tol)
    eps = periodic_expansion(xq.exact, M + 1, M, quasi=True)
    N, Nj, w = _case_data(eps, M, j)
    head = tuple(eps[i] for i in range(1, N + Nj + 1)) + w
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < sample:
        attempts += 1
        if attempts > 50 * sample:
            raise RuntimeError("could not assemble enough verified witnesses")
        word = EventuallyPeriodicWord(head, _random_tail(rng, M, Nj), M)
        p = invert_base(word, xq, tol, precision_bits)
        if not p.ball < M + 1:
            continue
        if is_unique_expansion(word, p, alpha_depth, precision_bits) is Verdict.UNIQUE:
            out.append(MemberWitness(xq, p, word, alpha_depth, tol))
    return out


class ScanVerdict(enum.Enum):
    VIOLATED = "VIOLATED"
    CANDIDATE = "CANDIDATE"


@dataclass(frozen=True)
class ScanInterval:
    """[lo, hi] of the base grid with the verdict at its midpoint.

    CANDIDATE only means "not refuted at this depth"; it is not a membership
    claim.
    """

    lo: fmpq
    hi: fmpq
    verdict: ScanVerdict


def _scan_point(args) -> ScanVerdict:
    x, M, mid, depth, bits = args
    x = as_real(x, bits)
    d = quasi_greedy_expand(x, mid, depth, M, bits).digits
    a = alpha(mid, depth, M, bits).digits
    return ScanVerdict.VIOLATED if prefix_violation(d, a) is not None else ScanVerdict.CANDIDATE


def _rational_bounds(x: PrecisionReal) -> tuple[fmpq, fmpq]:
    lo, hi = x.interval()
    return to_fmpq(lo), to_fmpq(hi)


def enumerate_Ux(x, M: int = 1, grid_steps: int = 100, depth: int = 40,
                 q_range: Optional[tuple] = None, jobs: Optional[int] = 1,
                 precision_bits: int = DEFAULT_PRECISION_BITS) -> list[ScanInterval]:
    """Depth-bounded scan of U(x) over a uniform grid of (1, q_x].

    For each grid interval the quasi-greedy expansion of x at the midpoint is
    tested against alpha(midpoint) on ``depth`` digits. VIOLATED means a
    uniqueness clause certainly fails there; a larger depth never flips it.
    The interval containing q_x is always CANDIDATE.
    """
    xr = as_real(x, precision_bits)
    qx = q_of_x(xr, M, precision_bits)
    qx_lo, qx_hi = _rational_bounds(qx)
    if q_range is None:
        lo, hi = fmpq(1), qx_hi
    else:
        lo, hi = to_fmpq(q_range[0]), min(to_fmpq(q_range[1]), qx_hi)
        lo = max(lo, fmpq(1))
    if not lo < hi:
        raise ValueError("empty scan range")
    step = (hi - lo) / grid_steps
    edges = [lo + step * i for i in range(grid_steps + 1)]
    mids = [(edges[i] + edges[i + 1]) / 2 for i in range(grid_steps)]
    tasks = [(x if not isinstance(x, PrecisionReal) else xr, M, m, depth, precision_bits)
             for m in mids]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1 and not isinstance(x, PrecisionReal):
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            verdicts = list(ex.map(_scan_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        verdicts = [_scan_point(t) for t in tasks]
    out = []
    for i, v in enumerate(verdicts):
        a, b = edges[i], edges[i + 1]
        if a <= qx_hi and qx_lo <= b:
            v = ScanVerdict.CANDIDATE
        out.append(ScanInterval(a, b, v))
    return out


@dataclass(frozen=True)
class HolderRow:
    p1: PrecisionReal
    p2: PrecisionReal
    rho: Fraction
    lower: float
    upper: float
    passed: bool

    @property
    def margins(self) -> tuple[float, float]:
        return float(self.rho) - self.lower, self.upper - float(self.rho)


@dataclass(frozen=True)
class HolderReport:
    """Outcome of the two-sided Holder check with constants C1, C2 and index i0."""

    C1: float
    C2: float
    i0: int
    rows: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def holder_check(x, a, b, pairs: Sequence[tuple[MemberWitness, MemberWitness]], M: int = 1,
                 precision_bits: int = DEFAULT_PRECISION_BITS,
                 verify_depth: int = DEFAULT_ALPHA_DEPTH) -> HolderReport:
    """Check C1 |p1-p2|^(1/log a) <= rho(Phi_x(p1), Phi_x(p2)) <= C2 |p1-p2|^(1/log b).

    C1 = ((a-1) x / (M b^2))^(1/log a) and C2 = (M b^i0 / (a-1)^2)^(1/log b),
    where i0 is the first index with alpha_i0(b) < M and log is base M+1.
    Each pair is given as two ``MemberWitness`` objects whose bases lie in
    (a, b); their stored expansions are Phi_x of the bases.
    """
    x, a, b = (as_real(v, precision_bits) for v in (x, a, b))
    if not (a.ball > 1 and a.ball < b.ball and b.ball < M + 1):
        raise ValueError("need 1 < a < b < M+1")
    i0 = None
    depth = 64
    while i0 is None:
        ab = alpha(b, depth, M, precision_bits).digits.digits
        i0 = next((i + 1 for i, d in enumerate(ab) if d < M), None)
        depth *= 4
    bits = precision_bits
    with working_precision(bits):
        lm = arb(M + 1).log()
        la, lb = a.ball.log() / lm, b.ball.log() / lm
        C1 = (((a.ball - 1) * x.ball) / (M * b.ball**2)) ** (1 / la)
        C2 = (M * b.ball**i0 / (a.ball - 1) ** 2) ** (1 / lb)
    rows = []
    for w1, w2 in pairs:
        for w in (w1, w2):
            if not (w.base.ball > a.ball and w.base.ball < b.ball):
                raise ValueError(f"base {w.base!r} is not inside (a, b)")
            if is_unique_expansion(w.expansion, w.base, verify_depth, bits) is not Verdict.UNIQUE:
                raise ValueError(f"base {w.base!r} is not verified in U(x)")
        rho = metric_rho(w1.expansion, w2.expansion)
        if rho == 0:
            rows.append(HolderRow(w1.base, w2.base, rho, 0.0, 0.0, True))
            continue
        with working_precision(bits):
            delta = abs(w1.base.ball - w2.base.ball)
            lower = C1 * delta ** (1 / la)
            upper = C2 * delta ** (1 / lb)
            r = arb(rho.numerator) / rho.denominator
            ok = bool(lower <= r) and bool(r <= upper)
        rows.append(HolderRow(w1.base, w2.base, rho, float(lower.mid()), float(upper.mid()), ok))
    with working_precision(bits):
        return HolderReport(float(C1.mid()), float(C2.mid()), i0, tuple(rows))


def _slope(counts: Sequence[tuple[float, int]]) -> tuple[float, float]:
    """Min and max of successive log-count slopes; (0, 0) with no mass."""
    slopes = []
    for (s1, c1), (s2, c2) in zip(counts, counts[1:]):
        if c1 == 0 or c2 == 0:
            slopes.append(0.0)
        else:
            slopes.append(max(0.0, min(1.0, math.log(c2 / c1) / math.log(s2 / s1))))
    return (min(slopes), max(slopes)) if slopes else (0.0, 0.0)


def _cylinder_count(prefix_aut, q: float, M: int, lo: float, hi: float, n: int) -> int:
    """Accepted words of length n whose cylinder image under pi_q meets (lo, hi)."""
    tail = M / (q - 1)
    count = 0
    stack = [(0, 0, 0.0)]
    while stack:
        state, k, value = stack.pop()
        scale = q ** (-k)
        if value + scale * tail < lo or value > hi:
            continue
        if k == n:
            count += 1
            continue
        for c, t in enumerate(prefix_aut.transitions[state]):
            if t >= 0:
                stack.append((t, k + 1, value + c * q ** (-(k + 1))))
    return count


def local_dim_experiment(x, q, deltas: Sequence, N: int = DEFAULT_N, n: int = 16, M: int = 1,
                         grid_steps: int = 64, depth: int = 40,
                         precision_bits: int = DEFAULT_PRECISION_BITS) -> list[dict]:
    """Exploratory comparison of two local dimensions at (x, q), one row per delta.

    ``Ux`` columns: box-counting slopes of CANDIDATE intervals of U(x) near q
    at grid resolutions ``grid_steps`` times 1, 2, 4. ``Uq`` columns:
    box-counting slopes of the set of reals with a unique q-expansion near x,
    from automaton words of length n//2 and n whose cylinders meet
    (x - delta, x + delta). Both are brackets, not certified values.
    """
    xr, qr = as_real(x, precision_bits), as_real(q, precision_bits)
    qx = q_of_x(xr, M, precision_bits)
    if not (qr.ball > 1 and qr.ball <= qx.ball):
        raise ValueError("q must lie in (1, q_x]")
    prefix = alpha(qr, N, M, precision_bits).digits
    outer = build_automaton(prefix, Strictness.OUTER)
    qf, xf = float(qr), float(xr)
    rows = []
    for delta in deltas:
        df = float(as_real(delta))
        q_lo = max(1.0 + 1e-9, qf - df)
        q_hi = min(float(qx.upper), qf + df)
        ux = []
        for mult in (1, 2, 4):
            steps = grid_steps * mult
            if q_hi > q_lo:
                scan = enumerate_Ux(xr, M, steps, depth,
                                    (Fraction(q_lo).limit_denominator(10**12),
                                     Fraction(q_hi).limit_denominator(10**12)),
                                    precision_bits=precision_bits)
                mass = sum(1 for s in scan if s.verdict is ScanVerdict.CANDIDATE)
            else:
                mass = 0
            ux.append((steps, mass))
        ux_lo, ux_hi = _slope(ux)
        uq = []
        for length in (n // 2, n):
            c = _cylinder_count(outer, qf, M, xf - df, xf + df, length)
            uq.append((qf ** length, c))
        uq_lo, uq_hi = _slope(uq)
        rows.append({"delta": df, "Ux_lower": ux_lo, "Ux_upper": ux_hi,
                     "Uq_lower": uq_lo, "Uq_upper": uq_hi})
    return rows
