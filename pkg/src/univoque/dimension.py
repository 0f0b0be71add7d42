"""Dimension estimates for univoque sets by counting words of a
lexicographically constrained shift.

For a prefix a = alpha_1..alpha_N of alpha(q) the INNER shift consists of the
sequences all of whose length-N windows w satisfy reflect(a) < w < a, the
OUTER shift relaxes both inequalities to <=. The INNER entropy is used as the
lower end and the OUTER entropy as the upper end of a dimension bracket. Both
are growth rates of a finite automaton, in base M+1 logarithms: either the
Perron root of its transition matrix (default) or a finite difference of exact
word counts.

A finite word belongs to the language when every window, including the ones
cut off by the end of the word, compares correctly against the prefix of a of
the same length; strictness applies only to complete windows.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from flint import arb, fmpz_mat

from .bases import q_of_x
from .expansions import alpha
from .precision import DEFAULT_PRECISION_BITS, PrecisionReal, as_real, working_precision
from .words import Word, is_alpha_admissible

__all__ = [
    "Strictness",
    "LexShiftAutomaton",
    "DimensionEstimate",
    "build_automaton",
    "count_words",
    "entropy_estimate",
    "spectral_entropy",
    "dim_Uq",
    "dim_Ux",
    "dim_real_Uq",
    "staircase_samples",
    "DEFAULT_N",
    "DEFAULT_n",
]

DEFAULT_N = 16
DEFAULT_n = 48
REJECT = -1


class Strictness(enum.Enum):
    INNER = "inner"
    OUTER = "outer"


def _borders(a: Sequence[int]) -> list[int]:
    """fail[i] = length of the longest proper border of a[:i] (KMP table)."""
    fail = [0] * (len(a) + 1)
    k = 0
    for i in range(1, len(a)):
        while k and a[i] != a[k]:
            k = fail[k]
        if a[i] == a[k]:
            k += 1
        fail[i + 1] = k
    return fail


def _one_sided_table(a: Sequence[int], M: int, strict: bool, upper: bool) -> list[list[int]]:
    """Transition table for "every window <= a" (upper) or ">= a" (lower).

    State i < N is the length of the longest suffix of the emitted word that is
    a proper prefix of a. Every live window is a border of that suffix, so the
    chain i, fail[i], ..., 0 enumerates them.
    """
    N = len(a)
    fail = _borders(a)
    table = []
    for i in range(N):
        chain = []
        k = i
        while True:
            chain.append(k)
            if k == 0:
                break
            k = fail[k]
        row = []
        for c in range(M + 1):
            nxt = 0
            ok = True
            for ell in chain:
                target = a[ell]
                if (c > target) if upper else (c < target):
                    ok = False
                    break
                if c == target:
                    if ell + 1 == N:
                        if strict:
                            ok = False
                            break
                    else:
                        nxt = max(nxt, ell + 1)
            row.append(nxt if ok else REJECT)
        table.append(row)
    return table


@dataclass(frozen=True)
class LexShiftAutomaton:
    """Deterministic acceptor of the window-constrained language.

    ``transitions[s][c]`` is the next state index or ``REJECT``; state 0 is the
    start state. States are reachable pairs (upper match, lower match), the
    lower coordinate being fixed at 0 for a one-sided automaton.
    """

    alpha_prefix: Word
    strictness: Strictness
    symmetric: bool
    states: tuple[tuple[int, int], ...]
    transitions: tuple[tuple[int, ...], ...]

    @property
    def M(self) -> int:
        return self.alpha_prefix.M

    @property
    def n_states(self) -> int:
        return len(self.states)

    def accepts(self, word) -> bool:
        s = 0
        for c in word:
            s = self.transitions[s][c]
            if s == REJECT:
                return False
        return True


def build_automaton(alpha_prefix: Word, strictness=Strictness.INNER,
                    symmetric: bool = True) -> LexShiftAutomaton:
    """Automaton for reflect(a) <(=) every window <(=) a, with a = ``alpha_prefix``.

    Parameters
    ----------
    alpha_prefix : Word
        Nonempty prefix-admissible word a.
    strictness : Strictness or str, default=INNER
        INNER uses strict inequalities on complete windows, OUTER non-strict.
    symmetric : bool, default=True
        If False only the upper constraint (windows <= a) is imposed.

    Examples
    --------
    >>> aut = build_automaton(Word.from_str("11"), "inner")
    >>> count_words(aut, 8)
    2
    """
    strictness = Strictness(strictness)
    a = alpha_prefix.digits
    if not a:
        raise ValueError("alpha prefix must be nonempty")
    if not is_alpha_admissible(alpha_prefix):
        raise ValueError(f"alpha prefix {alpha_prefix} is not admissible")
    M = alpha_prefix.M
    strict = strictness is Strictness.INNER
    up = _one_sided_table(a, M, strict, upper=True)
    if symmetric:
        lo = _one_sided_table(tuple(M - c for c in a), M, strict, upper=False)
    else:
        lo = [[0] * (M + 1)]
    index = {(0, 0): 0}
    states = [(0, 0)]
    rows = []
    k = 0
    while k < len(states):
        i, j = states[k]
        row = []
        for c in range(M + 1):
            ni, nj = up[i][c], lo[j][c]
            if ni == REJECT or nj == REJECT:
                row.append(REJECT)
                continue
            key = (ni, nj)
            if key not in index:
                index[key] = len(states)
                states.append(key)
            row.append(index[key])
        rows.append(tuple(row))
        k += 1
    return LexShiftAutomaton(alpha_prefix, strictness, symmetric, tuple(states), tuple(rows))


def count_words(a: LexShiftAutomaton, n: int) -> int:
    """Exact number of accepted words of length n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return sum(_count_profile(a, n)[n])


def _count_profile(a: LexShiftAutomaton, n: int) -> list[list[int]]:
    vec = [0] * a.n_states
    vec[0] = 1
    out = [vec]
    for _ in range(n):
        new = [0] * a.n_states
        for s, v in enumerate(vec):
            if v:
                for t in a.transitions[s]:
                    if t != REJECT:
                        new[t] += v
        vec = new
        out.append(vec)
    return out


def spectral_entropy(a: LexShiftAutomaton, digits: int = 12) -> float:
    """log_{M+1} of the spectral radius of the transition matrix.

    This is the exact growth rate of ``count_words`` (every state is reachable
    from the start state). The Perron root is isolated as a certified ball from
    the integer characteristic polynomial and the result is rounded to
    ``digits`` decimals, so languages with equal growth rate get equal values
    and inclusion of languages gives ordered values.
    """
    k = a.n_states
    entries = [0] * (k * k)
    for s, row in enumerate(a.transitions):
        for t in row:
            if t != REJECT:
                entries[s * k + t] += 1
    poly = fmpz_mat(k, k, entries).charpoly()
    lam = arb(0)
    with working_precision(128):
        for factor, _ in poly.factor()[1]:
            if factor.degree() < 1:
                continue
            for z, _ in factor.complex_roots():
                r = abs(z)
                if r.mid() > lam.mid():
                    lam = r
        if not lam > 1:
            return 0.0
        h = float((lam.log() / arb(a.M + 1).log()).mid())
    return min(1.0, max(0.0, round(h, digits)))


def _log(v: int, base: int) -> float:
    # exact enough for huge ints: math.log accepts arbitrary-size integers
    return math.log(v) / math.log(base)


def entropy_estimate(a: LexShiftAutomaton, n_lo: int, n_hi: int) -> float:
    """(log C(n_hi) - log C(n_lo)) / (n_hi - n_lo) in base M+1, clipped to [0, 1].

    An empty language gives 0.
    """
    if not n_hi > n_lo >= 1:
        raise ValueError("need n_hi > n_lo >= 1")
    prof = _count_profile(a, n_hi)
    c_lo, c_hi = sum(prof[n_lo]), sum(prof[n_hi])
    if c_hi == 0 or c_lo == 0:
        return 0.0
    base = a.M + 1
    if c_hi == base ** n_hi and c_lo == base ** n_lo:
        return 1.0
    h = (_log(c_hi, base) - _log(c_lo, base)) / (n_hi - n_lo)
    return min(1.0, max(0.0, h))


@dataclass(frozen=True)
class DimensionEstimate:
    """Bracket [lower, upper] for a dimension, base M+1 logarithms.

    ``N`` is the alpha truncation and ``n`` the counting length.
    """

    lower: float
    upper: float
    N: int
    n: int
    q: Optional[PrecisionReal] = None

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _bracket(prefix: Word, n: int, n_lo: Optional[int], method: str) -> tuple[float, float]:
    inner = build_automaton(prefix, Strictness.INNER)
    outer = build_automaton(prefix, Strictness.OUTER)
    if method == "spectral":
        lower, upper = spectral_entropy(inner), spectral_entropy(outer)
    elif method == "difference":
        lo_n = n // 2 if n_lo is None else n_lo
        lower, upper = entropy_estimate(inner, lo_n, n), entropy_estimate(outer, lo_n, n)
    else:
        raise ValueError(f"unknown method {method!r}")
    return min(lower, upper), upper


def dim_Uq(q, N: int = DEFAULT_N, n: int = DEFAULT_n, M: int = 1, n_lo: Optional[int] = None,
           precision_bits: int = DEFAULT_PRECISION_BITS,
           method: str = "spectral") -> DimensionEstimate:
    """Bracket for dim_H of the symbolic univoque set U_q.

    Parameters
    ----------
    q : real
        Base in (1, M+1].
    N : int, default=16
        Number of alpha(q) digits defining the window constraint.
    n : int, default=48
        Counting length for ``method="difference"``, where the entropy is a
        finite difference of log counts between ``n_lo`` (default n//2) and n.
    method : {"spectral", "difference"}, default="spectral"
        "spectral" uses the growth rate of the automaton itself, which is
        monotone under inclusion of languages; "difference" uses word counts.
    """
    q = as_real(q, precision_bits)
    prefix = alpha(q, N, M, precision_bits).digits
    lower, upper = _bracket(prefix, n, n_lo, method)
    return DimensionEstimate(lower, upper, N, n, q)


def dim_Ux(x, N: int = DEFAULT_N, n: int = DEFAULT_n, M: int = 1, n_lo: Optional[int] = None,
           precision_bits: int = DEFAULT_PRECISION_BITS,
           method: str = "spectral") -> DimensionEstimate:
    """Bracket for dim_H U(x), which equals dim_H U_{q_x}."""
    return dim_Uq(q_of_x(x, M, precision_bits), N, n, M, n_lo, precision_bits, method)


def dim_real_Uq(q, N: int = DEFAULT_N, n: int = DEFAULT_n, M: int = 1,
                n_lo: Optional[int] = None, precision_bits: int = DEFAULT_PRECISION_BITS,
                method: str = "spectral") -> DimensionEstimate:
    """Bracket for dim_H of the univoque set of reals, dim_H U_q / log_{M+1} q."""
    q = as_real(q, precision_bits)
    est = dim_Uq(q, N, n, M, n_lo, precision_bits, method)
    with working_precision(64):
        scale = float(q.ball.log() / math.log(M + 1))
    lo, hi = est.lower / scale, est.upper / scale
    if q.exact is not None and q.exact == M + 1:
        lo, hi = est.lower, est.upper
    return DimensionEstimate(min(lo, 1.0), min(hi, 1.0), N, n, q)


def _staircase_row(args) -> tuple[float, float, float]:
    kind, M, t, N, n, method = args
    f = dim_Uq if kind == "psi" else dim_Ux
    est = f(t, N, n, M, method=method)
    return float(as_real(t)), est.lower, est.upper


def staircase_samples(kind: str, M: int, grid: Sequence, N: int = DEFAULT_N,
                      n: int = DEFAULT_n, jobs: Optional[int] = 1,
                      method: str = "spectral") -> list[tuple[float, float, float]]:
    """Rows (abscissa, lower, upper) of psi(q) = dim U_q or phi(x) = dim U(x).

    ``kind`` is "psi" (grid of bases) or "phi" (grid of x values). Rows come
    back sorted by abscissa whatever ``jobs`` is.
    """
    kind = kind.lower()
    if kind not in ("psi", "phi"):
        raise ValueError("kind must be 'psi' or 'phi'")
    tasks = [(kind, M, t, N, n, method) for t in grid]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_staircase_row, tasks))
    else:
        rows = [_staircase_row(t) for t in tasks]
    return sorted(rows)
