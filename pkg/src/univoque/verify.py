"""Property suites run by ``univoque verify-paper``.

Each check is a function returning ``None`` on success and raising
``CheckFailed`` with a short reason otherwise. Checks are grouped into suites
by module; sample sizes are kept small enough for an interactive run, and the
test suite runs larger samples of the same properties.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from flint import fmpq

from .bases import (
    critical_constants,
    doubling_prefix,
    invert_base,
    komornik_loreti_base,
    q_of_x,
    thue_morse_shift,
)
from .dimension import Strictness, build_automaton, count_words, dim_Uq, dim_Ux
from .expansions import (
    Verdict,
    alpha,
    greedy_expand,
    is_unique_expansion,
    pi_q,
    prefix_violation,
    quasi_greedy_expand,
)
from .isolated import (
    INFINITY,
    bifurcation_base,
    c_family,
    d_family,
    doubling_identity_holds,
    isolate,
    iso_intervals,
    neighborhood_scan,
    verify_member_star,
    window_bounds_hold,
    z_n,
)
from .precision import as_real
from .slices import (
    Regime,
    ScanVerdict,
    classify,
    dense_family,
    enumerate_Ux,
    golden_tail_family,
)
from .words import (
    EventuallyPeriodicWord,
    Order,
    Word,
    is_alpha_admissible,
    lex_compare,
    metric_rho,
    reflect,
    shift,
)

__all__ = ["CheckFailed", "CheckResult", "SUITES", "run_suite", "brute_force_count",
           "admissible_prefixes"]


class CheckFailed(AssertionError):
    pass


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    passed: bool
    seconds: float
    detail: str = ""

    @property
    def identifier(self) -> str:
        return f"{self.suite}.{self.check}"


def _require(cond: bool, reason: str) -> None:
    if not cond:
        raise CheckFailed(reason)


def _random_word(rng: random.Random, M: int, max_pre: int = 4, max_per: int = 4) -> EventuallyPeriodicWord:
    pre = tuple(rng.randint(0, M) for _ in range(rng.randint(0, max_pre)))
    per = tuple(rng.randint(0, M) for _ in range(rng.randint(1, max_per)))
    return EventuallyPeriodicWord(pre, per, M)


# -- words -----------------------------------------------------------------

def check_canonical_idempotent() -> None:
    rng = random.Random(1)
    for _ in range(500):
        M = rng.randint(1, 3)
        w = _random_word(rng, M)
        unrolled = EventuallyPeriodicWord(w.preperiod + w.period, w.period * 2, M)
        _require(unrolled == w, f"{unrolled} != {w}")
        again = EventuallyPeriodicWord(w.preperiod, w.period, M)
        _require(again == w and again.preperiod == w.preperiod, f"not idempotent on {w}")


def check_lex_total_order() -> None:
    rng = random.Random(2)
    for _ in range(500):
        M = rng.randint(1, 2)
        a, b, c = (_random_word(rng, M) for _ in range(3))
        ab, ba = lex_compare(a, b), lex_compare(b, a)
        _require({ab, ba} in ({Order.LESS, Order.GREATER}, {Order.EQUAL}), "antisymmetry")
        if ab is Order.LESS and lex_compare(b, c) is Order.LESS:
            _require(lex_compare(a, c) is Order.LESS, f"transitivity on {a}, {b}, {c}")


def check_reflect_reverses(max_len: int = 4) -> None:
    for M in (1, 2):
        words = [Word(d, M).infinite() for n in range(1, max_len + 1)
                 for d in itertools.product(range(M + 1), repeat=n)]
        for a, b in itertools.product(words, repeat=2):
            less = lex_compare(a, b) is Order.LESS
            _require(less == (lex_compare(reflect(b), reflect(a)) is Order.LESS),
                     f"reflection on {a}, {b}")


def check_ultrametric() -> None:
    rng = random.Random(3)
    for _ in range(500):
        a, b, c = (_random_word(rng, 1) for _ in range(3))
        _require(metric_rho(a, c) <= max(metric_rho(a, b), metric_rho(b, c)), "ultrametric")


def check_shift_stream(indices: int = 10_000) -> None:
    rng = random.Random(4)
    w = _random_word(rng, 2, 7, 5)
    for n in (0, 1, 3, 9):
        s1 = shift(w.to_stream(), n)
        s2 = shift(w, n).to_stream()
        _require(all(s1[i] == s2[i] for i in range(1, indices // 4 + 1)), f"shift {n}")


# -- expansions ------------------------------------------------------------

def _random_base(rng: random.Random, M: int) -> fmpq:
    return fmpq(rng.randint(1050, 1000 * (M + 1) - 10), 1000)


def check_round_trip(samples: int = 200) -> None:
    rng = random.Random(5)
    for _ in range(samples):
        M = rng.randint(1, 3)
        q = _random_base(rng, M)
        x = fmpq(rng.randint(1, 999), 1000) * M / (q - 1)
        n = 24
        g = greedy_expand(x, q, n, M)
        v = pi_q(g.digits.infinite(), q).interval()
        bound = M * q ** (-n) / (q - 1)
        _require(v[0] <= x and x - v[1] <= bound, f"round trip x={x} q={q}")


def check_sandwich(samples: int = 200) -> None:
    rng = random.Random(6)
    for _ in range(samples):
        M = rng.randint(1, 2)
        q = _random_base(rng, M)
        x = fmpq(rng.randint(1, 999), 1000) * M / (q - 1)
        g = greedy_expand(x, q, 20, M)
        qg = quasi_greedy_expand(x, q, 20, M)
        _require(qg.digits.digits <= g.digits.digits, f"sandwich x={x} q={q}")
        if not g.terminated:
            _require(qg.digits == g.digits, f"greedy not terminating but differs, x={x} q={q}")


def check_quasi_greedy_monotone(samples: int = 200) -> None:
    rng = random.Random(7)
    for _ in range(samples):
        M = 1
        x = fmpq(rng.randint(1, 900), 1000)
        q1, q2 = sorted(_random_base(rng, M) for _ in range(2))
        if q1 == q2:
            continue
        a = quasi_greedy_expand(x, q1, 24, M).digits.digits
        b = quasi_greedy_expand(x, q2, 24, M).digits.digits
        _require(a <= b, f"monotonicity x={x} {q1} {q2}")


def check_quasi_greedy_tail(samples: int = 100) -> None:
    rng = random.Random(8)
    for _ in range(samples):
        M = rng.randint(1, 2)
        q = _random_base(rng, M)
        x = fmpq(rng.randint(1, 999), 1000) * M / (q - 1)
        d = quasi_greedy_expand(x, q, 24, M).digits.digits
        a = alpha(q, 24, M).digits.digits
        for i, c in enumerate(d):
            if c < M:
                tail = d[i + 1:]
                _require(tail <= a[: len(tail)], f"tail condition x={x} q={q} at {i + 1}")


def check_uniqueness_consistency(samples: int = 60) -> None:
    rng = random.Random(9)
    seen = 0
    for _ in range(samples):
        M = 1
        q = _random_base(rng, M)
        d = _random_word(rng, M, 3, 6)
        if d.ends_with_zeros and not d.preperiod:
            continue
        if is_unique_expansion(d, q) is not Verdict.UNIQUE:
            continue
        seen += 1
        x = pi_q(d, q)
        g = greedy_expand(x, q, 16, M).digits
        h = quasi_greedy_expand(x, q, 16, M).digits
        _require(g == h == d.prefix(16), f"uniqueness consistency {d} at {q}")
    _require(seen > 0, "no unique sample drawn")


# -- bases -----------------------------------------------------------------

def check_invert_pi(samples: int = 50) -> None:
    rng = random.Random(10)
    for _ in range(samples):
        M = rng.randint(1, 2)
        q = fmpq(rng.randint(1050, 1000 * (M + 1) - 50), 1000)
        d = _random_word(rng, M)
        if d.ends_with_zeros and not d.preperiod:
            continue
        x = pi_q(d, q)
        p = invert_base(d, x)
        lo, hi = p.interval()
        _require(lo - fmpq(2, 10**12) <= q <= hi + fmpq(2, 10**12), f"invert {d} at {q}")


def check_pi_decreasing() -> None:
    rng = random.Random(11)
    grid = [fmpq(105 + 5 * i, 100) for i in range(20)]
    for _ in range(20):
        d = _random_word(rng, 1)
        if d.ends_with_zeros and not d.preperiod:
            continue
        vals = [pi_q(d, q).interval() for q in grid]
        _require(all(b[1] < a[0] for a, b in zip(vals, vals[1:])), f"pi not decreasing for {d}")


def check_q_of_x() -> None:
    for M in (1, 2):
        xs = [fmpq(i, 20) for i in range(1, 80)]
        qs = [q_of_x(x, M).interval()[0] for x in xs]
        _require(all(b <= a for a, b in zip(qs, qs[1:])), "q_x not non-increasing")
        _require(all(q == M + 1 for x, q in zip(xs, qs) if x <= 1), "q_x != M+1 on (0,1]")


def check_qkl_unique() -> None:
    q = komornik_loreti_base(1)
    tm = thue_morse_shift().prefix(64)
    _require(prefix_violation(tm, alpha(q, 64, 1).digits) is None, "q_KL violation")
    for M in (2, 3):
        q = komornik_loreti_base(M)
        lam = Word(doubling_prefix(M, 64), M)
        _require(alpha(q, 64, M).digits == lam, f"alpha(q_KL) differs from the oracle word, M={M}")
        _require(prefix_violation(lam, lam) is None, f"oracle word violation, M={M}")


# -- dimension -------------------------------------------------------------

def admissible_prefixes(M: int, max_len: int) -> list[Word]:
    """All words a with a_(n+1)..a_N <= a_1..a_(N-n) for every n, by direct filtering."""
    out = []
    for n in range(1, max_len + 1):
        for d in itertools.product(range(M + 1), repeat=n):
            if all(d[i:] <= d[: n - i] for i in range(1, n)):
                out.append(Word(d, M))
    return out


def brute_force_count(a: Word, n: int, strict: bool) -> int:
    """Count words of length n by checking every window directly."""
    M, N = a.M, len(a)
    top = a.digits
    bot = tuple(M - c for c in top)
    count = 0
    for w in itertools.product(range(M + 1), repeat=n):
        ok = True
        for i in range(n):
            win = w[i:i + N]
            L = len(win)
            if L == N and strict:
                ok = bot < win < top
            else:
                ok = bot[:L] <= win <= top[:L]
            if not ok:
                break
        count += ok
    return count


def check_count_oracle(max_len: int = 4, max_n: int = 8) -> None:
    for M in (1, 2):
        for a in admissible_prefixes(M, max_len):
            for s in Strictness:
                aut = build_automaton(a, s)
                for n in range(max_n + 1):
                    _require(count_words(aut, n) == brute_force_count(a, n, s is Strictness.INNER),
                             f"count mismatch a={a} {s.value} n={n}")


def check_inner_le_outer() -> None:
    for M in (1, 2):
        for a in admissible_prefixes(M, 5):
            inner = build_automaton(a, Strictness.INNER)
            outer = build_automaton(a, Strictness.OUTER)
            for n in (4, 8, 12):
                _require(count_words(inner, n) <= count_words(outer, n), f"inner > outer for {a}")


def check_bracket_N() -> None:
    for q in ("1.7", "1.8", "1.9", "1.95"):
        prev = None
        for N in (8, 12, 16, 24):
            est = dim_Uq(q, N)
            _require(est.lower <= est.upper, "lower > upper")
            if prev is not None:
                _require(est.lower <= prev.upper and prev.lower <= est.upper,
                         f"brackets at q={q} N={N} do not intersect")
            prev = est


def check_psi_monotone(steps: int = 20) -> None:
    grid = [fmpq(16, 10) + fmpq(4, 10) * fmpq(i, steps) for i in range(1, steps + 1)]
    est = [dim_Uq(q) for q in grid]
    for i, j in itertools.combinations(range(len(est)), 2):
        _require(est[i].lower <= est[j].upper, f"psi bracket order at {grid[i]}, {grid[j]}")


def check_phi_delegation() -> None:
    for x in ("0.5", "1.1", "1.3", "1.5"):
        a, b = dim_Ux(x), dim_Uq(q_of_x(x))
        _require((a.lower, a.upper) == (b.lower, b.upper), f"phi != psi(q_x) at {x}")


# -- univoque_x ------------------------------------------------------------

def check_witnesses_verify() -> None:
    ws = golden_tail_family("1.4", k_max=6) + dense_family("0.5", sample=3)
    _require(len(ws) >= 6, "too few witnesses")
    _require(all(w.verify() for w in ws), "witness failed re-verification")


def check_golden_tail_order() -> None:
    c = critical_constants(1)
    qx = q_of_x("1.4")
    ws = golden_tail_family("1.4", k_max=8)
    bases = [w.base for w in ws]
    _require(all(a.ball < b.ball for a, b in zip(bases, bases[1:])), "bases not increasing")
    _require(all(c.q_G.ball < p.ball < qx.ball for p in bases), "base outside (q_G, q_x)")


def check_classify_thresholds() -> None:
    c = critical_constants(1)
    xs = [fmpq(i, 200) for i in range(1, 400)]
    last = None
    for x in xs:
        r = classify(x).regime
        if last is not None and r is not last:
            lo, hi = float(x - fmpq(1, 200)), float(x)
            edges = {Regime.POSITIVE_DIM: 1.0, Regime.COUNTABLE: float(c.x_KL),
                     Regime.SINGLETON: float(c.x_G)}
            _require(lo <= edges[r] <= hi, f"regime change to {r.value} outside its threshold")
        last = r


def check_scan_permanence() -> None:
    for x in ("1", "1.2"):
        shallow = enumerate_Ux(x, 1, 60, 12)
        deep = enumerate_Ux(x, 1, 60, 48)
        for s, d in zip(shallow, deep):
            if s.verdict is ScanVerdict.VIOLATED:
                _require(d.verdict is ScanVerdict.VIOLATED, f"VIOLATED flipped at {float(s.lo)}")


def check_monotone_in_x() -> None:
    for w in golden_tail_family("1.4", k_max=4):
        for y in ("1.1", "1.3"):
            yr = as_real(y)
            d = w.expansion
            p = invert_base(d, yr)
            if p.ball < q_of_x(y).ball:
                continue
            # the same word is a witness for y at a larger base
            _require(is_unique_expansion(d, p) is Verdict.UNIQUE, f"{d} not unique for y={y}")


# -- thue-morse and isolated points ----------------------------------------

def check_doubling_identity(n_max: int = 12) -> None:
    for n in range(n_max + 1):
        _require(doubling_identity_holds(n), f"doubling identity n={n}")


def check_window_bounds(n_max: int = 8) -> None:
    for n in range(n_max + 1):
        _require(window_bounds_hold(n), f"window bounds n={n}")


def check_bifurcation_bases() -> None:
    # q_6 and q_KL agree to about 15 digits, so the ordering needs a tight bracket
    tol, bits = fmpq(1, 10**40), 256
    prev = None
    for n in range(1, 7):
        b = bifurcation_base(n, tol, bits)
        _require(b.verify(), f"alpha(q_{n}) mismatch")
        if prev is not None:
            _require(prev.q.ball < b.q.ball, f"q_{n} not increasing")
        prev = b
    _require(prev.q.ball < komornik_loreti_base(1, tol, bits).ball, "q_n above q_KL")


def check_member_star() -> None:
    for n in range(1, 6):
        for k in range(1, 6):
            _require(verify_member_star(c_family(n, k), n), f"c_({n},{k})")
            if n >= 2:
                _require(verify_member_star(d_family(n, k), n), f"d_({n},{k})")
    for n in range(1, 7):
        _require(c_family(n, 1) == c_family(n + 1, INFINITY), f"c_({n},1) != c_({n + 1},inf)")


def check_cover_chain() -> None:
    # consecutive right endpoints differ by about 1e-15 at n=4, k=6
    ivs = iso_intervals(4, 6, fmpq(1, 10**40), include_d=False, precision_bits=256)
    for a, b in zip(ivs, ivs[1:]):
        if a.n == b.n:
            _require(b.lo.ball < a.hi.ball, f"chain gap at n={a.n} k={a.k}")
            _require(a.hi.ball < b.hi.ball, f"pi_(q_n)(c_(n,k)) not increasing at n={a.n}")
    zs = [z_n(n) for n in range(1, 7)]
    _require(all(a.ball > b.ball for a, b in zip(zs, zs[1:])), "z_n not decreasing")
    _require(abs(float(zs[0]) - float(critical_constants(1).x_G)) < 1e-8, "z_1 != x_G")
    _require(float(zs[-1]) < 1.05, "z_6 >= 1.05")


def check_certificates() -> None:
    for x in ("1.5", "1.2", "1.01", z_n(2), "2"):
        cert = isolate(x)
        _require(cert is not None, f"no certificate for x={x}")
        _require(cert.verify(), f"certificate for x={x} fails at doubled precision")


def check_neighborhood_scan() -> None:
    for x in ("1.5", "1.2"):
        cert = isolate(x)
        qx = q_of_x(x)
        for r in neighborhood_scan(cert):
            if r.verdict is ScanVerdict.CANDIDATE:
                _require(r.lo <= qx.interval()[1] and qx.interval()[0] <= r.hi,
                         f"candidate near {float(r.lo)} for x={x}")


SUITES: dict[str, list[tuple[str, Callable[[], None]]]] = {
    "words": [
        ("canonical_idempotent", check_canonical_idempotent),
        ("lex_total_order", check_lex_total_order),
        ("reflect_reverses_order", check_reflect_reverses),
        ("metric_ultrametric", check_ultrametric),
        ("shift_stream_compatible", check_shift_stream),
    ],
    "expansions": [
        ("greedy_round_trip", check_round_trip),
        ("quasi_greedy_sandwich", check_sandwich),
        ("quasi_greedy_monotone_in_q", check_quasi_greedy_monotone),
        ("quasi_greedy_tail_condition", check_quasi_greedy_tail),
        ("uniqueness_consistency", check_uniqueness_consistency),
    ],
    "bases": [
        ("invert_pi_identity", check_invert_pi),
        ("pi_decreasing_in_q", check_pi_decreasing),
        ("q_of_x_monotone", check_q_of_x),
        ("q_kl_in_univoque_set", check_qkl_unique),
    ],
    "dimension": [
        ("count_words_oracle", check_count_oracle),
        ("inner_le_outer", check_inner_le_outer),
        ("brackets_intersect_in_N", check_bracket_N),
        ("psi_monotone", check_psi_monotone),
        ("phi_delegates_to_psi", check_phi_delegation),
    ],
    "univoque-x": [
        ("witnesses_self_verify", check_witnesses_verify),
        ("golden_tail_increasing", check_golden_tail_order),
        ("classify_thresholds", check_classify_thresholds),
        ("scan_violations_permanent", check_scan_permanence),
        ("members_monotone_in_x", check_monotone_in_x),
    ],
    "thue-morse": [
        ("doubling_identity", check_doubling_identity),
        ("window_bounds", check_window_bounds),
    ],
    "isolated": [
        ("bifurcation_bases", check_bifurcation_bases),
        ("member_star_families", check_member_star),
        ("cover_chain", check_cover_chain),
        ("certificates_self_verify", check_certificates),
        ("neighborhood_scan", check_neighborhood_scan),
    ],
}


def run_suite(name: str = "all", fail_fast: bool = True) -> Iterator[CheckResult]:
    """Run one suite (or all of them), yielding a result per check.

    Raises
    ------
    KeyError
        If ``name`` is neither "all" nor a key of ``SUITES``; raised on the call,
        before any check runs.
    """
    if name != "all" and name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(['all', *SUITES])}")
    return _run(list(SUITES) if name == "all" else [name], fail_fast)


def _run(names: list, fail_fast: bool) -> Iterator[CheckResult]:
    for s in names:
        for check, fn in SUITES[s]:
            t0 = time.perf_counter()
            try:
                fn()
            except CheckFailed as e:
                yield CheckResult(s, check, False, time.perf_counter() - t0, str(e))
                if fail_fast:
                    return
                continue
            yield CheckResult(s, check, True, time.perf_counter() - t0)
