"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line
with the measured quantities and its runtime, and asserts the criterion at the
stated tolerance."""
import itertools
import math
import time
from pathlib import Path

import numpy as np
from flint import fmpq

from univoque import (
    EventuallyPeriodicWord,
    Regime,
    Strictness,
    Verdict,
    Word,
    alpha,
    build_automaton,
    classify,
    count_words,
    critical_constants,
    dense_family,
    dim_Uq,
    dim_Ux,
    golden_ratio_base,
    golden_tail_family,
    greedy_expand,
    holder_check,
    invert_base,
    is_unique_expansion,
    isolate,
    iso_intervals,
    local_dim_experiment,
    pi_q,
    q_of_x,
    quasi_greedy_expand,
    verify_member_star,
    z_n,
)
from univoque.isolated import INFINITY, c_family, d_family, doubling_identity_holds, window_bounds_hold

ROOT = Path(__file__).resolve().parents[1]


def _close(value, target, tol):
    return abs(float(value) - target) <= tol


def test_criterion_01_constants(report):
    t0 = time.perf_counter()
    c = critical_constants(1)
    checks = {
        "q_G": _close(c.q_G, (1 + math.sqrt(5)) / 2, 1e-8),
        "q_KL": _close(c.q_KL, 1.78723, 1e-4),
        "x_KL": _close(c.x_KL, 1.27028, 1e-4),
        "x_G": _close(c.x_G, 1.61803, 1e-4),
        "q_G(M=2)": golden_ratio_base(2).exact == 2,
        "q_G(M=3)": _close(golden_ratio_base(3), 1 + math.sqrt(3), 1e-8),
    }
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 2
    report(1, ok, f"q_G={float(c.q_G):.10f} q_KL={float(c.q_KL):.6f} x_KL={float(c.x_KL):.6f} "
                  f"x_G={float(c.x_G):.6f} M=2,3 q_G ok={checks['q_G(M=2)'] and checks['q_G(M=3)']} "
                  f"({dt:.2f}s < 2s)")
    assert ok, checks


def test_criterion_02_golden_identities(report):
    t0 = time.perf_counter()
    phi = golden_ratio_base(1)
    ten = EventuallyPeriodicWord((), (1, 0), 1)
    one_one = EventuallyPeriodicWord((1, 1), (0,), 1)
    value = pi_q(ten, phi)
    g = greedy_expand(1, phi, 12)
    qg = quasi_greedy_expand(1, phi, 12)
    checks = {
        "pi": _close(value, 1.0, 1e-12) and bool(abs(value.ball - 1) < 1e-12),
        "greedy": g.digits == one_one.prefix(12) and g.terminated,
        "quasi": qg.digits == ten.prefix(12),
        "110^inf not unique": is_unique_expansion(one_one, phi) is Verdict.NOT_UNIQUE,
        "(10)^inf not unique": is_unique_expansion(ten, phi) is Verdict.NOT_UNIQUE,
    }
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 1
    report(2, ok, f"greedy={g.digits} quasi={qg.digits} verdicts NOT_UNIQUE x2 "
                  f"|pi-1|<1e-12 ({dt:.2f}s < 1s)")
    assert ok, checks


def _open_grid(lo, hi, steps):
    return [fmpq(lo) + (fmpq(hi) - fmpq(lo)) * fmpq(i, steps + 1) for i in range(1, steps + 1)]


def test_criterion_03_psi_staircase(report):
    t0 = time.perf_counter()
    at2, at17, atg = dim_Uq(2, 16, 48), dim_Uq("1.70", 16, 48), dim_Uq("1.618", 16, 48)
    grid = _open_grid(fmpq(16, 10), fmpq(2), 50)
    est = [dim_Uq(q, 16, 48) for q in grid]
    bad = sum(1 for i, j in itertools.combinations(range(50), 2) if est[i].lower > est[j].upper)
    dt = time.perf_counter() - t0
    ok = (at2.lower >= 0.99 and at17.upper <= 0.05 and atg.lower == atg.upper == 0
          and bad == 0 and dt < 60)
    report(3, ok, f"psi(2).lower={at2.lower:.5f} psi(1.70).upper={at17.upper:.5f} "
                  f"psi(1.618)=[{atg.lower},{atg.upper}] order violations={bad} ({dt:.1f}s < 60s)")
    assert ok


def test_criterion_04_phi_staircase(report):
    t0 = time.perf_counter()
    full = [dim_Ux(x, 16, 48) for x in ("0.3", "0.9", "1.0")]
    at14, at17 = dim_Ux("1.4", 16, 48), dim_Ux("1.7", 16, 48)
    grid = _open_grid(fmpq(2, 10), fmpq(18, 10), 50)
    est = [dim_Ux(x, 16, 48) for x in grid]
    bad = sum(1 for i, j in itertools.combinations(range(50), 2) if est[i].upper < est[j].lower)
    dt = time.perf_counter() - t0
    ok = (all(e.lower >= 0.99 for e in full) and at14.upper <= 0.05
          and at17.lower == at17.upper == 0 and bad == 0 and dt < 60)
    report(4, ok, f"phi lower at 0.3/0.9/1.0={[round(e.lower, 5) for e in full]} "
                  f"phi(1.4).upper={at14.upper:.5f} phi(1.7)=[{at17.lower},{at17.upper}] "
                  f"order violations={bad} ({dt:.1f}s < 60s)")
    assert ok


def _prefixes(M, max_len):
    out = []
    for n in range(1, max_len + 1):
        for d in itertools.product(range(M + 1), repeat=n):
            if all(d[i:] <= d[: n - i] for i in range(1, n)):
                out.append(d)
    return out


def _brute_counts(M, prefixes, n):
    """Counts per (prefix, strict) by checking every window of every word of length n.

    Windows are encoded as base-(M+1) integers so equal-length lexicographic
    comparison is integer comparison.
    """
    K = M + 1
    words = np.array(list(itertools.product(range(K), repeat=n)), dtype=np.int64).reshape(-1, n)
    by_len = {}
    for a in prefixes:
        by_len.setdefault(len(a), []).append(a)
    out = {}
    for N, group in by_len.items():
        spans = [(i, min(N, n - i)) for i in range(n)]
        values = []
        for i, L in spans:
            w = np.zeros(len(words), dtype=np.int64)
            for t in range(L):
                w = w * K + words[:, i + t]
            values.append(w)

        def enc(d):
            v = 0
            for c in d:
                v = v * K + c
            return v

        for a in group:
            refl = tuple(M - c for c in a)
            for strict in (True, False):
                ok = np.ones(len(words), dtype=bool)
                for (i, L), w in zip(spans, values):
                    hi, lo = enc(a[:L]), enc(refl[:L])
                    if L == N and strict:
                        ok &= (w < hi) & (w > lo)
                    else:
                        ok &= (w <= hi) & (w >= lo)
                out[a, strict] = int(ok.sum())
    return out


def test_criterion_05_count_oracle(report):
    t0 = time.perf_counter()
    mismatches = 0
    total = 0
    for M in (1, 2):
        prefixes = _prefixes(M, 6)
        lib = [d for n in range(1, 7) for d in itertools.product(range(M + 1), repeat=n)
               if __import__("univoque").words.is_alpha_admissible(Word(d, M))]
        assert sorted(lib) == sorted(prefixes)
        autos = {(a, s): build_automaton(Word(a, M), s) for a in prefixes
                 for s in (Strictness.INNER, Strictness.OUTER)}
        for n in range(0, 13):
            brute = _brute_counts(M, prefixes, n) if n else None
            for (a, s), aut in autos.items():
                expect = 1 if n == 0 else brute[a, s is Strictness.INNER]
                total += 1
                mismatches += count_words(aut, n) != expect
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 30
    report(5, ok, f"{total} (prefix, strictness, n) cases, mismatches={mismatches} ({dt:.1f}s < 30s)")
    assert ok


def test_criterion_06_classification(report):
    t0 = time.perf_counter()
    want = {"0.5": Regime.FULL_DIM, "1.1": Regime.POSITIVE_DIM,
            "1.4": Regime.COUNTABLE, "2.0": Regime.SINGLETON}
    got = {x: classify(x) for x in want}
    regimes_ok = all(got[x].regime is r for x, r in want.items())
    (w,) = got["2.0"].witnesses
    top = EventuallyPeriodicWord((), (1,), 1)
    p = invert_base(w.expansion, "2.0")
    witness_ok = (w.base.exact == fmpq(3, 2) and w.expansion == top
                  and abs(float(p) - 1.5) <= 1e-12 and bool(abs(p.ball - fmpq(3, 2)) <= 1e-12))
    dt = time.perf_counter() - t0
    ok = regimes_ok and witness_ok
    report(6, ok, f"regimes={[got[x].regime.value for x in want]} witness=({float(w.base)}, "
                  f"{w.expansion}) round trip |p-1.5|<=1e-12 ({dt:.2f}s)")
    assert ok


def test_criterion_07_member_families(report):
    t0 = time.perf_counter()
    golden = golden_tail_family("1.4", 1, k_max=8)
    q_g, q_x = golden_ratio_base(1), q_of_x("1.4")
    bases = [w.base for w in golden]
    golden_ok = (len(golden) >= 3 and all(a.ball < b.ball for a, b in zip(bases, bases[1:]))
                 and all(q_g.ball < p.ball < q_x.ball for p in bases))
    dense = dense_family("0.5", 1, j=2, sample=5)
    reverified = all(w.verify() for w in golden + dense)
    dt = time.perf_counter() - t0
    ok = golden_ok and len(dense) == 5 and reverified and dt < 10
    report(7, ok, f"golden witnesses={len(golden)} increasing in (q_G,q_x)={golden_ok} "
                  f"dense witnesses={len(dense)} re-verified at 2x precision={reverified} "
                  f"({dt:.2f}s < 10s)")
    assert ok


def test_criterion_08_thue_morse_families(report):
    t0 = time.perf_counter()
    doubling_ok = all(doubling_identity_holds(n) for n in range(13))
    windows_ok = all(window_bounds_hold(n) for n in range(9))
    c_ok = all(verify_member_star(c_family(n, k), n) for n in range(1, 6) for k in range(1, 6))
    d_ok = all(verify_member_star(d_family(n, k), n) for n in range(2, 6) for k in range(1, 6))
    ident = all(c_family(n, 1) == c_family(n + 1, INFINITY) for n in range(1, 7))
    dt = time.perf_counter() - t0
    ok = doubling_ok and windows_ok and c_ok and d_ok and ident and dt < 30
    report(8, ok, f"doubling n<=12={doubling_ok} windows n<=8={windows_ok} c_(n,k) members={c_ok} "
                  f"d_(n,k) members={d_ok} c_(n,1)=c_(n+1,inf)={ident} ({dt:.2f}s < 30s)")
    assert ok


def test_criterion_09_isolated_cover(report):
    t0 = time.perf_counter()
    ivs = iso_intervals(4, 7, include_d=False)
    chain = all(b.lo.ball < a.hi.ball for a, b in zip(ivs, ivs[1:]) if a.n == b.n)
    zs = [z_n(n) for n in range(1, 7)]
    z1_ok = abs(float(zs[0]) - float(critical_constants(1).x_G)) <= 1e-8
    decreasing = all(a.ball > b.ball for a, b in zip(zs, zs[1:]))
    cert = isolate("1.5")
    cert_ok = cert is not None and cert.verify()
    dt = time.perf_counter() - t0
    ok = chain and z1_ok and decreasing and float(zs[-1]) < 1.05 and cert_ok and dt < 30
    report(9, ok, f"chain overlaps n<=4,k<=6={chain} z_1-x_G<=1e-8={z1_ok} z_n decreasing={decreasing} "
                  f"z_6={float(zs[-1]):.6f} isolate(1.5): p={float(cert.p):.10f} "
                  f"family {cert.family} self-verified={cert_ok} ({dt:.2f}s < 30s)")
    assert ok


def test_criterion_10_holder(report):
    t0 = time.perf_counter()
    ws = golden_tail_family("1.4", 1, k_max=8)
    inside = [w for w in ws if 1.65 < float(w.base) < 1.714]
    pairs = list(itertools.combinations(inside, 2))
    res = holder_check("1.4", "1.65", "1.714", pairs)
    dt = time.perf_counter() - t0
    ok = len(pairs) > 0 and res.passed and dt < 5
    report(10, ok, f"{len(pairs)} pairs, C1={res.C1:.4f} C2={res.C2:.3f} i0={res.i0} "
                   f"all inequalities hold={res.passed} ({dt:.2f}s < 5s)")
    assert ok


def test_criterion_11_substitution_documented(report):
    t0 = time.perf_counter()
    readme = (ROOT / "README.md").read_text(encoding="utf-8")
    documented = "local_dim_experiment" in readme and "Lebesgue" in readme
    rows = local_dim_experiment("1.2", "1.8", ["0.05", "0.02"], grid_steps=32)
    finite = all(all(math.isfinite(v) for v in r.values()) for r in rows)
    below_one = all(dim_Ux(x).upper < 1 for x in ("1.05", "1.1", "1.2"))
    dt = time.perf_counter() - t0
    ok = documented and len(rows) == 2 and finite and below_one
    report(11, ok, f"substitution stated in README={documented} local_dim_experiment rows={len(rows)} "
                   f"dim brackets < 1 on (1, x_KL)={below_one} ({dt:.2f}s)")
    assert ok
