"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

The lines are repeated in the "acceptance criteria" section of the pytest
terminal summary.  Timed criteria start from empty caches.
"""

import time
from fractions import Fraction

from conftest import ACCEPTANCE_LINES
from qsbits import asymptotics as asy
from qsbits import mu as mu_mod
from qsbits.mu import f1_closed_exact, f3_closed_exact, f_terms, mu1_exact, mu_avg_exact, mu_general_exact, mu_table, t_direct
from qsbits.simulator import knuth_key_expectation, monte_carlo, pair_frequency_check, three_key_scenario


def report(num: int, ok: bool, detail: str) -> None:
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
    assert ok, detail


def cold() -> None:
    mu_mod.clear_caches()
    asy.clear_caches()


def test_01_slope_c():
    cold()
    t0 = time.perf_counter()
    c = asy.slope_c()
    dt = time.perf_counter() - t0
    report(1, abs(c - 5.27938) <= 5e-5 and dt < 1.0, f"slope_c = {c:.8f} (target 5.27938 +- 5e-5), {dt:.3f}s < 1s")


def test_02_slope_avg():
    cold()
    t0 = time.perf_counter()
    a = asy.slope_avg()
    dt = time.perf_counter() - t0
    report(2, abs(a - 8.20731) <= 5e-5 and dt < 1.0, f"slope_avg = {a:.8f} (target 8.20731 +- 5e-5), {dt:.3f}s < 1s")


def test_03_general_equals_smallest():
    cold()
    t0 = time.perf_counter()
    bad = [n for n in range(2, 13) if mu_general_exact(1, n).value != mu1_exact(n).value]
    dt = time.perf_counter() - t0
    report(3, not bad and dt < 120, f"mu_general(1,n) == mu1(n) for 2<=n<=12, mismatches {bad}, {dt:.2f}s < 120s")


def test_04_averaging_identity():
    cold()
    t0 = time.perf_counter()
    bad = [
        n
        for n in range(2, 13)
        if sum((mu_general_exact(m, n).value for m in range(1, n + 1)), Fraction(0)) / n != mu_avg_exact(n).value
    ]
    dt = time.perf_counter() - t0
    report(4, not bad and dt < 120, f"(1/n) sum_m mu(m,n) == mu_avg(n) for 2<=n<=12, mismatches {bad}, {dt:.2f}s < 120s")


def test_05_symmetry():
    bad = [
        (m, n)
        for n in range(1, 16)
        for m in range(1, n + 1)
        if mu_general_exact(m, n).value != mu_general_exact(n + 1 - m, n).value
    ]
    report(5, not bad, f"mu(m,n) == mu(n+1-m,n) for all n<=15, mismatches {bad[:5]}")


def test_06_lemma_t():
    worst = 0.0
    for n in range(2, 61):
        exact = float(t_direct(n))
        got = asy.lemma_t(n)
        err = abs(got - exact) / abs(exact) if exact else abs(got)
        worst = max(worst, err)
    anchors = t_direct(2) == 0 and t_direct(3) == Fraction(-1, 9)
    anchors = anchors and abs(asy.lemma_t(2)) <= 1e-9 and abs(asy.lemma_t(3) + 1 / 9) <= 1e-9 / 9
    report(6, worst <= 1e-9 and anchors, f"max rel |lemma_t - t_direct| = {worst:.2e} <= 1e-9; t_2=0, t_3=-1/9")


def test_07_fluctuation_amplitude():
    grid = asy.log_grid(2, 10_000, 200)
    amp = asy.fluct_amplitude(asy.sigma_tilde_tilde_series, grid)
    report(7, amp < 0.00110, f"max |Sigma~~_n| over {len(grid)} log-spaced n in [2,1e4] = {amp:.7f} < 0.00110")


def _non_growing(r):
    return all(abs(b) <= abs(a) for a, b in zip(r, r[1:]))


def test_08_asymptotic_remainders():
    ns = [2**e for e in range(10, 15)]
    r1 = [asy.mu1_stable(n) - asy.mu1_asymptotic(n).value for n in ns]
    ra = [asy.mu_avg_stable(n) - asy.mu_avg_asymptotic(n).value for n in ns]
    no_gamma = [asy.mu_avg_stable(n) - asy.mu_avg_asymptotic(n, include_gamma=False).value for n in ns]
    ok = _non_growing(r1) and _non_growing(ra) and abs(r1[0]) < 10
    detail = (
        "remainders at n=2^10..2^14: smallest "
        + ", ".join(f"{x:.4f}" for x in r1)
        + "; average "
        + ", ".join(f"{x:.4f}" for x in ra)
        + " (for contrast, without the gamma part of the ln n coefficient: "
        + ", ".join(f"{x:.2f}" for x in no_gamma)
        + ")"
    )
    report(8, ok, detail)


def test_09_three_key_scenario():
    r = three_key_scenario()
    report(9, r.bit_cost == 6 and r.key_cost == 2, f"bit comparisons {r.bit_cost} == 6, key comparisons {r.key_cost} == 2")


def _within(mean, se, target, z):
    if se == 0:
        return mean == target
    return abs(mean - target) <= z * se


def test_10_monte_carlo_means():
    t0 = time.perf_counter()
    ok = True
    parts = []
    for m, n in [(1, 2), (1, 8), (4, 8)]:
        s = monte_carlo(m, n, 100_000, seed=0)
        bit_ref = float(mu_general_exact(m, n).value)
        key_ref = float(knuth_key_expectation(m, n))
        zb = (s.bit_mean - bit_ref) / s.bit_stderr
        good = _within(s.bit_mean, s.bit_stderr, bit_ref, 4) and _within(s.key_mean, s.key_stderr, key_ref, 4)
        ok &= good
        zk = (s.key_mean - key_ref) / s.key_stderr if s.key_stderr else 0.0
        parts.append(f"({m},{n}) z_bits={zb:+.2f} z_keys={zk:+.2f}")
    dt = time.perf_counter() - t0
    report(10, ok and dt < 30, "; ".join(parts) + f"; |z| <= 4, {dt:.1f}s < 30s")


def test_11_pair_frequencies():
    res = pair_frequency_check(2, 5, 100_000, seed=0)
    worst = max(abs(p.z) for p in res)
    report(11, worst <= 5 and len(res) == 10, f"max |z| over {len(res)} rank pairs at (m=2,n=5) = {worst:.2f} <= 5")


def test_12_f1_f3_closed_forms():
    bad = [n for n in range(3, 201) if f_terms(n).f1 != f1_closed_exact(n) or f_terms(n).f3 != f3_closed_exact(n)]
    report(12, not bad, f"F1, F3 equal closed forms exactly for 3<=n<=200, mismatches {bad[:5]}")


def test_13_table_monotonicity():
    t = mu_table(20).as_dict()
    bad_m = [
        (n, m) for n in range(2, 21) for m in range(1, n) if m + 1 <= (n + 1) / 2 and t[(n, m + 1)] < t[(n, m)]
    ]
    bad_n = [(n, m) for n in range(2, 21) for m in range(1, n) if t[(n, m)] < t[(n - 1, m)]]
    report(13, not bad_m and not bad_n,
           f"n<=20 table non-decreasing in m (m<=(n+1)/2) and in n; violations {bad_m[:3]} {bad_n[:3]}")
