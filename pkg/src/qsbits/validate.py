"""Cross-checks between the exact, asymptotic and simulation engines.

``run_validation("quick")`` finishes in well under a minute; ``"full"``
adds the cascade identities up to n = 12 and the 10^5-trial simulations.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

from . import asymptotics as asy
from .mu import (
    C3Divisor,
    f1_closed_exact,
    f3_closed_exact,
    f_terms,
    mu1_exact,
    mu_avg_exact,
    mu_general_exact,
    t_direct,
)
from .simulator import knuth_key_expectation, monte_carlo, pair_frequency_check, three_key_scenario
from .special import zeta_alternating, zeta_euler_maclaurin

LEVELS = ("quick", "full")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass
class Report:
    level: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timings: bool = False) -> dict:
        checks = []
        for c in self.checks:
            d = asdict(c)
            if not timings:
                del d["seconds"]
            checks.append(d)
        return {"level": self.level, "passed": self.passed, "checks": checks}

    def to_text(self, timings: bool = False) -> str:
        lines = []
        for c in self.checks:
            suffix = f" ({c.seconds:.2f}s)" if timings else ""
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}{suffix}")
        n_ok = sum(c.passed for c in self.checks)
        lines.append(f"{n_ok}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failed check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail, time.perf_counter() - t0)


# -- individual checks ------------------------------------------------------------


def _anchors() -> tuple[bool, str]:
    ok = (
        mu1_exact(3).value == Fraction(43, 9)
        and t_direct(2) == 0
        and t_direct(3) == Fraction(-1, 9)
        and mu_general_exact(1, 2).value == 2
    )
    return ok, "mu(1,3)=43/9, t_2=0, t_3=-1/9, mu(1,2)=2"


def _cascade(n_max: int, divisor: C3Divisor) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        bad = []
        for n in range(2, n_max + 1):
            row = [mu_general_exact(m, n, divisor).value for m in range(1, n + 1)]
            if row[0] != mu1_exact(n).value:
                bad.append(f"smallest n={n}")
            if sum(row, Fraction(0)) / n != mu_avg_exact(n).value:
                bad.append(f"average n={n}")
            if row != row[::-1]:
                bad.append(f"symmetry n={n}")
        return not bad, "all identities hold" if not bad else "; ".join(bad[:5])

    return run


def _f_closed(n_max: int) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        bad = [
            n
            for n in range(3, n_max + 1)
            if f_terms(n).f1 != f1_closed_exact(n) or f_terms(n).f3 != f3_closed_exact(n)
        ]
        return not bad, f"3 <= n <= {n_max}" + (f", mismatch at {bad[:5]}" if bad else "")

    return run


def _slopes() -> tuple[bool, str]:
    c = asy.slope_c()
    a = asy.slope_avg()
    ok = abs(c - 5.27938) <= 5e-5 and abs(a - 8.20731) <= 5e-5
    return ok, f"c={c:.8f}, avg={a:.8f}"


def _lemma_t(n_max: int) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        worst = 0.0
        for n in range(2, n_max + 1):
            exact = float(t_direct(n))
            err = abs(asy.lemma_t(n) - exact)
            worst = max(worst, err / abs(exact) if exact else err)
        return worst <= 1e-9, f"max relative error {worst:.2e} for 2 <= n <= {n_max}"

    return run


def _lemma_v(n_max: int) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        worst = 0.0
        for n in range(2, n_max + 1):
            exact = float(t_direct(n + 2) - 2 * t_direct(n + 1) + t_direct(n))
            worst = max(worst, abs(asy.lemma_v(n) - exact))
        return worst <= 1e-10, f"max error {worst:.2e} for 2 <= n <= {n_max}"

    return run


def _mu_avg_stable(n_max: int) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        worst = 0.0
        for n in range(3, n_max + 1):
            exact = float(mu_avg_exact(n).value)
            worst = max(worst, abs(asy.mu_avg_stable(n) - exact) / exact)
        return worst <= 1e-9, f"max relative error {worst:.2e} for 3 <= n <= {n_max}"

    return run


def _zeta_paths() -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, 14):
        s = 1.0 - asy.chi(k)
        a = zeta_alternating(s)
        b = zeta_euler_maclaurin(s)
        worst = max(worst, abs(a - b) / abs(b))
    return worst <= 1e-10, f"max relative gap {worst:.2e} at s = 1 - chi_k, k <= 13"


def _three_keys() -> tuple[bool, str]:
    r = three_key_scenario()
    return (r.bit_cost, r.key_cost, r.selected) == (6, 2, 2), f"bits={r.bit_cost}, keys={r.key_cost}"


def _within(mean: float, se: float, target: float, z: float) -> bool:
    if se == 0.0:
        return mean == target
    return abs(mean - target) <= z * se


def _simulation(cells, trials: int, seed: int, workers: int, divisor: C3Divisor):
    def run() -> tuple[bool, str]:
        parts = []
        ok = True
        for m, n in cells:
            s = monte_carlo(m, n, trials, seed, workers)
            bit_ref = float(mu_general_exact(m, n, divisor).value)
            key_ref = float(knuth_key_expectation(m, n))
            good = _within(s.bit_mean, s.bit_stderr, bit_ref, 4.0) and _within(
                s.key_mean, s.key_stderr, key_ref, 4.0
            )
            ok &= good
            parts.append(f"({m},{n}) bits {s.bit_mean:.4f} vs {bit_ref:.4f}")
        return ok, "; ".join(parts)

    return run


def _pairs(trials: int, seed: int, workers: int) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        res = pair_frequency_check(2, 5, trials, seed, workers)
        worst = max(abs(p.z) for p in res)
        return worst <= 5.0, f"max |z| = {worst:.2f} over {len(res)} pairs"

    return run


def run_validation(
    level: str = "quick",
    divisor: C3Divisor = C3Divisor.INTEGRATION,
    seed: int = 0,
    workers: int = 1,
) -> Report:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    full = level == "full"
    divisor = C3Divisor(divisor)
    plan: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("anchors", _anchors),
        ("cascade identities", _cascade(12 if full else 8, divisor)),
        ("F1/F3 closed forms", _f_closed(200 if full else 60)),
        ("slope constants", _slopes),
        ("t_n residue form", _lemma_t(60)),
        ("v_n residue form", _lemma_v(40)),
        ("average-case residue form", _mu_avg_stable(60 if full else 30)),
        ("zeta evaluators agree", _zeta_paths),
        ("three-key scenario", _three_keys),
    ]
    if full:
        plan.append(("simulation means", _simulation([(1, 2), (1, 8), (4, 8)], 100_000, seed, workers, divisor)))
        plan.append(("pair frequencies", _pairs(100_000, seed, workers)))
    else:
        plan.append(("simulation means", _simulation([(1, 2), (2, 5)], 10_000, seed, workers, divisor)))
    return Report(level, [_timed(name, fn) for name, fn in plan])
