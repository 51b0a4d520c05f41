"""Exact rational expectations of Quickselect bit comparisons.

Three independent routes:

* :func:`mu1_exact` -- the closed Bernoulli-number formula for the smallest key;
* :func:`mu_avg_exact` -- the rank-averaged expectation from the five sums
  F_1..F_5;
* :func:`mu_general_exact` -- any rank, via a finite cascade that expands the
  comparison-probability polynomial in (s, t), integrates it termwise over the
  dyadic rectangles where two keys first differ, and sums the resulting
  geometric series in closed form.
"""

from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .exact import (
    DEFAULT_DIGITS,
    a_coeff,
    bernoulli,
    format_decimal,
    format_rational,
    harmonic,
)

log = logging.getLogger(__name__)

TABLE_SOFT_LIMIT = 25
CSV_HEADER = "n,m,mu_rational,mu_decimal"


class MuKind(str, enum.Enum):
    SMALLEST = "smallest"
    AVERAGE = "average"
    GENERAL = "general"


@dataclass(frozen=True)
class MuValue:
    value: Fraction
    m: int | None
    n: int
    kind: MuKind

    def to_dict(self, digits: int = DEFAULT_DIGITS) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "kind": self.kind.value,
            "mu_rational": format_rational(self.value),
            "mu_decimal": format_decimal(self.value, digits),
        }


def _check_n(n: int, low: int = 1) -> None:
    if not isinstance(n, int) or n < low:
        raise ValueError(f"key count must be an integer >= {low}, got {n!r}")


@lru_cache(maxsize=None)
def _pow2_factor(j: int) -> Fraction:
    """1 - 2^-j as an exact rational."""
    return Fraction(2**j - 1, 2**j)


@lru_cache(maxsize=None)
def t_direct(n: int) -> Fraction:
    """The Bernoulli sum t_n with mu(1,n) = 2n(H_n - 1) + 2 t_n."""
    _check_n(n, 2)
    total = Fraction(0)
    for j in range(2, n, 2):  # odd-index Bernoulli numbers vanish
        bracket = Fraction(n - comb(n, j), j - 1) - 1
        total += bernoulli(j) / (j * _pow2_factor(j)) * bracket
    return total


def mu1_exact(n: int) -> MuValue:
    """Expected bit comparisons to find the smallest of n uniform keys."""
    _check_n(n)
    if n == 1:
        return MuValue(Fraction(0), 1, 1, MuKind.SMALLEST)
    h = harmonic(n).h1
    value = 2 * n * (h - 1)
    for j in range(2, n, 2):
        value += 2 * bernoulli(j) * Fraction(n - j + 1 - comb(n, j), j * (j - 1)) / _pow2_factor(j)
    return MuValue(value, 1, n, MuKind.SMALLEST)


@dataclass(frozen=True)
class FTerms:
    f1: Fraction
    f2: Fraction
    f3: Fraction
    f4: Fraction
    f5: Fraction

    def as_tuple(self) -> tuple[Fraction, ...]:
        return (self.f1, self.f2, self.f3, self.f4, self.f5)


@lru_cache(maxsize=None)
def f_terms(n: int) -> FTerms:
    """The five sums F_1(n)..F_5(n) behind the average-case formula."""
    _check_n(n, 2)
    f1 = sum(
        (Fraction((-1) ** j * comb(n, j), (j - 1) * (j - 2)) for j in range(3, n + 1)),
        Fraction(0),
    )
    f2 = t_direct(n)
    f3 = sum(
        (Fraction((-1) ** j * comb(n - 1, j), j - 1) for j in range(2, n)),
        Fraction(0),
    )
    f4 = Fraction(0)
    for j in range(4, n, 2):
        bracket = Fraction(n - 1 - comb(n - 1, j - 1), j - 2) - 1
        f4 += bernoulli(j) / (j * (j - 1) * _pow2_factor(j)) * bracket
    f5 = sum(
        (
            Fraction((-1) ** j * comb(n, j), j * (j - 1) * (j - 2)) / _pow2_factor(j - 1)
            for j in range(3, n + 1)
        ),
        Fraction(0),
    )
    return FTerms(f1, f2, f3, f4, f5)


def f1_closed_exact(n: int) -> Fraction:
    """Residue closed form of F_1(n) with exact harmonic numbers, n >= 3."""
    _check_n(n, 3)
    h_nm2 = harmonic(n - 2).h1
    h_nm1 = harmonic(n - 1).h1
    return -Fraction(n * (n - 1), 2) * h_nm2 + Fraction(5 * n * (n - 1), 4) - n * h_nm1 - Fraction(1, 2)


def f3_closed_exact(n: int) -> Fraction:
    """Residue closed form of F_3(n) with exact harmonic numbers, n >= 3."""
    _check_n(n, 3)
    h_nm2 = harmonic(n - 2).h1
    return n * h_nm2 - n - h_nm2 + 2


def mu_avg_exact(n: int) -> MuValue:
    """Expected bit comparisons with the target rank uniform on 1..n."""
    _check_n(n)
    if n == 1:
        return MuValue(Fraction(0), None, 1, MuKind.AVERAGE)
    f = f_terms(n)
    value = (
        2 * (n - 1)
        - Fraction(8, n) * f.f1
        + Fraction(4, n) * f.f2
        + Fraction(4, 9) * f.f3
        - 4 * f.f4
        + Fraction(8, n) * f.f5
    )
    return MuValue(value, None, n, MuKind.AVERAGE)


# -- general rank: the finite-summation cascade ------------------------------


class Case(str, enum.Enum):
    """Position of the target rank m relative to a rank pair i < j."""

    P1 = "P1"  # m <= i
    P2 = "P2"  # i < m < j
    P3 = "P3"  # j <= m


class C3Divisor(str, enum.Enum):
    # (f+1)(h+1) is what termwise integration of s^f t^h produces.
    INTEGRATION = "integration"
    # (n+1)(f+1) does not match the integration; kept as a mutation hook.
    PRINTED = "printed"


@lru_cache(maxsize=None)
def dyadic_weight(a: int) -> Fraction:
    """(1 - 2^-a)^-2 = sum_k (k+1) 2^-ka."""
    return 1 / _pow2_factor(a) ** 2


_HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def c4(f: int, h: int, j: int) -> Fraction:
    """Coefficient of l^(j-1) in [l^(h+1) - (l-1/2)^(h+1)] [(l-1/2)^(f+1) - (l-1)^(f+1)]."""
    total = Fraction(0)
    for jp in range(max(0, j - 1 - h), min(j - 1, f) + 1):
        total += (
            comb(f + 1, jp)
            * comb(h + 1, j - 1 - jp)
            * (1 - Fraction(1, 2 ** (f + 1 - jp)))
            * Fraction(1, 2**jp)
        )
    sign = -1 if (f + h - j + 1) % 2 else 1
    return sign * total * _HALF ** (h - j + 2)


@lru_cache(maxsize=None)
def c7_kernel(f: int, h: int) -> dict[int, Fraction]:
    """sum_{j,r} C4(f,h,j) a_{j,r}, grouped by the exponent a = f+h+2+r-j.

    Independent of (m, n) and of the case, so it is shared by every cell.
    """
    out: dict[int, Fraction] = defaultdict(Fraction)
    for j in range(1, f + h + 2):
        cj = c4(f, h, j)
        if not cj:
            continue
        for r in range(j):
            ar = a_coeff(j, r)
            if ar:
                out[f + h + 2 + r - j] += cj * ar
    return dict(out)


@lru_cache(maxsize=None)
def c7_collapsed(f: int, h: int) -> Fraction:
    """sum_a kernel(f,h,a) (1-2^-a)^-2 for one (f, h) monomial."""
    return sum((v * dyadic_weight(a) for a, v in c7_kernel(f, h).items()), Fraction(0))


@dataclass
class CascadeContext:
    """State for evaluating mu(m, n) through C1 -> C7.

    ``c2`` results are memoized per (case, f, h); everything downstream of C3
    is independent of (m, n) and lives in module-level caches.
    """

    m: int
    n: int
    divisor: C3Divisor = C3Divisor.INTEGRATION
    _c2: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not (1 <= self.m <= self.n):
            raise ValueError(f"rank m must satisfy 1 <= m <= n, got m={self.m}, n={self.n}")
        self._fact = [factorial(k) for k in range(self.n + 1)]

    def c1(self, case: Case, i: int, j: int) -> Fraction:
        m, n = self.m, self.n
        if not 1 <= i < j <= n:
            return Fraction(0)
        if case is Case.P1:
            if m > i:
                return Fraction(0)
            prob = Fraction(2, j - m + 1)
        elif case is Case.P2:
            if not i < m < j:
                return Fraction(0)
            prob = Fraction(2, j - i + 1)
        else:
            if j > m:
                return Fraction(0)
            prob = Fraction(2, m - i + 1)
        fact = self._fact
        multinomial = fact[n] // (fact[i - 1] * fact[j - i - 1] * fact[n - j])
        return prob * multinomial

    def f_range(self, case: Case) -> range:
        # s^f comes from s^(i-1) (t-s)^(j-i-1): i-1 <= f <= j-2
        if case is Case.P1:
            return range(self.m - 1, self.n - 1)
        if case is Case.P2:
            return range(0, self.n - 1)
        return range(0, self.m - 1)

    def c2(self, case: Case, f: int, h: int) -> Fraction:
        key = (case, f, h)
        hit = self._c2.get(key)
        if hit is not None:
            return hit
        n = self.n
        total = Fraction(0)
        for i in range(1, f + 2):
            for j in range(f + 2, min(f + h + 2, n) + 1):
                c1 = self.c1(case, i, j)
                if not c1:
                    continue
                b = comb(j - i - 1, f - i + 1) * comb(n - j, h - j + f + 2)
                if not b:
                    continue
                term = c1 * b
                total += -term if (h - i - j + 1) % 2 else term
        self._c2[key] = total
        return total

    def c3(self, case: Case, f: int, h: int) -> Fraction:
        c2 = self.c2(case, f, h)
        if self.divisor is C3Divisor.INTEGRATION:
            return c2 / ((f + 1) * (h + 1))
        return c2 / ((self.n + 1) * (f + 1))

    def monomials(self, case: Case):
        for f in self.f_range(case):
            for h in range(0, self.n - f - 1):
                yield f, h

    def c7(self, case: Case) -> dict[int, Fraction]:
        """C7(a) for a = 1..n-1."""
        out = {a: Fraction(0) for a in range(1, self.n)}
        for f, h in self.monomials(case):
            c3 = self.c3(case, f, h)
            if not c3:
                continue
            for a, v in c7_kernel(f, h).items():
                out[a] += c3 * v
        return out

    def mu_case(self, case: Case) -> Fraction:
        """mu_q(m, n) = sum_a C7(a) (1 - 2^-a)^-2."""
        total = Fraction(0)
        for f, h in self.monomials(case):
            c3 = self.c3(case, f, h)
            if c3:
                total += c3 * c7_collapsed(f, h)
        return total

    def mu(self) -> Fraction:
        return sum((self.mu_case(c) for c in Case), Fraction(0))


def mu_general_exact(m: int, n: int, divisor: C3Divisor = C3Divisor.INTEGRATION) -> MuValue:
    """Expected bit comparisons to find the rank-m key among n keys."""
    _check_n(n)
    if not isinstance(m, int) or not 1 <= m <= n:
        raise ValueError(f"rank m must satisfy 1 <= m <= n, got m={m!r}, n={n}")
    value = _mu_general_cached(m, n, C3Divisor(divisor))
    return MuValue(value, m, n, MuKind.GENERAL)


@lru_cache(maxsize=4096)
def _mu_general_cached(m: int, n: int, divisor: C3Divisor) -> Fraction:
    if n == 1:
        return Fraction(0)
    return CascadeContext(m, n, divisor).mu()


@dataclass(frozen=True)
class MuRow:
    n: int
    m: int
    value: MuValue


@dataclass(frozen=True)
class MuTable:
    rows: tuple[MuRow, ...]

    def cell(self, m: int, n: int) -> Fraction:
        for row in self.rows:
            if row.n == n and row.m == m:
                return row.value.value
        raise KeyError((m, n))

    def as_dict(self) -> dict[tuple[int, int], Fraction]:
        return {(r.n, r.m): r.value.value for r in self.rows}

    def to_records(self, digits: int = DEFAULT_DIGITS) -> list[dict]:
        return [
            {
                "n": r.n,
                "m": r.m,
                "mu_rational": format_rational(r.value.value),
                "mu_decimal": format_decimal(r.value.value, digits),
            }
            for r in self.rows
        ]

    def to_csv(self, digits: int = DEFAULT_DIGITS) -> str:
        lines = [CSV_HEADER]
        for rec in self.to_records(digits):
            lines.append(f"{rec['n']},{rec['m']},{rec['mu_rational']},{rec['mu_decimal']}")
        return "\n".join(lines) + "\n"

    def to_json(self, digits: int = DEFAULT_DIGITS) -> str:
        import json

        return json.dumps(self.to_records(digits), indent=2) + "\n"


def _table_cell(args: tuple[int, int, str]) -> tuple[int, int, Fraction]:
    m, n, divisor = args
    return n, m, mu_general_exact(m, n, C3Divisor(divisor)).value


def mu_table(
    n_max: int,
    workers: int = 1,
    divisor: C3Divisor = C3Divisor.INTEGRATION,
) -> MuTable:
    """mu(m, n) for every 1 <= m <= n <= n_max, sorted by (n, m)."""
    if not isinstance(n_max, int) or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    if n_max > TABLE_SOFT_LIMIT:
        log.warning("n_max=%d exceeds %d; the cascade grows like n^7", n_max, TABLE_SOFT_LIMIT)
    cells = [(m, n, C3Divisor(divisor).value) for n in range(1, n_max + 1) for m in range(1, n + 1)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        # largest cells first so the pool drains evenly
        ordered = sorted(cells, key=lambda c: -c[1])
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_table_cell, ordered, chunksize=4))
    else:
        results = [_table_cell(c) for c in cells]
    results.sort(key=lambda r: (r[0], r[1]))
    rows = tuple(MuRow(n, m, MuValue(v, m, n, MuKind.GENERAL)) for n, m, v in results)
    return MuTable(rows)


def clear_caches() -> None:
    """Drop every memo table (for cold-start timing)."""
    for fn in (_pow2_factor, t_direct, f_terms, dyadic_weight, c4, c7_kernel, c7_collapsed, _mu_general_cached):
        fn.cache_clear()
