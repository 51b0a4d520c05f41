"""Exact integer/rational arithmetic and the number sequences the formulas use.

Rationals are :class:`fractions.Fraction`, which keeps every value in lowest
terms with a positive denominator.  The helpers here add the serialization
used throughout the package ("p/q" strings and fixed-digit decimals) and
memoized Bernoulli and harmonic numbers.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

Rational = Fraction

DEFAULT_DIGITS = 12


def binom(n: int, k: int) -> int:
    """Binomial coefficient C(n, k), zero outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binom requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return comb(n, k)


class BernoulliTable:
    """Bernoulli numbers B_0..B_N, extended on demand.

    Stored with B_1 = +1/2 (the sign matching B_k = -k zeta(1-k)).  The
    defining recurrence ``sum_{k=0}^{m} C(m+1,k) B_k = 0`` holds for the
    sequence with B_1 = -1/2; with the stored sign the same sum equals m+1.
    Values already produced never change; extension appends under a lock so
    a shared table can be read from several threads.
    """

    def __init__(self, size: int = 0):
        self._values: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()
        if size > 0:
            self.extend(size)

    def __len__(self) -> int:
        return len(self._values)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(self._values)

    def extend(self, upto: int) -> None:
        if upto < len(self._values):
            return
        with self._lock:
            vals = self._values
            for m in range(len(vals), upto + 1):
                if m > 1 and m % 2 == 1:
                    vals.append(Fraction(0))
                    continue
                # B_m from sum_{k=0}^{m} C(m+1,k) B_k = 0 (standard B_1 = -1/2),
                # then flip the sign of B_1 below.
                acc = Fraction(0)
                for k in range(m):
                    bk = vals[k]
                    if k == 1:
                        bk = -bk
                    if bk:
                        acc += comb(m + 1, k) * bk
                b = -acc / (m + 1)
                vals.append(-b if m == 1 else b)

    def __getitem__(self, j: int) -> Fraction:
        if j < 0:
            raise IndexError(j)
        if j >= len(self._values):
            self.extend(j)
        return self._values[j]


_TABLE = BernoulliTable()


def bernoulli(j: int, table: BernoulliTable | None = None) -> Fraction:
    """B_j with B_1 = +1/2."""
    if j < 0:
        raise ValueError(f"bernoulli index must be >= 0, got {j}")
    return (table if table is not None else _TABLE)[j]


@dataclass(frozen=True)
class HarmonicPair:
    h1: Fraction
    h2: Fraction


@lru_cache(maxsize=None)
def _harmonic_upto(n: int) -> tuple[Fraction, Fraction]:
    if n == 0:
        return Fraction(0), Fraction(0)
    if n > 64:
        # bounded recursion depth: walk up from the nearest cached block
        base = n - 64
        h1, h2 = _harmonic_upto(base)
        for i in range(base + 1, n + 1):
            h1 += Fraction(1, i)
            h2 += Fraction(1, i * i)
        return h1, h2
    h1 = h2 = Fraction(0)
    for i in range(1, n + 1):
        h1 += Fraction(1, i)
        h2 += Fraction(1, i * i)
    return h1, h2


def harmonic(n: int) -> HarmonicPair:
    """Exact H_n and H_n^(2); both zero for n = 0."""
    if n < 0:
        raise ValueError(f"harmonic requires n >= 0, got {n}")
    h1, h2 = _harmonic_upto(n)
    return HarmonicPair(h1, h2)


def a_coeff(j: int, r: int) -> Fraction:
    """Coefficient of n^(j-r) in sum_{l=1}^{n} l^(j-1)."""
    if j < 1 or not 0 <= r <= j - 1:
        raise ValueError(f"a_coeff needs j >= 1 and 0 <= r <= j-1, got j={j}, r={r}")
    if r == 0:
        return Fraction(1, j)
    if r == 1:
        return Fraction(1, 2)
    return bernoulli(r) / r * comb(j - 1, r - 1)


def power_sum(n: int, j: int) -> Fraction:
    """sum_{l=1}^{n} l^(j-1) via the Bernoulli-number polynomial."""
    if n < 0 or j < 1:
        raise ValueError(f"power_sum needs n >= 0, j >= 1, got n={n}, j={j}")
    return sum((a_coeff(j, r) * n ** (j - r) for r in range(j)), Fraction(0))


def format_rational(x: Fraction) -> str:
    """"p/q", or "p" when the value is an integer."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def format_decimal(x: Fraction, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed-point rendering with ``digits`` places, rounding half to even."""
    if digits < 0:
        raise ValueError("digits must be >= 0")
    x = Fraction(x)
    scaled = round(x * 10**digits)  # Fraction.__round__ is half-to-even
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
