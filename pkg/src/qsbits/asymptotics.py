"""Asymptotic expansions and fluctuation series for the bit-comparison counts.

Every series here has the shape ``sum_{k != 0} zeta(1 - chi_k) * w(chi_k)``
with chi_k = 2 pi i k / ln 2 and w a rational function of chi (the Gamma
quotients collapse to finite products).  Terms for k and -k are complex
conjugates, so a series is twice the real part of its k >= 1 half.  The terms
decay only like a power of k, so each evaluation reports a tail estimate and,
unless a fixed truncation is requested, keeps adding terms until that estimate
drops below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from .special import EULER_GAMMA, LN2, complex_zeta, loggamma

DEFAULT_TOL = 1e-12
DEFAULT_K_LIMIT = 4000
_PRODUCT_CUTOFF = 40

GAMMA = EULER_GAMMA


def chi(k: int) -> complex:
    return complex(0.0, 2.0 * math.pi * k / LN2)


@lru_cache(maxsize=None)
def zeta_at_pole(k: int) -> complex:
    """zeta(1 - chi_k), cached: every series reuses the same values."""
    return complex_zeta(1.0 - chi(k))


def _zeta_bound(k: int) -> float:
    # |zeta(1+it)| <= ln|t| + 3 for |t| >= 2
    return math.log(abs(chi(k).imag)) + 3.0


def factorial_over_product(nf: int, x: complex, lo: int, hi: int) -> complex:
    """nf! / prod_{j=lo}^{hi} (j - x), finite for large nf or |x|."""
    if hi - lo < _PRODUCT_CUTOFF and nf < 170:
        prod = 1 + 0j
        for j in range(lo, hi + 1):
            prod *= j - x
        return math.factorial(nf) / prod
    # prod_{j=lo}^{hi} (j - x) = Gamma(hi + 1 - x) / Gamma(lo - x)
    log_val = math.lgamma(nf + 1) + loggamma(lo - x) - loggamma(hi + 1 - x)
    return _cexp(log_val)


def _cexp(z: complex) -> complex:
    if z.real < -745.0:
        return 0j
    return complex(math.exp(z.real) * math.cos(z.imag), math.exp(z.real) * math.sin(z.imag))


@dataclass(frozen=True)
class SeriesValue:
    value: float
    k_used: int
    tail: float
    imag_residual: float


@dataclass(frozen=True)
class FluctuationSeries:
    """``sum_{k != 0} [zeta(1 - chi_k)] * weight(chi_k)``.

    ``k_max`` fixes the truncation; ``None`` grows it until the estimated
    tail is at most ``tol`` (or ``k_limit`` is reached).
    """

    weight: Callable[[complex], complex]
    with_zeta: bool = True
    k_max: int | None = None
    tol: float = DEFAULT_TOL
    k_limit: int = DEFAULT_K_LIMIT
    name: str = ""

    def term(self, k: int) -> complex:
        if k == 0:
            raise ValueError("k = 0 is excluded from fluctuation series")
        w = self.weight(chi(k))
        if self.with_zeta:
            z = zeta_at_pole(k) if k > 0 else zeta_at_pole(-k).conjugate()
            return z * w
        return w

    def envelope(self, k: int) -> float:
        bound = abs(self.weight(chi(k)))
        return bound * _zeta_bound(k) if self.with_zeta else bound

    def tail_estimate(self, k: int) -> float:
        """Estimate of sum_{|j| > k} |term(j)|, from the local power-law decay."""
        e1 = self.envelope(k + 1)
        if e1 == 0.0:
            return 0.0
        e2 = self.envelope(2 * k + 2)
        if e2 == 0.0:
            return 2.0 * e1
        p = math.log(e1 / e2) / LN2
        if p <= 1.0:
            return math.inf
        return 2.0 * e1 * (1.0 + (k + 1) / (p - 1.0))

    def truncation(self) -> int:
        if self.k_max is not None:
            return self.k_max
        if self.tail_estimate(1) <= self.tol:
            return 1
        hi = 2
        while hi < self.k_limit and self.tail_estimate(hi) > self.tol:
            hi *= 2
        hi = min(hi, self.k_limit)
        lo = hi // 2
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.tail_estimate(mid) <= self.tol:
                hi = mid
            else:
                lo = mid
        return hi

    def evaluate(self) -> SeriesValue:
        big_k = self.truncation()
        total = 0j
        for k in range(1, big_k + 1):
            total += self.term(k)
        # adding the conjugate half: 2 Re; the imaginary part cancels exactly
        return SeriesValue(2.0 * total.real, big_k, self.tail_estimate(big_k), 0.0)

    def symmetric_sum(self, big_k: int) -> complex:
        """Explicit sum over 0 < |k| <= big_k, for checking conjugate pairing."""
        total = 0j
        for k in range(1, big_k + 1):
            total += self.term(k) + self.term(-k)
        return total

    def value(self) -> float:
        return self.evaluate().value


def _series(weight, with_zeta=True, k_max=None, tol=DEFAULT_TOL, name=""):
    return FluctuationSeries(weight, with_zeta, k_max, tol, name=name)


# -- the named series --------------------------------------------------------


def slope_sum_series(k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """sum zeta(1-chi) Gamma(1-chi) / (Gamma(4-chi) (1-chi))."""
    return _series(
        lambda x: 1.0 / ((1 - x) ** 2 * (2 - x) * (3 - x)), k_max=k_max, tol=tol, name="c-sum"
    )


def a_tilde_series(k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """sum zeta(1-chi) Gamma(1-chi) / (ln2 (2-chi) Gamma(4-chi))."""
    return _series(
        lambda x: 1.0 / (LN2 * (2 - x) * (1 - x) * (2 - x) * (3 - x)),
        k_max=k_max,
        tol=tol,
        name="a~-sum",
    )


def b_series(k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """b = sum 2 zeta(1-chi) Gamma(-chi) / (ln2 (1-chi) Gamma(3-chi))."""
    return _series(
        lambda x: 2.0 / (LN2 * (1 - x) * (-x) * (1 - x) * (2 - x)), k_max=k_max, tol=tol, name="b"
    )


def b_tilde_series(k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """sum zeta(1-chi) Gamma(1-chi) / (ln2 (2-chi)(1-chi) Gamma(3-chi))."""
    return _series(
        lambda x: 1.0 / (LN2 * (2 - x) * (1 - x) * (1 - x) * (2 - x)), k_max=k_max, tol=tol, name="b~"
    )


def sigma_series(n: int, k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """Sigma_n = sum zeta(1-chi) Gamma(n+1) Gamma(1-chi) / (ln2 Gamma(n+3-chi))."""
    return _series(
        lambda x: factorial_over_product(n, x, 1, n + 2) / LN2, k_max=k_max, tol=tol, name=f"Sigma_{n}"
    )


def sigma_tilde_series(n: int, k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """sum zeta(1-chi) Gamma(1-chi) Gamma(n+1) / (ln2 (1-chi) Gamma(n+2-chi))."""
    return _series(
        lambda x: factorial_over_product(n, x, 1, n + 1) / (LN2 * (1 - x)),
        k_max=k_max,
        tol=tol,
        name=f"Sigma~_{n}",
    )


def sigma_tilde_tilde_series(
    n: int, k_max: int | None = None, tol: float = DEFAULT_TOL
) -> FluctuationSeries:
    """sum zeta(1-chi) Gamma(-chi) Gamma(n+1) / (ln2 (1-chi) Gamma(n+1-chi))."""
    return _series(
        lambda x: factorial_over_product(n, x, 0, n) / (LN2 * (1 - x)),
        k_max=k_max,
        tol=tol,
        name=f"Sigma~~_{n}",
    )


def xi_tilde_tilde_series(n: int, k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """sum zeta(1-chi) Gamma(1-chi) Gamma(n) / (ln2 (2-chi)(1-chi) Gamma(n+1-chi))."""
    return _series(
        lambda x: factorial_over_product(n - 1, x, 1, n) / (LN2 * (2 - x) * (1 - x)),
        k_max=k_max,
        tol=tol,
        name=f"xi~~_{n}",
    )


def f5_fluctuation_series(n: int, k_max: int | None = None, tol: float = DEFAULT_TOL) -> FluctuationSeries:
    """sum Gamma(-1-chi) Gamma(n+1) / (ln2 chi (chi^2-1) Gamma(n-chi)); no zeta factor.

    These are the residues at s = 1 + chi_k of the F_5 kernel; the product of
    (s - j) for j = 3..n leaves Gamma(n - chi) in the denominator.
    """
    return _series(
        lambda x: factorial_over_product(n, x, -1, n - 1) / (LN2 * x * (x * x - 1)),
        with_zeta=False,
        k_max=k_max,
        tol=tol,
        name=f"F5-fluct_{n}",
    )


# -- constants ---------------------------------------------------------------


def const_a(k_max: int | None = None, tol: float = DEFAULT_TOL) -> float:
    s = slope_sum_series(k_max, tol).value()
    return 14.0 / 9.0 + (17.0 - 6.0 * GAMMA) / (18.0 * LN2) - 2.0 / LN2 * s


def const_b(k_max: int | None = None, tol: float = DEFAULT_TOL) -> float:
    return b_series(k_max, tol).value()


def const_a_tilde(k_max: int | None = None, tol: float = DEFAULT_TOL) -> float:
    s = a_tilde_series(k_max, tol).value()
    return 7.0 / (36.0 * LN2) - 41.0 / 72.0 - GAMMA / (12.0 * LN2) - s


def const_b_tilde(k_max: int | None = None, tol: float = DEFAULT_TOL) -> float:
    return b_tilde_series(k_max, tol).value()


def slope_c(k_max: int | None = None, tol: float = DEFAULT_TOL) -> float:
    """Linear coefficient of the smallest-key expectation (about 5.27938)."""
    s = slope_sum_series(k_max, tol).value() if k_max != 0 else 0.0
    return 28.0 / 9.0 + (17.0 - 6.0 * GAMMA) / (9.0 * LN2) - 4.0 / LN2 * s


def slope_avg(k_max: int | None = None, tol: float = DEFAULT_TOL) -> float:
    """Linear coefficient of the rank-averaged expectation (about 8.20731)."""
    if k_max == 0:
        a_t = 7.0 / (36.0 * LN2) - 41.0 / 72.0 - GAMMA / (12.0 * LN2)
    else:
        a_t = const_a_tilde(k_max, tol)
    return 4.0 * (1.0 + LN2 - a_t)


# -- harmonic numbers in floating point ---------------------------------------

_H_DIRECT_LIMIT = 2000


def harmonic_float(n: int) -> float:
    if n < _H_DIRECT_LIMIT:
        return math.fsum(1.0 / i for i in range(1, n + 1))
    x = float(n)
    x2 = x * x
    return (
        math.log(x)
        + GAMMA
        + 1.0 / (2.0 * x)
        - 1.0 / (12.0 * x2)
        + 1.0 / (120.0 * x2 * x2)
        - 1.0 / (252.0 * x2 * x2 * x2)
    )


def harmonic2_float(n: int) -> float:
    if n < _H_DIRECT_LIMIT:
        return math.fsum(1.0 / (i * i) for i in range(n, 0, -1))
    x = float(n)
    return (
        math.pi**2 / 6.0
        - 1.0 / x
        + 1.0 / (2.0 * x**2)
        - 1.0 / (6.0 * x**3)
        + 1.0 / (30.0 * x**5)
    )


# -- exact-in-n expressions from the residue analysis -------------------------


def lemma_v(n: int, tol: float = DEFAULT_TOL) -> float:
    """Second difference t_{n+2} - 2 t_{n+1} + t_n."""
    if n < 2:
        raise ValueError("lemma_v needs n >= 2")
    h = harmonic_float(n + 2)
    main = -1.0 / (n + 1) + (h / LN2 - (GAMMA / LN2 - 0.5)) / ((n + 1) * (n + 2))
    return main - sigma_series(n, tol=tol).value()


def lemma_u(n: int, tol: float = DEFAULT_TOL) -> float:
    """First difference t_{n+1} - t_n."""
    if n < 2:
        raise ValueError("lemma_u needs n >= 2")
    h = harmonic_float(n)
    h1 = harmonic_float(n + 1)
    return (
        -h
        + const_a(tol=tol)
        - h1 / (LN2 * (n + 1))
        + ((GAMMA - 1.0) / LN2 - 0.5) / (n + 1)
        + sigma_tilde_series(n, tol=tol).value()
    )


def lemma_t(n: int, tol: float = DEFAULT_TOL) -> float:
    """t_n from its residue form; stable for large n."""
    if n < 2:
        raise ValueError("lemma_t needs n >= 2")
    h = harmonic_float(n)
    h2 = harmonic2_float(n)
    kappa = (GAMMA - 1.0) / LN2 - 0.5
    return (
        -(n * h - n - 1)
        + const_a(tol=tol) * (n - 2)
        - (h * h + h2 - 3.5) / (2.0 * LN2)
        + kappa * (h - 1.5)
        + const_b(tol=tol)
        - sigma_tilde_tilde_series(n, tol=tol).value()
    )


def mu1_stable(n: int, tol: float = DEFAULT_TOL) -> float:
    """mu(1, n) = 2n(H_n - 1) + 2 t_n with t_n from :func:`lemma_t`."""
    if n < 1:
        raise ValueError("mu1_stable needs n >= 1")
    if n == 1:
        return 0.0
    return 2.0 * n * (harmonic_float(n) - 1.0) + 2.0 * lemma_t(n, tol)


def f1_closed(n: int) -> float:
    h_nm2 = harmonic_float(n - 2)
    return -0.5 * n * (n - 1) * h_nm2 + 1.25 * n * (n - 1) - n * harmonic_float(n - 1) - 0.5


def f3_closed(n: int) -> float:
    h_nm2 = harmonic_float(n - 2)
    return n * h_nm2 - n - h_nm2 + 2.0


def f4_stable(n: int, tol: float = DEFAULT_TOL) -> float:
    if n < 2:
        raise ValueError("f4_stable needs n >= 2")
    a_t = const_a_tilde(tol=tol)
    b_t = const_b_tilde(tol=tol)
    h_nm1 = harmonic_float(n - 1)
    h_n = harmonic_float(n)
    q = (3.0 + LN2 - 2.0 * GAMMA) / LN2
    return (
        n * h_nm1 / 9.0
        + 8.0 * h_nm1 / 9.0
        + (a_t - 1.0 / 9.0) * n
        - 8.0 / 9.0
        - 3.0 / (8.0 * LN2)
        - q / 8.0
        - 2.0 * a_t
        + b_t
        - xi_tilde_tilde_series(n, tol=tol).value()
        + h_n / (2.0 * LN2 * n)
        + q / (4.0 * n)
    )


def f5_stable(n: int, tol: float = DEFAULT_TOL) -> float:
    if n < 3:
        raise ValueError("f5_stable needs n >= 3")
    h_n = harmonic_float(n)
    h_nm1 = harmonic_float(n - 1)
    h_nm2 = harmonic_float(n - 2)
    h2_nm1 = harmonic2_float(n - 1)
    bracket = (
        h_nm1 * h_nm1 / (2.0 * LN2)
        + (0.5 - 1.0 / LN2) * h_nm1
        + h2_nm1 / (2.0 * LN2)
        + 2.0 / LN2
        + LN2 / 12.0
        - 0.5
    )
    return (
        0.25 * (2.0 * h_n + 3.0 + 4.0 * LN2)
        - 0.5 * n * (n - 1) * (h_nm2 - LN2 - 3.0)
        - n * bracket
        + f5_fluctuation_series(n, tol=tol).value()
    )


def mu_avg_stable(n: int, tol: float = DEFAULT_TOL) -> float:
    """Rank-averaged expectation from the residue forms of F_1..F_5."""
    if n < 3:
        raise ValueError("mu_avg_stable needs n >= 3")
    return (
        2.0 * (n - 1)
        - 8.0 / n * f1_closed(n)
        + 4.0 / n * lemma_t(n, tol)
        + 4.0 / 9.0 * f3_closed(n)
        - 4.0 * f4_stable(n, tol)
        + 8.0 / n * f5_stable(n, tol)
    )


# -- leading-order expansions -----------------------------------------------


@dataclass(frozen=True)
class AsymptoticEstimate:
    value: float
    n: int
    remainder_bound_note: str


def mu1_asymptotic(n: int, tol: float = DEFAULT_TOL) -> AsymptoticEstimate:
    if n < 2:
        raise ValueError("expansion defined for n >= 2")
    ln = math.log(n)
    value = slope_c(tol=tol) * n - ln * ln / LN2 - (2.0 / LN2 + 1.0) * ln
    return AsymptoticEstimate(value, n, "O(1) remainder with small log-periodic fluctuation")


# Coefficient of ln n in the rank-averaged expansion.  Expanding
# (H_{n-1})^2 = (ln n)^2 + 2 gamma ln n + O(1) inside F_5 contributes
# -8 gamma / ln2 on top of 4 (2/ln2 - 1); without it the remainder grows
# like -(8 gamma / ln2) ln n instead of staying bounded.
AVG_LOG_COEFF = 4.0 * (2.0 / LN2 - 1.0) - 8.0 * GAMMA / LN2
AVG_LOG_COEFF_NO_GAMMA = 4.0 * (2.0 / LN2 - 1.0)


def mu_avg_asymptotic(n: int, tol: float = DEFAULT_TOL, include_gamma: bool = True) -> AsymptoticEstimate:
    """slope_avg n - (4/ln2)(ln n)^2 + coeff ln n.

    ``include_gamma=False`` selects the ln n coefficient 4(2/ln2 - 1) alone,
    whose remainder is not bounded; it is kept for comparison.
    """
    if n < 2:
        raise ValueError("expansion defined for n >= 2")
    ln = math.log(n)
    coeff = AVG_LOG_COEFF if include_gamma else AVG_LOG_COEFF_NO_GAMMA
    value = slope_avg(tol=tol) * n - 4.0 / LN2 * ln * ln + coeff * ln
    note = "O(1) remainder" if include_gamma else "remainder grows like -(8 gamma/ln2) ln n"
    return AsymptoticEstimate(value, n, note)


def fluct_amplitude(
    series: Callable[[int], FluctuationSeries] = sigma_tilde_tilde_series,
    n_grid: Iterable[int] = (),
) -> float:
    """max over the grid of |series(n)|."""
    grid = list(n_grid)
    if not grid:
        raise ValueError("n_grid must be nonempty")
    return max(abs(series(n).value()) for n in grid)


def log_grid(lo: int, hi: int, points: int) -> list[int]:
    """Distinct integers spaced evenly in log between lo and hi inclusive."""
    if points < 2:
        return [lo]
    ratio = math.log(hi / lo) / (points - 1)
    return sorted({int(round(lo * math.exp(i * ratio))) for i in range(points)} | {lo, hi})


def clear_caches() -> None:
    zeta_at_pole.cache_clear()
