"""Complex Gamma and Riemann zeta in double precision.

Gamma uses the Lanczos approximation (g = 7, nine coefficients) with the
reflection formula on the left half-plane.  ``loggamma`` works in log space so
quotients such as Gamma(n+1)/Gamma(n+1-chi) stay finite for n ~ 1e6.

Zeta has two independent evaluators:

``zeta_alternating``
    Borwein's accelerated alternating series for eta(s) = (1 - 2^(1-s)) zeta(s).
    At the points s = 1 - 2 pi i k / ln 2 the prefactor vanishes, so near them
    zeta is recovered from a Taylor expansion of eta and of the prefactor.
``zeta_euler_maclaurin``
    Euler-Maclaurin summation; valid for any s != 1 and any height.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from .exact import bernoulli

LN2 = math.log(2.0)
EULER_GAMMA = 0.57721566490153286060651209008240243

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# |Im s| up to which zeta_alternating is the default evaluator
ALTERNATING_MAX_IM = 120.0


class PoleError(ValueError):
    """Argument sits on a pole of the requested function."""


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lanczos_sum(z: complex) -> complex:
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    return x


def complex_gamma(z: complex) -> complex:
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    z -= 1.0
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * _lanczos_sum(z)


def _log_sin_pi(z: complex) -> complex:
    """log sin(pi z) without overflow for large |Im z| (branch unspecified)."""
    y = z.imag
    if abs(y) < 2.0:
        return cmath.log(cmath.sin(math.pi * z))
    w = 1j * math.pi * z
    # sin(pi z) = (e^{w} - e^{-w}) / 2i; keep the dominant exponential symbolic
    if y > 0:
        return -w + cmath.log(cmath.exp(2.0 * w) - 1.0) - cmath.log(2j)
    return w + cmath.log(1.0 - cmath.exp(-2.0 * w)) - cmath.log(2j)


def loggamma(z: complex) -> complex:
    """A logarithm of Gamma(z); exp(loggamma(z)) == Gamma(z)."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - loggamma(1.0 - z)
    z -= 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(_lanczos_sum(z))


# -- zeta ---------------------------------------------------------------------


@lru_cache(maxsize=64)
def _borwein_weights(n: int) -> tuple[float, ...]:
    """w_k = (d_n - d_k) / d_n so that eta(s) ~ sum (-1)^k w_k (k+1)^-s."""
    d = []
    acc = 0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4**i // (math.factorial(n - i) * math.factorial(2 * i))
        d.append(n * acc)
    dn = d[n]
    return tuple((dn - d[k]) / dn for k in range(n))


def _borwein_terms(t: float) -> int:
    return 30 + int(math.ceil(1.8 * abs(t)))


def eta_derivatives(s: complex, orders: int = 0) -> list[complex]:
    """eta^(p)(s) for p = 0..orders by the accelerated alternating series."""
    s = complex(s)
    n = _borwein_terms(s.imag)
    w = np.asarray(_borwein_weights(n))
    k1 = np.arange(1, n + 1, dtype=float)
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    logs = np.log(k1)
    base = signs * w * np.exp(-s * logs)
    out = []
    factor = np.ones(n)
    for _ in range(orders + 1):
        out.append(complex(np.sum(base * factor)))
        factor = factor * -logs
    return out


_TAYLOR_RADIUS = 1e-3
_TAYLOR_ORDER = 8


def zeta_alternating(s: complex) -> complex:
    """zeta(s) for Re s >= 0 from the eta function."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real < 0:
        raise ValueError("zeta_alternating needs Re s >= 0")
    # nearest zero of 1 - 2^(1-s): s0 = 1 - 2 pi i k / ln 2
    k = round(-s.imag * LN2 / (2.0 * math.pi))
    s0 = complex(1.0, -2.0 * math.pi * k / LN2)
    d = s - s0
    if k != 0 and abs(d) < _TAYLOR_RADIUS:
        eta = eta_derivatives(s0, _TAYLOR_ORDER)
        num = 0j
        den = 0j
        for p in range(_TAYLOR_ORDER, 0, -1):
            num = num * d + eta[p] / math.factorial(p)
            den = den * d - (-LN2) ** p / math.factorial(p)
        return num / den
    prefactor = 1.0 - cmath.exp((1.0 - s) * LN2)
    return eta_derivatives(s, 0)[0] / prefactor


@lru_cache(maxsize=1)
def _em_bernoulli(m: int) -> tuple[float, ...]:
    # B_{2j} / (2j)! for j = 1..m
    return tuple(float(bernoulli(2 * j) / math.factorial(2 * j)) for j in range(1, m + 1))


_EM_TERMS = 30


def zeta_euler_maclaurin(s: complex) -> complex:
    """zeta(s) by Euler-Maclaurin summation, any s != 1."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    big_n = 20 + int(abs(s) / math.pi)
    k = np.arange(1, big_n, dtype=float)
    head = complex(np.sum(np.exp(-s * np.log(k))))
    log_n = math.log(big_n)
    n_pow = cmath.exp(-s * log_n)  # N^-s
    total = head + n_pow * big_n / (s - 1.0) + 0.5 * n_pow
    rising = s  # s (s+1) ... (s+2j-2)
    n_pow = n_pow / big_n  # N^(-s-1)
    for j, coef in enumerate(_em_bernoulli(_EM_TERMS), start=1):
        term = coef * rising * n_pow
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        n_pow /= big_n * big_n
    return total


def complex_zeta(s: complex) -> complex:
    """Riemann zeta; alternating series near the real axis, Euler-Maclaurin above it."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if abs(s.imag) > ALTERNATING_MAX_IM:
        return zeta_euler_maclaurin(s)
    if s.real >= 0:
        return zeta_alternating(s)
    # functional equation
    one_minus = 1.0 - s
    return (
        cmath.exp(s * LN2 + (s - 1.0) * math.log(math.pi))
        * cmath.sin(math.pi * s / 2.0)
        * complex_gamma(one_minus)
        * zeta_alternating(one_minus)
    )
