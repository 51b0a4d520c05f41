"""Expected bit comparisons of Quickselect: exact, asymptotic and simulated."""

from .asymptotics import (
    lemma_t,
    lemma_u,
    lemma_v,
    mu1_asymptotic,
    mu1_stable,
    mu_avg_asymptotic,
    mu_avg_stable,
    slope_avg,
    slope_c,
)
from .exact import Rational, bernoulli, binom, harmonic
from .mu import (
    MuTable,
    MuValue,
    f_terms,
    mu1_exact,
    mu_avg_exact,
    mu_general_exact,
    mu_table,
    t_direct,
)
from .simulator import BitKey, SelectStats, compare, monte_carlo, pair_frequency_check, quickselect

__all__ = [
    "BitKey",
    "MuTable",
    "MuValue",
    "Rational",
    "SelectStats",
    "bernoulli",
    "binom",
    "compare",
    "f_terms",
    "harmonic",
    "lemma_t",
    "lemma_u",
    "lemma_v",
    "monte_carlo",
    "mu1_asymptotic",
    "mu1_exact",
    "mu1_stable",
    "mu_avg_asymptotic",
    "mu_avg_exact",
    "mu_avg_stable",
    "mu_general_exact",
    "mu_table",
    "pair_frequency_check",
    "quickselect",
    "slope_avg",
    "slope_c",
    "t_direct",
]
