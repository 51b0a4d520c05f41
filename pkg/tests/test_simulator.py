import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsbits.mu import mu_general_exact
from qsbits.simulator import (
    DEPTH_CAP_BITS,
    BitKey,
    DepthCapError,
    FixedPivots,
    Ordering,
    PivotStream,
    SelectStats,
    Substream,
    compare,
    comparison_probability,
    knuth_key_expectation,
    monte_carlo,
    pair_frequency_check,
    quickselect,
    ranks,
    run_trial,
    three_key_scenario,
    trial_keys,
)

K1, K2, K3 = (BitKey.from_bits(b) for b in (".01001100", ".00110101", ".00101010"))


def test_compare_examples():
    assert compare(K1, K3) == compare(BitKey.from_bits("01001100"), K3)
    out = compare(K1, K3)
    assert (out.ordering, out.bits_compared) == (Ordering.GREATER, 2)
    out = compare(K2, K3)
    assert (out.ordering, out.bits_compared) == (Ordering.GREATER, 4)


@settings(max_examples=200)
@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=0, max_value=10**6))
def test_compare_antisymmetric(seed, trial):
    a, b = trial_keys(seed, trial, 2)
    x, y = compare(a, b), compare(b, a)
    assert x.ordering == -y.ordering
    assert x.bits_compared == y.bits_compared
    # beta is the first index where the bits differ
    i = x.bits_compared
    assert a.bit(i) != b.bit(i)
    assert all(a.bit(k) == b.bit(k) for k in range(1, i))


def test_compare_crosses_word_boundary():
    prefix = "1" * 64
    a = BitKey.from_bits(prefix + "0")
    b = BitKey.from_bits(prefix + "1")
    out = compare(a, b)
    assert out.ordering is Ordering.LESS and out.bits_compared == 65


def test_depth_cap():
    a = BitKey.from_bits("1")
    b = BitKey.from_bits("1")
    with pytest.raises(DepthCapError):
        compare(a, b)
    with pytest.raises(ValueError):
        compare(a, a)
    with pytest.raises(ValueError):
        BitKey.from_bits("1" * (DEPTH_CAP_BITS + 1))


def test_bits_fixed_once_generated():
    key = trial_keys(3, 9, 1)[0]
    first = [key.bit(i) for i in range(1, 65)]
    key.bit(300)  # forces extension
    assert key.materialized_bits >= 300
    assert [key.bit(i) for i in range(1, 65)] == first
    again = trial_keys(3, 9, 1)[0]
    assert [again.bit(i) for i in range(1, 301)] == [key.bit(i) for i in range(1, 301)]


def test_substream_is_pure():
    a, b = Substream(1, 2, 3), Substream(1, 2, 3)
    assert [a.word(i) for i in range(20)] == [b.word(i) for i in reversed(range(20))][::-1]
    assert Substream(1, 2, 4).word(0) != a.word(0)
    with pytest.raises(ValueError):
        Substream(-1, 0, 0)


def test_pivot_stream_uniform():
    ps = PivotStream(Substream(0, 0, 1))
    counts = [0] * 5
    for _ in range(50_000):
        counts[ps.below(5)] += 1
    for c in counts:
        assert abs(c - 10_000) < 5 * math.sqrt(10_000 * 0.8)


def test_three_key_scenario():
    r = three_key_scenario()
    assert (r.bit_cost, r.key_cost, r.selected) == (6, 2, 2)


def test_singleton_and_pair():
    r = quickselect([K1], 1, FixedPivots([]))
    assert (r.bit_cost, r.key_cost, r.selected) == (0, 0, 0)
    for p in (0, 1):
        r = quickselect([K1, K3], 1, FixedPivots([p]))
        assert r.key_cost == 1 and r.selected == 1


def test_rank_validation():
    with pytest.raises(ValueError):
        quickselect([K1, K2], 3, FixedPivots([0]))
    with pytest.raises(ValueError):
        monte_carlo(0, 3, 10)
    with pytest.raises(ValueError):
        monte_carlo(1, 3, 0)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=1, max_value=12).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(min_value=1, max_value=n), st.integers(min_value=0, max_value=10**9))))
def test_selects_correct_key_and_costs_add_up(args):
    n, m, trial = args
    keys, res = run_trial(m, n, seed=11, trial=trial, log=True)
    assert ranks(keys)[res.selected] == m
    assert res.key_cost == len(res.comparisons)
    assert res.bit_cost == sum(b for _, _, b in res.comparisons)
    assert all(compare(keys[o], keys[p]).bits_compared == b for p, o, b in res.comparisons)


def test_right_recursion_rank():
    # keys in increasing order; pivot the smallest first, then seek rank m-1 on the right
    keys = [BitKey.from_bits(format(v, "08b")) for v in (10, 20, 30, 40)]
    r = quickselect(keys, 3, FixedPivots([0, 0, 0]))
    assert r.selected == 2


def test_stats_merge_and_json():
    s = monte_carlo(2, 5, 3000, seed=5)
    a = monte_carlo(2, 5, 3000, seed=5, workers=3)
    assert s == a
    d = s.to_dict()
    assert set(d) == {"m", "n", "trials", "seed", "bit_mean", "bit_stderr", "key_mean", "key_stderr"}
    assert json.loads(json.dumps(d)) == d
    assert d["bit_stderr"] > 0
    empty = SelectStats(1, 2, 0)
    with pytest.raises(ValueError):
        empty.bit_mean
    with pytest.raises(ValueError):
        s.merge(SelectStats(1, 5, 5))


def test_seed_changes_results():
    assert monte_carlo(1, 4, 500, seed=1).bit_sum != monte_carlo(1, 4, 500, seed=2).bit_sum


def test_comparison_probability_cases():
    assert comparison_probability(2, 3, 1) == Fraction(2, 3)
    assert comparison_probability(1, 3, 2) == Fraction(2, 3)
    assert comparison_probability(1, 2, 4) == Fraction(2, 4)
    with pytest.raises(ValueError):
        comparison_probability(3, 3, 1)


def test_comparison_probabilities_sum_to_key_expectation():
    # expected key comparisons = sum of pair probabilities
    for n in range(1, 12):
        for m in range(1, n + 1):
            total = sum(comparison_probability(i, j, m) for i in range(1, n + 1) for j in range(i + 1, n + 1))
            assert total == knuth_key_expectation(m, n)


def test_knuth_small():
    assert knuth_key_expectation(1, 2) == 1
    assert knuth_key_expectation(1, 1) == 0


@pytest.mark.slow
@pytest.mark.parametrize("m,n", [(1, 2), (1, 8), (4, 8)])
def test_monte_carlo_means(m, n):
    s = monte_carlo(m, n, 100_000, seed=0)
    exact = float(mu_general_exact(m, n).value)
    assert abs(s.bit_mean - exact) <= 4 * s.bit_stderr
    key = float(knuth_key_expectation(m, n))
    if s.key_stderr == 0:
        assert s.key_mean == key
    else:
        assert abs(s.key_mean - key) <= 4 * s.key_stderr


@pytest.mark.slow
def test_pair_frequencies():
    res = pair_frequency_check(2, 5, 100_000, seed=0)
    assert len(res) == 10
    assert all(abs(p.z) <= 5 for p in res)


def test_pair_check_preconditions():
    with pytest.raises(ValueError):
        pair_frequency_check(1, 13, 10_000)
    with pytest.raises(ValueError):
        pair_frequency_check(1, 5, 100)
