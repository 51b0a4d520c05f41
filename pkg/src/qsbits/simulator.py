"""Monte Carlo Quickselect on lazily generated bit-stream keys.

A key is an infinite fair-coin bit string, i.e. a uniform real in (0, 1).
Bits are produced 64 at a time from a keyed BLAKE2b counter construction,
so every word is a pure function of (seed, trial, stream, index) and trials
can run in any order or on any worker without changing the results.

Comparing two keys costs beta bit comparisons, where beta is the index of
the first differing bit; a partition step compares every other key in the
subfile with the pivot exactly once.
"""

from __future__ import annotations

import enum
import hashlib
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Iterable, Protocol, Sequence

from .exact import harmonic

WORD_BITS = 64
DEPTH_CAP_BITS = 4096
_MAX_WORDS = DEPTH_CAP_BITS // WORD_BITS
_MASK = (1 << WORD_BITS) - 1
_BLOCK_WORDS = 8
_PERSON = b"qsbits-keys"

# stream ids inside one trial
STREAM_LEAD = 0  # first word of every key, key index = word index
STREAM_PIVOT = 1
STREAM_KEY_BASE = 2  # key i continues on stream 2 + i


class DepthCapError(RuntimeError):
    """Two keys agreed on DEPTH_CAP_BITS bits; almost surely a stream collision."""


class Substream:
    """Words of one (seed, trial, stream) triple, generated in cached blocks."""

    __slots__ = ("_key", "_prefix", "_blocks")

    def __init__(self, seed: int, trial: int, stream: int):
        self._key = _seed_bytes(seed)
        self._prefix = struct.pack("<QQ", trial, stream)
        self._blocks: dict[int, tuple[int, ...]] = {}

    def word(self, index: int) -> int:
        b, off = divmod(index, _BLOCK_WORDS)
        block = self._blocks.get(b)
        if block is None:
            digest = hashlib.blake2b(
                self._prefix + struct.pack("<Q", b),
                digest_size=8 * _BLOCK_WORDS,
                key=self._key,
                person=_PERSON,
            ).digest()
            block = struct.unpack("<8Q", digest)
            self._blocks[b] = block
        return block[off]


def _seed_bytes(seed: int) -> bytes:
    if not 0 <= seed <= _MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed.to_bytes(8, "little")


class PivotSource(Protocol):
    def below(self, bound: int) -> int: ...


class PivotStream:
    """Uniform integers in [0, bound) from a substream (Lemire's method, unbiased)."""

    def __init__(self, stream: Substream):
        self._stream = stream
        self._next = 0

    def _draw(self) -> int:
        w = self._stream.word(self._next)
        self._next += 1
        return w

    def below(self, bound: int) -> int:
        if bound < 1:
            raise ValueError("bound must be positive")
        prod = self._draw() * bound
        low = prod & _MASK
        if low < bound:
            threshold = ((1 << WORD_BITS) - bound) % bound
            while low < threshold:
                prod = self._draw() * bound
                low = prod & _MASK
        return prod >> WORD_BITS


class FixedPivots:
    """Pivot positions taken from a list, for scripted scenarios."""

    def __init__(self, positions: Iterable[int]):
        self._positions = list(positions)
        self._i = 0

    def below(self, bound: int) -> int:
        if self._i >= len(self._positions):
            raise IndexError("scripted pivot sequence exhausted")
        p = self._positions[self._i]
        self._i += 1
        if not 0 <= p < bound:
            raise ValueError(f"scripted pivot {p} outside subfile of size {bound}")
        return p


class BitKey:
    """A uniform (0,1) key as a lazily extended bit string.

    Bits are stored in 64-bit words, most significant bit first; bit 1 is the
    first bit after the binary point.  Words are never rewritten once made.
    """

    __slots__ = ("_words", "_source")

    def __init__(self, words: Sequence[int] = (), source: Callable[[int], int] | None = None):
        self._words = [int(w) & _MASK for w in words]
        self._source = source

    @classmethod
    def from_bits(cls, bits: str) -> "BitKey":
        """Key with the given leading bits ("01001100" or ".01001100") and zeros after."""
        bits = bits.lstrip(".")
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        if len(bits) > DEPTH_CAP_BITS:
            raise ValueError("bit string longer than the depth cap")
        pad = -len(bits) % WORD_BITS
        padded = bits + "0" * pad
        words = [int(padded[i : i + WORD_BITS], 2) for i in range(0, len(padded), WORD_BITS)]
        return cls(words)

    @classmethod
    def random(cls, seed: int, trial: int, index: int, lead: Substream | None = None) -> "BitKey":
        """Key ``index`` of a trial; ``lead`` shares first words across keys of the trial."""
        if lead is None:
            lead = Substream(seed, trial, STREAM_LEAD)
        tail: list[Substream] = []

        def source(w: int) -> int:
            if not tail:
                tail.append(Substream(seed, trial, STREAM_KEY_BASE + index))
            return tail[0].word(w - 1)

        return cls((lead.word(index),), source)

    def word(self, w: int) -> int:
        words = self._words
        while len(words) <= w:
            if len(words) >= _MAX_WORDS:
                raise DepthCapError(f"key extended past {DEPTH_CAP_BITS} bits")
            words.append(self._source(len(words)) & _MASK if self._source else 0)
        return words[w]

    def bit(self, i: int) -> int:
        """Bit i, counting from 1."""
        if i < 1:
            raise IndexError(i)
        w, off = divmod(i - 1, WORD_BITS)
        return (self.word(w) >> (WORD_BITS - 1 - off)) & 1

    @property
    def materialized_bits(self) -> int:
        return WORD_BITS * len(self._words)

    def to_float(self) -> float:
        return self.word(0) / 2.0**WORD_BITS

    def __repr__(self) -> str:
        head = format(self._words[0], "064b")[:16] if self._words else ""
        return f"BitKey(.{head}...)"


class Ordering(enum.IntEnum):
    LESS = -1
    GREATER = 1


@dataclass(frozen=True)
class CompareOutcome:
    ordering: Ordering
    bits_compared: int


def compare(a: BitKey, b: BitKey) -> CompareOutcome:
    """Order of a relative to b and the index of the first differing bit."""
    if a is b:
        raise ValueError("cannot compare a key with itself")
    for w in range(_MAX_WORDS):
        xa = a.word(w)
        xb = b.word(w)
        if xa != xb:
            beta = WORD_BITS * w + (WORD_BITS - (xa ^ xb).bit_length()) + 1
            return CompareOutcome(Ordering.LESS if xa < xb else Ordering.GREATER, beta)
    raise DepthCapError(f"keys agree on the first {DEPTH_CAP_BITS} bits")


@dataclass
class SelectResult:
    selected: int  # index into the input list
    bit_cost: int
    key_cost: int
    comparisons: list[tuple[int, int, int]] | None = None  # (pivot, other, beta)


def quickselect(
    keys: Sequence[BitKey], m: int, pivot_rng: PivotSource, log: bool = False
) -> SelectResult:
    """Find the rank-m key (1-based) by randomized Quickselect.

    Each round picks a pivot uniformly from the current subfile and compares
    every other key of the subfile with it once.  With pivot rank k, the
    search stops if m == k, continues left if m < k and continues right for
    rank m - k otherwise.
    """
    n = len(keys)
    if not 1 <= m <= n:
        raise ValueError(f"rank m={m} outside 1..{n}")
    sub = list(range(n))
    bit_cost = 0
    key_cost = 0
    comps: list[tuple[int, int, int]] | None = [] if log else None
    while True:
        if len(sub) == 1:
            return SelectResult(sub[0], bit_cost, key_cost, comps)
        p = sub[pivot_rng.below(len(sub))]
        pivot = keys[p]
        left: list[int] = []
        right: list[int] = []
        for i in sub:
            if i == p:
                continue
            out = compare(keys[i], pivot)
            bit_cost += out.bits_compared
            key_cost += 1
            if comps is not None:
                comps.append((p, i, out.bits_compared))
            (left if out.ordering is Ordering.LESS else right).append(i)
        k = len(left) + 1
        if m == k:
            return SelectResult(p, bit_cost, key_cost, comps)
        if m < k:
            sub = left
        else:
            sub = right
            m -= k


def ranks(keys: Sequence[BitKey]) -> list[int]:
    """1-based rank of each key (by full bit comparison)."""
    order = sorted(range(len(keys)), key=cmp_to_key(lambda i, j: compare(keys[i], keys[j]).ordering))
    r = [0] * len(keys)
    for pos, i in enumerate(order):
        r[i] = pos + 1
    return r


def trial_keys(seed: int, trial: int, n: int) -> list[BitKey]:
    lead = Substream(seed, trial, STREAM_LEAD)
    return [BitKey.random(seed, trial, i, lead) for i in range(n)]


def run_trial(m: int, n: int, seed: int, trial: int, log: bool = False) -> tuple[list[BitKey], SelectResult]:
    keys = trial_keys(seed, trial, n)
    pivots = PivotStream(Substream(seed, trial, STREAM_PIVOT))
    return keys, quickselect(keys, m, pivots, log=log)


# -- statistics ----------------------------------------------------------------


@dataclass
class SelectStats:
    """Integer sufficient statistics; merging is exact and order-independent."""

    m: int
    n: int
    seed: int
    trials: int = 0
    bit_sum: int = 0
    bit_sumsq: int = 0
    key_sum: int = 0
    key_sumsq: int = 0
    pair_counts: dict[tuple[int, int], int] | None = None

    def add(self, bit_cost: int, key_cost: int) -> None:
        self.trials += 1
        self.bit_sum += bit_cost
        self.bit_sumsq += bit_cost * bit_cost
        self.key_sum += key_cost
        self.key_sumsq += key_cost * key_cost

    def merge(self, other: "SelectStats") -> "SelectStats":
        if (self.m, self.n, self.seed) != (other.m, other.n, other.seed):
            raise ValueError("cannot merge statistics of different experiments")
        pairs = None
        if self.pair_counts is not None or other.pair_counts is not None:
            pairs = dict(self.pair_counts or {})
            for key, c in (other.pair_counts or {}).items():
                pairs[key] = pairs.get(key, 0) + c
        return SelectStats(
            self.m,
            self.n,
            self.seed,
            self.trials + other.trials,
            self.bit_sum + other.bit_sum,
            self.bit_sumsq + other.bit_sumsq,
            self.key_sum + other.key_sum,
            self.key_sumsq + other.key_sumsq,
            pairs,
        )

    def _require_trials(self) -> None:
        if self.trials <= 0:
            raise ValueError("no trials recorded")

    def _mean(self, s: int) -> float:
        self._require_trials()
        return s / self.trials

    def _stderr(self, s: int, sq: int) -> float:
        self._require_trials()
        t = self.trials
        if t < 2:
            return math.inf
        # sample variance from integer sums, exact up to the final division
        var = Fraction(t * sq - s * s, t * (t - 1))
        return math.sqrt(var / t)

    @property
    def bit_mean(self) -> float:
        return self._mean(self.bit_sum)

    @property
    def bit_stderr(self) -> float:
        return self._stderr(self.bit_sum, self.bit_sumsq)

    @property
    def key_mean(self) -> float:
        return self._mean(self.key_sum)

    @property
    def key_stderr(self) -> float:
        return self._stderr(self.key_sum, self.key_sumsq)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "bit_mean": self.bit_mean,
            "bit_stderr": self.bit_stderr,
            "key_mean": self.key_mean,
            "key_stderr": self.key_stderr,
        }


def _run_chunk(args: tuple[int, int, int, int, int, bool]) -> SelectStats:
    m, n, seed, start, stop, track_pairs = args
    stats = SelectStats(m, n, seed, pair_counts={} if track_pairs else None)
    for t in range(start, stop):
        keys, res = run_trial(m, n, seed, t, log=track_pairs)
        stats.add(res.bit_cost, res.key_cost)
        if track_pairs:
            r = ranks(keys)
            pc = stats.pair_counts
            for a, b, _ in res.comparisons:
                ra, rb = r[a], r[b]
                key = (ra, rb) if ra < rb else (rb, ra)
                pc[key] = pc.get(key, 0) + 1
    return stats


def _chunks(trials: int, parts: int) -> list[tuple[int, int]]:
    step, extra = divmod(trials, parts)
    out = []
    start = 0
    for i in range(parts):
        stop = start + step + (1 if i < extra else 0)
        if stop > start:
            out.append((start, stop))
        start = stop
    return out


def monte_carlo(
    m: int, n: int, trials: int, seed: int = 0, workers: int = 1, track_pairs: bool = False
) -> SelectStats:
    """Run ``trials`` independent selections; identical output for any ``workers``."""
    if not 1 <= m <= n:
        raise ValueError(f"rank m={m} outside 1..{n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _seed_bytes(seed)
    workers = max(1, int(workers))
    jobs = [(m, n, seed, a, b, track_pairs) for a, b in _chunks(trials, workers)]
    if workers == 1 or len(jobs) == 1:
        parts = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    total = SelectStats(m, n, seed, pair_counts={} if track_pairs else None)
    for p in parts:
        total = total.merge(p)
    return total


# -- oracles -------------------------------------------------------------------


def comparison_probability(i: int, j: int, m: int) -> Fraction:
    """Probability that the keys of ranks i < j are ever compared when seeking rank m."""
    if not i < j:
        raise ValueError("need i < j")
    if m <= i:
        return Fraction(2, j - m + 1)
    if m < j:
        return Fraction(2, j - i + 1)
    return Fraction(2, m - i + 1)


def knuth_key_expectation(m: int, n: int) -> Fraction:
    """Expected key comparisons: 2[n+3+(n+1)H_n-(m+2)H_m-(n+3-m)H_{n+1-m}]."""
    if not 1 <= m <= n:
        raise ValueError(f"rank m={m} outside 1..{n}")
    h = lambda k: harmonic(k).h1  # noqa: E731
    return 2 * (n + 3 + (n + 1) * h(n) - (m + 2) * h(m) - (n + 3 - m) * h(n + 1 - m))


@dataclass(frozen=True)
class PairFrequency:
    i: int
    j: int
    empirical: float
    theoretical: Fraction
    stderr: float

    @property
    def z(self) -> float:
        diff = self.empirical - float(self.theoretical)
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.stderr


def pair_frequency_check(
    m: int, n: int, trials: int = 100_000, seed: int = 0, workers: int = 1
) -> list[PairFrequency]:
    """Empirical vs exact comparison frequency for every rank pair (i < j)."""
    if n > 12:
        raise ValueError("pair check limited to n <= 12")
    if trials < 10_000:
        raise ValueError("pair check needs at least 10^4 trials")
    stats = monte_carlo(m, n, trials, seed, workers, track_pairs=True)
    out = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            p = comparison_probability(i, j, m)
            emp = stats.pair_counts.get((i, j), 0) / trials
            se = math.sqrt(float(p * (1 - p)) / trials)
            out.append(PairFrequency(i, j, emp, p, se))
    return out


EXAMPLE_KEYS = (".01001100", ".00110101", ".00101010")


def three_key_scenario() -> SelectResult:
    """Three fixed keys, pivot forced to the third, seeking the minimum."""
    keys = [BitKey.from_bits(b) for b in EXAMPLE_KEYS]
    return quickselect(keys, 1, FixedPivots([2]), log=True)
