"""Prime streaming and the low-level prime-indexed sums.

All sums go through :func:`accumulate`, which walks the stream block by block and
reduces each block (split at checkpoint positions) in a fixed order, so a sum's value
depends only on the stream and the checkpoints, never on who computed it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Callable, Iterator, Sequence

import numpy as np

from .residue_ring import SizeError

#: Default number of odd integers per sieve segment.
SEGMENT_ODDS = 2**18
#: Default prime budget for scans.
DEFAULT_PRIME_COUNT = 348_488
#: Upper bound on any sieved integer.
MAX_SIEVE = 2 * 10**9


def simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if is_p[p]:
            is_p[p * p :: 2 * p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def segmented_primes(lo: int, segment_odds: int = SEGMENT_ODDS) -> Iterator[np.ndarray]:
    """Yield the primes >= lo, one array per segment, forever."""
    base = simple_sieve(1 << 12)
    if lo <= 2:
        yield np.array([2], dtype=np.int64)
        lo = 3
    lo |= 1  # odd start
    span = 2 * segment_odds
    while True:
        hi = lo + span  # exclusive
        if hi > MAX_SIEVE:
            raise SizeError(f"sieve bound {MAX_SIEVE} exceeded")
        r = isqrt(hi - 1)
        if base[-1] < r:
            base = simple_sieve(max(2 * r, 1 << 12))
        mask = np.ones(segment_odds, dtype=bool)
        for p in base[1:]:
            p = int(p)
            if p > r:
                break
            start = max(p * p, -(-lo // p) * p)
            if start % 2 == 0:
                start += p
            if start < hi:
                mask[(start - lo) // 2 :: p] = False
        seg = lo + 2 * np.flatnonzero(mask).astype(np.int64)
        if lo == 1:
            seg = seg[1:]  # 1 is not prime
        yield seg
        lo = hi


@dataclass(frozen=True)
class PrimeStream:
    """Primes p > lower_exclusive, either the first ``count`` of them or those <= ``upper``."""

    lower_exclusive: int = 0
    count: int | None = None
    upper: int | None = None
    segment_odds: int = SEGMENT_ODDS

    def __post_init__(self):
        if (self.count is None) == (self.upper is None):
            raise ValueError("give exactly one of count or upper")
        if self.count is not None and self.count < 0:
            raise ValueError("count must be >= 0")

    def blocks(self) -> Iterator[np.ndarray]:
        if self.count == 0 or (self.upper is not None and self.upper <= self.lower_exclusive):
            return
        remaining = self.count
        for seg in segmented_primes(self.lower_exclusive + 1, self.segment_odds):
            if self.upper is not None:
                if seg.size and seg[-1] > self.upper:
                    seg = seg[: np.searchsorted(seg, self.upper, side="right")]
                    if seg.size:
                        yield seg
                    return
                if seg.size:
                    yield seg
            else:
                if seg.size >= remaining:
                    yield seg[:remaining]
                    return
                if seg.size:
                    yield seg
                remaining -= seg.size

    def primes(self) -> np.ndarray:
        parts = list(self.blocks())
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def prime_stream(lower_exclusive: int, count: int, segment_odds: int = SEGMENT_ODDS) -> PrimeStream:
    if count < 1:
        raise ValueError("count must be >= 1")
    return PrimeStream(lower_exclusive, count=count, segment_odds=segment_odds)


@dataclass
class SumSeries:
    checkpoints: list[tuple[int, int, complex]] = field(default_factory=list)

    @property
    def final(self):
        return self.checkpoints[-1][2] if self.checkpoints else 0.0

    @property
    def values(self) -> np.ndarray:
        return np.array([c[2] for c in self.checkpoints])

    def oscillation(self, k: int = 3, first: bool = False) -> float:
        """Largest pairwise distance among the last (or first) k checkpoint values."""
        v = self.values
        v = v[:k] if first else v[-k:]
        if len(v) < 2:
            return 0.0
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def map(self, fn: Callable) -> "SumSeries":
        return SumSeries([(n, x, fn(x, v)) for n, x, v in self.checkpoints])


def geometric_counts(total: int, start: int = 1) -> list[int]:
    out = []
    c = start
    while c < total:
        out.append(c)
        c *= 2
    out.append(total)
    return out


def geometric_bounds(start: int, stop: int) -> list[int]:
    out = []
    x = start
    while x < stop:
        out.append(x)
        x *= 2
    out.append(stop)
    return out


def accumulate(stream: PrimeStream, term_fn: Callable[[np.ndarray], np.ndarray],
               counts: Sequence[int] | None = None,
               bounds: Sequence[int] | None = None) -> list[SumSeries]:
    """Checkpointed sums of term_fn(p) over the stream.

    term_fn maps a prime block of length n to an array of shape (n,) or (n, k); the
    result is one SumSeries per column. Checkpoints are at prime counts (default: every
    doubling) or at upper bounds x, never both.
    """
    if counts is not None and bounds is not None:
        raise ValueError("checkpoints are either counts or bounds")
    if bounds is not None:
        marks = sorted(set(int(x) for x in bounds))
    elif counts is not None:
        marks = sorted(set(int(c) for c in counts))
    else:
        marks = [1 << k for k in range(63)]

    total = None
    width = None
    used = 0
    last_p = stream.lower_exclusive
    rows: list[tuple[int, int, np.ndarray]] = []
    mi = 0

    def record(n, x):
        rows.append((n, x, total.copy()))

    for block in stream.blocks():
        terms = np.asarray(term_fn(block))
        if terms.ndim == 1:
            terms = terms[:, None]
        if total is None:
            width = terms.shape[1]
            total = np.zeros(width, dtype=terms.dtype)
        elif terms.dtype != total.dtype:
            total = total.astype(np.result_type(total, terms))
        pos = 0
        n = len(block)
        while mi < len(marks):
            if bounds is not None:
                cut = int(np.searchsorted(block, marks[mi], side="right"))
            else:
                cut = marks[mi] - used
            if cut > n or (bounds is not None and cut == n and block[-1] < marks[mi]):
                break
            total += terms[pos:cut].sum(axis=0)
            pos = cut
            x = marks[mi] if bounds is not None else int(block[cut - 1]) if cut else last_p
            record(used + cut, x)
            mi += 1
        total += terms[pos:].sum(axis=0)
        used += n
        last_p = int(block[-1])

    if total is None:
        width = width or 1
        total = np.zeros(1)
    if bounds is not None:
        while mi < len(marks):
            record(used, marks[mi])
            mi += 1
    elif not rows or rows[-1][0] != used:
        record(used, last_p)
    ncol = total.shape[0]
    return [SumSeries([(n, x, t[j].item()) for n, x, t in rows]) for j in range(ncol)]


def chebyshev_theta(X: int, chi_residues: np.ndarray, stream: PrimeStream) -> complex:
    """sum over the stream's primes p <= X of chi(p) log p.

    ``chi_residues`` gives chi at every residue mod m (zero at non-units). When the stream
    starts above some bound y the result is theta(X, chi) - theta(y, chi).
    """
    m = len(chi_residues)
    capped = PrimeStream(stream.lower_exclusive, upper=X, segment_odds=stream.segment_odds)
    if stream.upper is not None:
        capped = PrimeStream(stream.lower_exclusive, upper=min(X, stream.upper),
                             segment_odds=stream.segment_odds)
    (series,) = accumulate(capped, lambda p: chi_residues[p % m] * np.log(p))
    return complex(series.final)


class DomainError(ValueError):
    pass


@dataclass
class ProgressionSums:
    """sum_{p <= x, p = r mod m} 1/p for every residue r and every checkpoint x."""

    modulus: int
    bounds: list[int]
    sums: np.ndarray  # (len(bounds), m)

    @property
    def phi(self) -> int:
        return sum(1 for r in range(self.modulus) if gcd(r, self.modulus) == 1)

    def series(self, a: int) -> SumSeries:
        if gcd(a, self.modulus) != 1:
            raise DomainError(f"{a} is not coprime to {self.modulus}")
        col = self.sums[:, a % self.modulus]
        return SumSeries([(0, x, float(v)) for x, v in zip(self.bounds, col)])

    def detrended(self, a: int) -> SumSeries:
        phi = self.phi
        return self.series(a).map(lambda x, v: v - math.log(math.log(x)) / phi)

    def character_series(self, chi_residues: np.ndarray) -> SumSeries:
        """sum_a chi(a) * series_a, i.e. sum_{p <= x} chi(p)/p."""
        vals = self.sums @ chi_residues
        return SumSeries([(0, x, complex(v)) for x, v in zip(self.bounds, vals)])


def progression_sums(x_checkpoints: Sequence[int], m: int) -> ProgressionSums:
    bounds = sorted(set(int(x) for x in x_checkpoints))
    if bounds[0] < 3:
        raise ValueError("checkpoints must be >= 3 (log log x must be defined)")
    total = np.zeros(m)
    rows = []
    mi = 0
    for block in PrimeStream(0, upper=bounds[-1]).blocks():
        pos = 0
        while mi < len(bounds):
            cut = int(np.searchsorted(block, bounds[mi], side="right"))
            if cut == len(block) and block[-1] < bounds[mi]:
                break
            piece = block[pos:cut]
            total += np.bincount(piece % m, weights=1.0 / piece, minlength=m)
            pos = cut
            rows.append(total.copy())
            mi += 1
        piece = block[pos:]
        total += np.bincount(piece % m, weights=1.0 / piece, minlength=m)
    while mi < len(bounds):
        rows.append(total.copy())
        mi += 1
    return ProgressionSums(m, bounds, np.array(rows))


@dataclass
class ProgressionSeries:
    raw: SumSeries
    detrended: SumSeries

    @property
    def constant_estimate(self) -> float:
        """Detrended limit estimate (the progression's Mertens constant)."""
        return float(self.detrended.final)

    @property
    def stabilizing(self) -> bool:
        return self.detrended.oscillation(3) < self.detrended.oscillation(3, first=True)


def mertens_progression(x_checkpoints: Sequence[int], m: int, a: int) -> ProgressionSeries:
    if gcd(a, m) != 1:
        raise DomainError(f"{a} is not coprime to {m}")
    ps = progression_sums(x_checkpoints, m)
    return ProgressionSeries(ps.series(a), ps.detrended(a))
