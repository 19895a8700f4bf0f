"""Mod-3 structure of an invariant, its removal from F°, and the cross-base sum."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .invariant import CENTERED, RAW, InvariantTable
from .primes import PrimeStream, SumSeries, accumulate
from .residue_ring import UnitsGroup
from .transform import TransformCoefficients

# the nontrivial character mod 3 on residues 0, 1, 2
CHI3 = (0, 1, -1)


class NotApplicable(ValueError):
    """The neutrality statement needs 3 not dividing m."""


def neutral_class(m: int) -> int:
    """The residue class mod 3 fixed by a -> m - a."""
    if m % 3 == 0:
        raise NotApplicable(f"m = {m} is divisible by 3; no class mod 3 is fixed by reflection")
    return 2 if m % 3 == 1 else 1


@dataclass(frozen=True)
class Mod3Means:
    modulus: int
    kind: str
    means: tuple  # mu3(0), mu3(1), mu3(2); None for an empty class
    counts: tuple[int, int, int]

    @property
    def visible(self) -> bool:
        """Both classes that primes > 3 can land in hold units."""
        return self.counts[1] > 0 and self.counts[2] > 0

    @property
    def c0(self):
        return (self.means[1] + self.means[2]) / 2 if self.visible else None

    @property
    def c1(self):
        return (self.means[1] - self.means[2]) / 2 if self.visible else None

    def at_prime_residues(self) -> np.ndarray:
        """mu3 as a float lookup on residues mod 3 (class 0 never hit by primes > 3)."""
        return np.array([0.0, float(self.means[1]), float(self.means[2])])


def mod3_means(G: UnitsGroup, S: InvariantTable) -> Mod3Means:
    cls = (G.units % 3).tolist()
    counts = [cls.count(k) for k in range(3)]
    if S.exact is not None:
        sums = [Fraction(0)] * 3
        for k, v in zip(cls, S.exact):
            sums[k] += v
    else:
        sums = [float(np.sum(S.values[np.asarray(cls) == k])) for k in range(3)]
    means = tuple(sums[k] / counts[k] if counts[k] else None for k in range(3))
    return Mod3Means(G.modulus, S.kind, means, tuple(counts))


@dataclass
class NeutralityReport:
    modulus: int
    neutral: int | None
    neutral_mean: object = None
    swapped: tuple[int, int] | None = None
    swapped_sum: object = None
    applicable: bool = True

    @property
    def vacuous(self) -> bool:
        """True when the neutral class holds no units (tiny moduli such as m = 4)."""
        return self.applicable and self.neutral_mean is None

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        ok_neutral = self.neutral_mean is None or self.neutral_mean == Fraction(-1, 2)
        ok_pair = self.swapped_sum is None or self.swapped_sum == -1
        return ok_neutral and ok_pair

    def residuals(self) -> tuple[float, float]:
        if not self.applicable:
            return 0.0, 0.0
        r1 = 0.0 if self.neutral_mean is None else abs(float(self.neutral_mean) + 0.5)
        r2 = 0.0 if self.swapped_sum is None else abs(float(self.swapped_sum) + 1)
        return r1, r2


def neutrality_report(G: UnitsGroup, S: InvariantTable) -> NeutralityReport:
    """Neutral-class mean and the swapped-pair sum for a raw invariant."""
    if S.kind != RAW:
        raise ValueError("neutrality is a statement about the raw invariant")
    m = G.modulus
    try:
        k = neutral_class(m)
    except NotApplicable:
        return NeutralityReport(m, None, applicable=False)
    means = mod3_means(G, S)
    j = next(j for j in range(3) if j != k)
    pair = (j, (m - j) % 3)
    a, b = means.means[pair[0]], means.means[pair[1]]
    return NeutralityReport(m, k, means.means[k], pair, None if a is None or b is None else a + b)


def mu3_character_coefficients(means: Mod3Means) -> dict[str, object]:
    """Fourier coefficients of mu3 over the characters mod 3, restricted to classes 1, 2."""
    if not means.visible:
        raise NotApplicable(f"m = {means.modulus}: a residue class mod 3 holds no units")
    mu = means.means
    principal = (mu[1] + mu[2]) / 2
    chi3 = (mu[1] * CHI3[1] + mu[2] * CHI3[2]) / 2
    return {"principal": principal, "chi3": chi3}


@dataclass
class PrincipalTerms:
    f_circ: complex  # principal coefficient of F°, zero for a centered invariant
    mertens_projection: object  # principal coefficient of M(s), equals c0
    f_double_circ: object  # principal coefficient of F°° = F° - M


def principal_terms(C: TransformCoefficients, means: Mod3Means) -> PrincipalTerms:
    if C.source_kind != CENTERED:
        raise ValueError("needs coefficients of the centered invariant")
    chi0 = C.coeffs[C.table.trivial_index]
    c = mu3_character_coefficients(means)["principal"]
    base = C.exact_trivial if C.exact_trivial is not None else complex(chi0)
    return PrincipalTerms(complex(chi0), c, base - c)


@dataclass
class Mod3Series:
    s: float
    F_circ: SumSeries
    M: SumSeries
    F_double_circ: SumSeries

    def identity_residual(self) -> float:
        """max over checkpoints of |F° - (F°° + M)|."""
        return max(abs(a[2] - b[2] - c[2]) for a, b, c in
                   zip(self.F_circ.checkpoints, self.F_double_circ.checkpoints, self.M.checkpoints))


def f_double_circ(s: float, Scirc: InvariantTable, means: Mod3Means, stream: PrimeStream,
                  counts=None) -> Mod3Series:
    """F°, M(s) = sum_p mu3(p)/p^s and F°° = sum_p (S°(p) - mu3(p))/p^s, each summed
    separately over the same primes."""
    if Scirc.kind != CENTERED:
        raise ValueError("needs a centered invariant")
    m = Scirc.group.modulus
    neutral_class(m)
    if means.kind != CENTERED or means.modulus != m:
        raise ValueError("mod-3 means must come from the same centered invariant")
    if not means.visible:
        raise NotApplicable(f"m = {m}: a residue class mod 3 holds no units")
    lut = Scirc.residue_lookup()
    mu = means.at_prime_residues()

    def terms(p):
        w = np.exp(-s * np.log(p))
        sc = lut[p % m]
        mp = mu[p % 3]
        return np.stack([sc * w, mp * w, (sc - mp) * w], axis=1)

    F, M, FF = accumulate(stream, terms, counts=counts)
    return Mod3Series(s, F, M, FF)


def default_bases(primes_only: bool = False) -> list[int]:
    bases = list(range(3, 32))
    if primes_only:
        bases = [b for b in bases if all(b % q for q in range(2, b))]
    return bases


def default_weights(bases: Sequence[int]) -> dict[int, float]:
    return {b: 1.0 / (b * b) for b in bases}


@dataclass
class BaseSumTable:
    s: float
    bases: list[int]
    weights: dict[int, float]
    F_R: SumSeries
    per_base: dict[int, SumSeries]
    primes: np.ndarray | None = field(default=None, repr=False)
    R: np.ndarray | None = field(default=None, repr=False)

    def weighted_total(self) -> SumSeries:
        """sum_b w(b) F°_b at every checkpoint, the second route to F_R."""
        rows = []
        for i, (n, x, _) in enumerate(self.F_R.checkpoints):
            v = sum(self.weights[b] * self.per_base[b].checkpoints[i][2] for b in self.bases)
            rows.append((n, x, v))
        return SumSeries(rows)

    def linearity_residual(self) -> float:
        return max(abs(a[2] - b[2]) for a, b in
                   zip(self.F_R.checkpoints, self.weighted_total().checkpoints))


def base_sum_values(primes: np.ndarray, bases, weights, invariants) -> np.ndarray:
    """R(p) = sum_b w(b) S°_1(p, b)."""
    R = np.zeros(len(primes))
    for b in bases:
        S = invariants[b]
        R += weights[b] * S.residue_lookup()[primes % S.group.modulus]
    return R


def base_sum(bases: Sequence[int], weights: Mapping[int, float],
             invariants: Mapping[int, InvariantTable], stream: PrimeStream, s: float,
             counts=None, keep_values: bool = False) -> BaseSumTable:
    bases = list(bases)
    for b in bases:
        if b not in invariants:
            raise KeyError(f"no centered invariant for base {b}")
        S = invariants[b]
        if S.kind != CENTERED or S.group.ell != 1 or S.group.base != b:
            raise ValueError(f"base {b}: need the centered lag-1 invariant")
    max_m = max(invariants[b].group.modulus for b in bases)
    if stream.lower_exclusive < max_m:
        raise ValueError(f"stream must start above max modulus {max_m}")
    luts = [(invariants[b].residue_lookup(), invariants[b].group.modulus) for b in bases]
    w = np.array([weights[b] for b in bases])

    def terms(p):
        ps = np.exp(-s * np.log(p))
        cols = np.stack([lut[p % m] for lut, m in luts], axis=1)
        R = cols @ w
        return np.concatenate([cols * ps[:, None], (R * ps)[:, None]], axis=1)

    series = accumulate(stream, terms, counts=counts)
    per_base = dict(zip(bases, series[:-1]))
    primes = R = None
    if keep_values:
        primes = stream.primes()
        R = base_sum_values(primes, bases, weights, invariants)
    return BaseSumTable(s, bases, dict(weights), series[-1], per_base, primes, R)
