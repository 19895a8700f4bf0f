"""Prime character sums and the centered prime harmonic sum.

Every prime-indexed sum here runs over primes p > m (the stream's lower bound), so
gcd(p, m) = 1 and the character values at primes are all roots of unity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .characters import CharacterTable, ConsistencyError
from .invariant import CENTERED, InvariantTable
from .primes import PrimeStream, SumSeries, accumulate
from .transform import TransformCoefficients

DECOMPOSITION_TOL = 1e-9
L_TAIL_TOL = 1e-8
H_REL_TOL = 1e-15


def _chars(chars) -> np.ndarray:
    return np.atleast_1d(np.asarray(chars, dtype=np.int64))


def prime_char_sums(s: float, T: CharacterTable, chars, stream: PrimeStream,
                    counts=None, bounds=None) -> list[SumSeries]:
    """Checkpointed P(s, chi) = sum_p chi(p) p^-s for each character in ``chars``."""
    if s <= 0:
        raise ValueError("s must be positive")
    table = T.residue_values(_chars(chars))
    m = T.group.modulus

    def terms(p):
        w = np.exp(-s * np.log(p))
        return table[:, p % m].T * w[:, None]

    return accumulate(stream, terms, counts=counts, bounds=bounds)


def prime_char_sum(s: float, T: CharacterTable, chi: int, stream: PrimeStream,
                   counts=None, bounds=None) -> SumSeries:
    return prime_char_sums(s, T, [chi], stream, counts, bounds)[0]


def f_circ_direct(s: float, Scirc: InvariantTable, stream: PrimeStream,
                  counts=None, bounds=None) -> SumSeries:
    """sum_p S°(p mod m) p^-s by table lookup."""
    if Scirc.kind != CENTERED:
        raise ValueError("f_circ_direct needs a centered invariant")
    G = Scirc.group
    m = G.modulus
    lut = Scirc.residue_lookup()
    idx = G.index_lookup()

    def terms(p):
        r = p % m
        assert (idx[r] >= 0).all(), "prime sharing a factor with m in the stream"
        return lut[r] * np.exp(-s * np.log(p))

    (series,) = accumulate(stream, terms, counts=counts, bounds=bounds)
    return series


def decomposition_terms(C: TransformCoefficients, P_values) -> dict[int, complex]:
    """coeff(chi) * P(s, chi) over exactly the odd characters."""
    T = C.table
    out = {}
    for i in T.odd_indices:
        i = int(i)
        out[i] = complex(C.coeffs[i]) * complex(P_values[i])
    return out


def f_circ_decomposed(s: float, C: TransformCoefficients, P_values,
                      tol: float = DECOMPOSITION_TOL) -> float:
    if C.source_kind != CENTERED:
        raise ValueError("decomposition needs centered coefficients")
    total = sum(decomposition_terms(C, P_values).values(), 0j)
    if abs(total.imag) >= tol:
        raise ConsistencyError(f"decomposed F°({s}) has imaginary part {total.imag:.3e}")
    return total.real


@dataclass
class SignStructure:
    s: float
    positive: int
    negative: int
    zero: int
    pearson: float | None  # None when undefined


def pearson(x, y) -> float | None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        return None
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    # constant up to rounding counts as constant
    if sx <= 1e-12 * max(1.0, float(np.abs(x).max())) * len(x) or \
       sy <= 1e-12 * max(1.0, float(np.abs(y).max())) * len(y):
        return None
    return float(dx @ dy) / (sx * sy)


def sign_structure(s: float, C: TransformCoefficients, P_values, zero_tol: float = 1e-12) -> SignStructure:
    odd = C.table.odd_indices
    coeffs = C.coeffs[odd]
    P = np.array([complex(P_values[int(i)]) for i in odd])
    re = (coeffs * P).real
    pos = int(np.sum(re > zero_tol))
    neg = int(np.sum(re < -zero_tol))
    return SignStructure(s, pos, neg, len(re) - pos - neg, pearson(np.abs(coeffs), np.abs(P)))


@dataclass
class LValue:
    s: float
    value: complex
    log: complex
    N: int
    partial: complex
    tail_bound: float


def _dirichlet_partial(chi_res: np.ndarray, s: float, N: int, chunk: int = 1 << 20) -> complex:
    m = len(chi_res)
    total = 0j
    for lo in range(1, N + 1, chunk):
        n = np.arange(lo, min(lo + chunk, N + 1), dtype=np.int64)
        total += complex(np.sum(chi_res[n % m] * np.exp(-s * np.log(n))))
    return total


def log_l_dirichlet(s: float, T: CharacterTable, chi: int, N: int | None = None,
                    tol: float = L_TAIL_TOL, max_N: int = 1 << 27) -> LValue:
    """L(s, chi) from a partial sum plus a summation-by-parts tail correction.

    With A(n) = sum_{k<=n} chi(k) (periodic, mean mu) and A2 the partial sums of A - mu
    (also periodic), the tail beyond N is (mu - A(N)) f(N+1) plus a remainder bounded
    by (|A2(N)| + max|A2|) (f(N+1) - f(N+2)), f(t) = t^-s.
    """
    if s <= 1:
        raise ValueError("log_l_dirichlet needs s > 1")
    if chi == T.trivial_index:
        raise ValueError("L(s, chi0) is not handled here")
    m = T.group.modulus
    chi_res = T.residue_values([chi])[0]
    # A(j) = sum_{k=1}^{j} chi(k) for j in [0, m); A(m) = 0 for nontrivial chi
    A = np.concatenate([[0j], np.cumsum(chi_res[1:])])
    mu = A.mean()
    # A2(j) = sum_{k=1}^{j} (A(k) - mu), periodic because A - mu has zero mean
    A2 = np.cumsum(A - mu) - (A[0] - mu)
    B2 = float(np.max(np.abs(A2)))

    def tail(N):
        f1 = (N + 1.0) ** -s
        df = f1 - (N + 2.0) ** -s
        corr = (mu - A[N % m]) * f1
        return corr, (abs(A2[N % m]) + B2) * df

    if N is None:
        N = m * max(1, -(-1024 // m))
        while tail(N)[1] >= tol:
            N *= 2
            if N > max_N:
                raise ValueError(f"tail bound {tol} not reached by N={max_N}")
    corr, bound = tail(N)
    if bound >= tol:
        raise ValueError(f"tail bound {bound:.3e} >= {tol} at N={N}; use a larger N")
    partial = _dirichlet_partial(chi_res, s, N)
    value = partial + corr
    return LValue(s, complex(value), complex(np.log(value)), N, partial, float(bound))


def h_tail(s: float, T: CharacterTable, chars, stream: PrimeStream,
           counts=None, bounds=None, rel_tol: float = H_REL_TOL) -> list[SumSeries]:
    """sum_p sum_{k>=2} chi(p)^k / (k p^ks), the prime-power part of log L."""
    if s <= 0.5:
        raise ValueError("H(s, chi) needs s > 1/2")
    table = T.residue_values(_chars(chars))
    m = T.group.modulus

    def terms(p):
        z = table[:, p % m].T * np.exp(-s * np.log(p))[:, None]
        az = np.abs(z)
        live = az > 0
        acc = np.zeros_like(z)
        zk = z * z
        k = 2
        while True:
            acc += zk / k
            # geometric bound on everything after term k
            rest = az ** (k + 1) / ((k + 1) * (1 - az))
            if not np.any(live & (rest > rel_tol * np.abs(acc))):
                return acc
            zk = zk * z
            k += 1

    return accumulate(stream, terms, counts=counts, bounds=bounds)


@dataclass
class AbelCheck:
    s: float
    X: int
    lhs: complex
    discrete_rhs: complex
    residual: float
    integral_residuals: dict[int, float] = field(default_factory=dict)  # refinement -> residual


def abel_check(s: float, T: CharacterTable, chi: int, X: int,
               refinements: Sequence[int] = (0, 1, 2, 3)) -> AbelCheck:
    """Compare sum_{m<p<=X} chi(p) p^-s with its summation-by-parts form against
    theta(t, chi) = sum_{m<p<=t} chi(p) log p and f(t) = 1/(t^s log t)."""
    m = T.group.modulus
    p = PrimeStream(m, upper=X).primes()
    if len(p) == 0:
        return AbelCheck(s, X, 0j, 0j, 0.0, {r: 0.0 for r in refinements})
    chi_p = T.residue_values([chi])[0][p % m]
    logp = np.log(p)
    f = np.exp(-s * logp) / logp
    lhs = complex(np.sum(chi_p * np.exp(-s * logp)))
    theta = np.cumsum(chi_p * logp)
    fX = X**-s / math.log(X)
    f_next = np.append(f[1:], fX)
    # theta(X) f(X) + sum_i theta_i (f(p_i) - f(p_{i+1})), with p_{n+1} := X
    rhs = complex(theta[-1] * fX + np.sum(theta * (f - f_next)))

    def g(t):
        lt = np.log(t)
        return (s * lt + 1) / (t ** (s + 1) * lt * lt)

    lo = p.astype(float)
    hi = np.append(lo[1:], float(X))
    integral = {}
    for r in refinements:
        k = 1 << r
        t = lo[:, None] + (hi - lo)[:, None] * (np.arange(k + 1) / k)[None, :]
        gt = g(t)
        quad = (hi - lo) / k * (gt[:, 0] / 2 + gt[:, 1:-1].sum(axis=1) + gt[:, -1] / 2)
        approx = theta[-1] * fX + np.sum(theta * quad)
        integral[r] = abs(complex(approx) - lhs)
    return AbelCheck(s, X, lhs, rhs, abs(lhs - rhs), integral)


@dataclass
class HarmonicScan:
    s_grid: list[float]
    odd_chars: list[int]
    P_series: dict[float, list[SumSeries]]  # per s, one series per odd character
    F_direct: dict[float, SumSeries]
    F_decomposed: dict[float, float]
    sign_stats: dict[float, SignStructure]

    def P_values(self, s: float) -> dict[int, complex]:
        return {c: complex(ser.final) for c, ser in zip(self.odd_chars, self.P_series[s])}

    def max_decomposition_gap(self) -> float:
        return max(abs(self.F_direct[s].final - self.F_decomposed[s]) for s in self.s_grid)


def harmonic_scan(s_grid: Sequence[float], C: TransformCoefficients, Scirc: InvariantTable,
                  stream: PrimeStream, counts=None) -> HarmonicScan:
    T = C.table
    odd = [int(i) for i in T.odd_indices]
    P_series, F_direct, F_dec, stats = {}, {}, {}, {}
    for s in s_grid:
        series = prime_char_sums(s, T, odd, stream, counts=counts)
        P_series[s] = series
        Pv = {c: complex(ser.final) for c, ser in zip(odd, series)}
        F_direct[s] = f_circ_direct(s, Scirc, stream, counts=counts)
        F_dec[s] = f_circ_decomposed(s, C, Pv)
        stats[s] = sign_structure(s, C, Pv)
    return HarmonicScan(list(s_grid), odd, P_series, F_direct, F_dec, stats)
