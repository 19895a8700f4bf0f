import math

import mpmath
import numpy as np
import pytest
import sympy

from collision_transform.primes import (DomainError, PrimeStream, accumulate, chebyshev_theta,
                                        geometric_bounds, geometric_counts, mertens_progression,
                                        prime_stream, progression_sums, simple_sieve)

from conftest import table


def trial_division_primes(n):
    out = []
    for k in range(2, n):
        if all(k % p for p in out if p * p <= k):
            out.append(k)
    return out


def test_small_streams():
    assert prime_stream(0, 5).primes().tolist() == [2, 3, 5, 7, 11]
    assert prime_stream(100, 3).primes().tolist() == [101, 103, 107]
    with pytest.raises(ValueError):
        prime_stream(0, 0)


def test_sieve_matches_trial_division():
    ref = trial_division_primes(10**5)
    assert simple_sieve(10**5 - 1).tolist() == ref
    # tiny segments exercise every block boundary
    assert PrimeStream(0, upper=10**5 - 1, segment_odds=997).primes().tolist() == ref


def test_paper_budget_stream():
    p = prime_stream(100, 348_488).primes()
    assert len(p) == 348_488 and p[0] == 101
    assert (np.diff(p) > 0).all()
    assert p[-1] == sympy.prime(25 + 348_488)
    assert sympy.primepi(int(p[-1])) - sympy.primepi(100) == 348_488
    assert p[-1] == 4_999_999
    assert prime_stream(100, 348_488).primes()[-1] == p[-1]


def test_stream_starting_inside_segment():
    p = PrimeStream(10**6, count=1000, segment_odds=1 << 10).primes()
    ref = list(sympy.primerange(10**6 + 1, int(p[-1]) + 1))
    assert p.tolist() == ref


def test_residue_cache_sample():
    p = prime_stream(100, 10**5).primes()
    rng = np.random.default_rng(1)
    idx = rng.choice(len(p), size=len(p) // 100, replace=False)
    cached = p % 100
    assert all(int(p[i]) % 100 == cached[i] for i in idx)
    assert math.gcd(int(np.gcd.reduce(p[:50])), 100) == 1


def test_accumulate_checkpoints():
    stream = PrimeStream(0, count=1000)
    (s,) = accumulate(stream, lambda p: 1.0 / p)
    assert [c[0] for c in s.checkpoints] == geometric_counts(1000)
    ref = sum(1.0 / q for q in sympy.primerange(2, sympy.prime(1000) + 1))
    assert abs(s.final - ref) < 1e-12
    assert s.checkpoints[2] == (4, 7, pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7))
    (e,) = accumulate(PrimeStream(10, count=0), lambda p: 1.0 / p)
    assert e.final == 0
    (b,) = accumulate(PrimeStream(0, upper=1000), lambda p: 1.0 / p, bounds=[10, 100, 1000])
    assert [c[0] for c in b.checkpoints] == [4, 25, 168]


def test_theta_mod4():
    T = table(2)
    chi0 = T.residue_values([0])[0]
    chi1 = T.residue_values([1])[0]
    full = PrimeStream(0, count=10)
    # p = 2 is not a unit mod 4
    assert abs(chebyshev_theta(10, chi0, full) - math.log(105)) < 1e-12
    assert abs(chebyshev_theta(10, chi1, full) - (-math.log(3) + math.log(5) - math.log(7))) < 1e-12


def test_theta_million():
    T = table(2)
    chi = T.residue_values([1])[0]
    X = 10**6
    theta = chebyshev_theta(X, chi, PrimeStream(0, upper=X))
    ref = sum((1 if q % 4 == 1 else -1) * math.log(q) for q in sympy.primerange(3, X + 1))
    assert abs(theta - ref) < 1e-6
    ratio = abs(theta) / (math.sqrt(X) * math.log(X) ** 2)
    assert ratio < 1.0


def test_mertens_mod4():
    xs = geometric_bounds(1000, 10**6)
    ser = mertens_progression(xs, 4, 1)
    assert ser.stabilizing
    # M(4,1) = (B1 - 1/2 + log(pi/4) - H(1, chi4)) / 2 with H the prime-power part
    H = 0.0
    for q in sympy.primerange(3, 10**6):
        z = (1 if q % 4 == 1 else -1) / q
        H += -math.log1p(-z) - z
    M41 = (float(mpmath.mertens) - 0.5 + math.log(math.pi / 4) - H) / 2
    assert abs(ser.constant_estimate - M41) < 2e-3
    with pytest.raises(DomainError):
        mertens_progression(xs, 4, 2)


def test_progression_sums_brute():
    ps = progression_sums([100, 1000], 9)
    for a in (1, 2, 4, 8):
        ref = sum(1 / q for q in sympy.primerange(2, 1001) if q % 9 == a)
        assert abs(ps.series(a).final - ref) < 1e-13


@pytest.mark.parametrize("b", [2, 3, 10])
def test_character_weighted_cancellation(b):
    T = table(b)
    ps = progression_sums(geometric_bounds(1000, 10**6), b * b)
    for chi in range(1, T.count):
        ser = ps.character_series(T.residue_values([chi])[0])
        assert ser.oscillation(3) < ser.oscillation(3, first=True)
    # the principal character keeps its log log x growth
    trivial = ps.character_series(T.residue_values([0])[0])
    assert trivial.oscillation(3) > 0.1 * trivial.oscillation(3, first=True)
