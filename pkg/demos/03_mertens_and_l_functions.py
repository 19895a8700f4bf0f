"""
Mertens sums in progressions and log L - H = P
==============================================

The prime sums of 1/p in each class mod m each grow like log log x / phi(m); any
nontrivial character weighting cancels that growth. Above s = 1 the prime character
sum is log L(s, chi) minus the prime-power part H(s, chi).
"""

import math

from collision_transform import harmonic
from collision_transform.characters import build_character_table
from collision_transform.primes import PrimeStream, geometric_bounds, mertens_progression, progression_sums
from collision_transform.residue_ring import build_units_group

xs = geometric_bounds(1000, 10**7)
ser = mertens_progression(xs, 4, 1)
for (_, x, v), (_, _, d) in zip(ser.raw.checkpoints[-4:], ser.detrended.checkpoints[-4:]):
    print(f"x={x:>9}: sum 1/p over p = 1 mod 4 = {v:.6f}, minus loglog(x)/2 = {d:.6f}")

# %%
T = build_character_table(build_units_group(10, 1))
ps = progression_sums(xs, 100)
for chi in (1, 7, 21):
    s = ps.character_series(T.residue_values([chi])[0])
    print(f"chi_{chi}: oscillation first 3 checkpoints {s.oscillation(3, first=True):.2e}, "
          f"last 3 {s.oscillation(3):.2e}")

# %%
T4 = build_character_table(build_units_group(2, 1))
stream = PrimeStream(0, upper=10**7)
for s in (1.2, 1.5, 2.0):
    L = harmonic.log_l_dirichlet(s, T4, 1)
    P = harmonic.prime_char_sum(s, T4, 1, stream).final
    H = harmonic.h_tail(s, T4, [1], stream)[0].final
    print(f"s={s}: L={L.value.real:.12f} (N={L.N}, tail bound {L.tail_bound:.1e}) "
          f"|log L - H - P| = {abs(L.log - H - P):.2e}")
print("Catalan's constant check:", harmonic.log_l_dirichlet(2.0, T4, 1).value.real)
