"""
The collision transform on (Z/100Z)^x
=====================================

Build the unit group for base 10 at lag 1, synthesize an invariant obeying the
reflection identity S(a) + S(100 - a) = -1, and look at its expansion over the 40
Dirichlet characters mod 100.
"""

from collision_transform.characters import build_character_table
from collision_transform.invariant import center, class_means, synth_invariant
from collision_transform.residue_ring import build_units_group
from collision_transform.transform import antisymmetry_report, forward_transform, inverse_transform

G = build_units_group(10, 1)
T = build_character_table(G)
print(f"m = {G.modulus}, phi = {G.phi}, odd characters: {len(T.odd_indices)}")
print("cyclic components (generator, order):",
      list(zip(T.decomposition.generators, T.decomposition.orders)))

# %%
# A synthetic invariant. Values are exact fractions on a half-integer grid.
S = synth_invariant(G, seed=7)
print("S(1), S(99) =", S.exact[0], S.exact[-1])

# %%
# The trivial coefficient is the grand mean, and the pairing forces it to -1/2.
C = forward_transform(T, S)
print("coefficient at the trivial character:", C.exact_trivial, C[0])

# %%
# Spectral classes R = (a - 1) mod 10. Only R in {0, 2, 6, 8} hold units mod 100,
# and the paired classes R, 8 - R have means summing to -1.
cm = class_means(G, S)
for r in range(10):
    if cm.counts[r]:
        print(f"R={r}: {cm.counts[r]} units, mean {cm.means[r]}, "
              f"partner {(8 - r) % 10} mean {cm.means[(8 - r) % 10]}")

# %%
# Centering by class means makes S° antisymmetric, so every even coefficient is zero.
Sc = center(G, S)
rep = antisymmetry_report(forward_transform(T, Sc))
print(f"max |even coefficient| = {rep.even_max:.2e}")
print("largest odd coefficients:")
for i, c in rep.odd[:5]:
    print(f"  chi_{i} exponents {T.exponents[i].tolist()}: {c:.6f}")

# %%
# S° is recovered from the odd characters alone.
back = inverse_transform(T, forward_transform(T, Sc), chars=T.odd_indices)
print("reconstruction error:", abs(back.values - Sc.values).max())
