"""
Mod-3 structure and the base sum
================================

For 3 not dividing m, reflection fixes one class mod 3 and swaps the other two.
Removing the mod-3 projection mu3 from F° brings in a principal-character term;
the base sum aggregates lag-1 invariants across bases with weights 1/b^2.
"""

from collision_transform import mod3
from collision_transform.characters import build_character_table
from collision_transform.invariant import center, synth_invariant
from collision_transform.primes import PrimeStream
from collision_transform.residue_ring import build_units_group
from collision_transform.transform import forward_transform

G = build_units_group(10, 1)
S = synth_invariant(G, seed=3)
rep = mod3.neutrality_report(G, S)
print(f"m={G.modulus}: neutral class {rep.neutral}, mean {rep.neutral_mean}; "
      f"classes {rep.swapped} sum to {rep.swapped_sum}")
print("m=9:", "not applicable" if not mod3.neutrality_report(build_units_group(3, 1),
      synth_invariant(build_units_group(3, 1), 1)).applicable else "applicable")

# %%
Sc = center(G, S)
mm = mod3.mod3_means(G, Sc)
pt = mod3.principal_terms(forward_transform(build_character_table(G), Sc), mm)
print(f"c0 = {mm.c0}, c1 = {mm.c1}")
print(f"principal coefficients: F° {abs(pt.f_circ):.1e}, M {pt.mertens_projection}, F°° {pt.f_double_circ}")

stream = PrimeStream(G.modulus, count=100_000)
for s in (1.0, 0.7, 0.5):
    x = mod3.f_double_circ(s, Sc, mm, stream)
    print(f"s={s}: F° {x.F_circ.final:+.4f}  M {x.M.final:+.4f}  F°° {x.F_double_circ.final:+.4f}  "
          f"identity residual {x.identity_residual():.1e}")

# %%
bases = mod3.default_bases()
inv = {b: center(build_units_group(b, 1), synth_invariant(build_units_group(b, 1), b)) for b in bases}
t = mod3.base_sum(bases, mod3.default_weights(bases), inv, PrimeStream(31 * 31, count=50_000), 0.5)
vals = [t.per_base[b].final for b in bases]
print(f"per-base F°(0.5) from {min(vals):+.3f} to {max(vals):+.3f}; "
      f"F_R(0.5) = {t.F_R.final:+.4f} (weighted total {t.weighted_total().final:+.4f})")
