from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collision_transform.invariant import (CENTERED, InvariantFormatError, ReflectionViolation,
                                           center, class_means, dump_invariant, from_fractions,
                                           load_invariant, synth_invariant)
from collision_transform.residue_ring import build_units_group

SMALL_GRID = [(b, ell) for b in (2, 3, 4, 5, 6, 7, 10, 12) for ell in (1, 2)]


def _write(tmp_path, text, name="S.tsv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_well_formed(tmp_path):
    G = build_units_group(3, 1)
    p = _write(tmp_path, "# collision-invariant b=3 ell=1 m=9\n"
                         "1\t0\n2\t1/2\n4\t-0.25\n5\t-3/4\n7\t-3/2\n8\t-1\n")
    S = load_invariant(G, p)
    assert S.provenance.startswith("ingested")
    assert S.exact[1] == Fraction(1, 2) and S.value_at(4) == -0.25


def test_load_missing_unit(tmp_path):
    G = build_units_group(3, 1)
    p = _write(tmp_path, "# collision-invariant b=3 ell=1 m=9\n1\t0\n2\t0\n4\t-1\n5\t-1\n8\t-1\n")
    with pytest.raises(InvariantFormatError, match="missing unit 7"):
        load_invariant(G, p)


def test_load_reflection_violation(tmp_path):
    G = build_units_group(3, 1)
    p = _write(tmp_path, "# collision-invariant b=3 ell=1 m=9\n"
                         "1\t0\n2\t0\n4\t0\n5\t-1\n7\t-1\n8\t0\n")
    with pytest.raises(ReflectionViolation, match="a=1") as e:
        load_invariant(G, p)
    assert e.value.unit == 1


@pytest.mark.parametrize("text,match", [
    ("# collision-invariant b=3 ell=2 m=27\n", "header declares"),
    ("1\t0\n", "header"),
    ("# collision-invariant b=3 ell=1 m=9\n1\t0\n1\t0\n", "duplicate unit 1"),
    ("# collision-invariant b=3 ell=1 m=9\n3\t0\n", "not a unit"),
    ("# collision-invariant b=3 ell=1 m=9\n1\tabc\n", "unparseable"),
])
def test_load_format_errors(tmp_path, text, match):
    with pytest.raises(InvariantFormatError, match=match):
        load_invariant(build_units_group(3, 1), _write(tmp_path, text))


def test_decimal_tolerance(tmp_path):
    G = build_units_group(3, 1)
    p = _write(tmp_path, "# collision-invariant b=3 ell=1 m=9\n"
                         "1\t0.3333333333\n8\t-1.3333333333\n2\t0\n7\t-1\n4\t0\n5\t-0.9999999999999\n")
    load_invariant(G, p)


def test_synth_examples():
    G = build_units_group(3, 1)
    S = synth_invariant(G, 1)
    assert len(S.values) == 6
    assert [S.exact[i] + S.exact[5 - i] for i in range(3)] == [-1, -1, -1]
    assert synth_invariant(G, 1).exact == S.exact
    G100 = build_units_group(10, 1)
    S100 = synth_invariant(G100, 7)
    assert sum(S100.exact) / 40 == Fraction(-1, 2)
    assert all(2 * v in range(-6, 5) for v in S.exact)


def test_class_means_examples():
    G = build_units_group(3, 1)
    cm = class_means(G, synth_invariant(G, 1))
    assert cm.counts == (3, 3, 0)
    assert cm.means[0] + cm.means[1] == -1
    const = from_fractions(G, [Fraction(-1, 2)] * 6)
    assert class_means(G, const).means[:2] == (Fraction(-1, 2), Fraction(-1, 2))


def test_class_means_mod100_brute_force():
    G = build_units_group(10, 1)
    S = synth_invariant(G, 7)
    buckets = {}
    for a, v in zip(G.units.tolist(), S.exact):
        buckets.setdefault((a - 1) % 10, []).append(v)
    cm = class_means(G, S)
    # units mod 100 end in 1, 3, 7, 9 so only classes 0, 2, 6, 8 are populated
    assert sorted(buckets) == [0, 2, 6, 8]
    assert cm.empty_classes == [1, 3, 4, 5, 7, 9]
    for r, vs in buckets.items():
        assert cm.means[r] == sum(vs) / len(vs)
        assert cm.means[r] + cm.means[(8 - r) % 10] == -1


def test_center_examples():
    G = build_units_group(3, 1)
    const = from_fractions(G, [Fraction(-1, 2)] * 6)
    assert all(v == 0 for v in center(G, const).exact)
    Sc = center(G, synth_invariant(G, 1))
    assert Sc.kind == CENTERED
    assert Sc.exact[G.index_of(2)] == -Sc.exact[G.index_of(7)]
    assert sum(Sc.exact) == 0


def test_center_float_path_matches_exact():
    G = build_units_group(10, 1)
    S = synth_invariant(G, 3)
    Sf = type(S)(G, S.values.copy(), S.kind, S.provenance, None)
    assert np.abs(center(G, Sf).values - center(G, S).values).max() < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SMALL_GRID), st.integers(0, 2**32))
def test_identities_exact(bl, seed):
    G = build_units_group(*bl)
    S = synth_invariant(G, seed)
    n = G.phi
    assert all(S.exact[i] + S.exact[n - 1 - i] == -1 for i in range(n))
    assert sum(S.exact) / n == Fraction(-1, 2)
    cm = class_means(G, S)
    assert all(d == 0 for d in cm.pair_defects().values())
    Sc = center(G, S)
    assert all(Sc.exact[i] + Sc.exact[n - 1 - i] == 0 for i in range(n))
    classes = G.spectral_classes().tolist()
    for r in set(classes):
        assert sum(v for v, c in zip(Sc.exact, classes) if c == r) == 0


@pytest.mark.parametrize("bl", [(3, 1), (10, 1), (7, 2)])
def test_dump_load_round_trip(tmp_path, bl):
    G = build_units_group(*bl)
    S = synth_invariant(G, 11)
    p = tmp_path / "S.tsv"
    dump_invariant(S, p)
    back = load_invariant(G, p)
    assert back.exact == S.exact
    assert back.values.tobytes() == S.values.tobytes()
    assert dump_invariant(back) == p.read_text()


def test_float_only_table_round_trip(tmp_path):
    G = build_units_group(3, 1)
    vals = np.array([0.1, 1 / 3, -0.7, -0.3, -4 / 3, -1.1])
    S = type(synth_invariant(G, 0))(G, vals)
    p = tmp_path / "S.tsv"
    dump_invariant(S, p)
    assert load_invariant(G, p).values.tobytes() == vals.tobytes()
