import cmath
import csv
import io
from math import gcd

import numpy as np
import pytest

from collision_transform.characters import (build_character_table, char_parity, char_value,
                                            cyclic_decomposition, dump_character_table)
from collision_transform.residue_ring import SizeError, build_units_group

GRID = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (6, 1), (7, 1), (10, 1), (12, 1), (10, 2)]


def test_mod9_against_generator_enumeration():
    # (Z/9)^x is cyclic of order 6 generated by 2; chi_j(2^k) = exp(2 pi i j k / 6)
    T = build_character_table(build_units_group(3, 1))
    assert T.decomposition.generators == (2,) and T.decomposition.orders == (6,)
    for j in range(6):
        for k in range(6):
            a = pow(2, k, 9)
            assert abs(char_value(T, j, a) - cmath.exp(2j * cmath.pi * j * k / 6)) < 1e-12
    assert sorted(T.parity.tolist()) == [-1, -1, -1, 1, 1, 1]
    # exponent 3 at 8 = 2^3
    assert abs(char_value(T, 3, 8) - (-1)) < 1e-12


@pytest.mark.parametrize("b,ell", GRID)
def test_decomposition(b, ell):
    G = build_units_group(b, ell)
    dec = cyclic_decomposition(G)
    assert int(np.prod(dec.orders)) == G.phi
    m = G.modulus
    for a, e in zip(G.units.tolist(), dec.dlog.tolist()):
        x = 1
        for g, k in zip(dec.generators, e):
            x = x * pow(g, k, m) % m
        assert x == a


@pytest.mark.parametrize("b,ell", GRID)
def test_table_is_the_full_dual_group(b, ell):
    """phi distinct homomorphisms into the unit circle: the whole character group."""
    G = build_units_group(b, ell)
    T = build_character_table(G)
    m, phi = G.modulus, G.phi
    assert T.count == phi
    V = T.values
    assert np.allclose(np.abs(V), 1, atol=1e-12)
    prod = G.units[:, None] * G.units[None, :] % m
    idx = G.index_lookup()[prod]
    for i in range(phi):
        assert np.abs(V[i][:, None] * V[i][None, :] - V[i][idx]).max() < 1e-12
    gram = V @ V.conj().T / phi
    assert np.abs(gram - np.eye(phi)).max() < 1e-12
    rows = V.T @ V.conj()
    assert np.abs(rows - phi * np.eye(phi)).max() < 1e-9
    nontriv = np.abs(V[1:].sum(axis=1))
    assert nontriv.max() < 1e-9 if phi > 1 else True
    assert (T.values[0] == 1).all() and T.parity[0] == 1
    assert (T.parity == -1).sum() == phi // 2


@pytest.mark.parametrize("b,ell", [(3, 1), (10, 1), (12, 1), (2, 3)])
def test_parity_and_products(b, ell):
    T = build_character_table(build_units_group(b, ell))
    for i in range(T.count):
        assert char_parity(T, i) == T.parity[i]
        j = T.conjugate_index(i)
        assert np.abs(T.values[j] - T.values[i].conj()).max() < 1e-12
    rng = np.random.default_rng(0)
    for _ in range(50):
        i, j = rng.integers(0, T.count, 2)
        k = T.product_index(i, j)
        assert T.parity[i] * T.parity[j] == T.parity[k]
        assert np.abs(T.values[i] * T.values[j] - T.values[k]).max() < 1e-12


def test_char_value_conventions():
    T = build_character_table(build_units_group(3, 1))
    assert char_value(T, 0, 7) == 1
    assert all(char_value(T, i, 3) == 0 for i in range(6))
    assert char_value(T, 1, 7 + 9 * 5) == char_value(T, 1, 7)
    for i in range(6):
        for a in range(1, 40):
            for c in range(1, 40):
                assert abs(char_value(T, i, a * c) - char_value(T, i, a) * char_value(T, i, c)) < 1e-12
    T4 = build_character_table(build_units_group(2, 1))
    assert char_parity(T4, 0) == 1 and char_parity(T4, 1) == -1


def test_mod100_odd_count():
    T = build_character_table(build_units_group(10, 1))
    assert T.count == 40 and len(T.odd_indices) == 20


def test_size_bound():
    with pytest.raises(SizeError):
        build_character_table(build_units_group(10, 2), max_phi=100)


def test_csv_dump_round_trip():
    T = build_character_table(build_units_group(3, 1))
    text = dump_character_table(T)
    rows = list(csv.reader(io.StringIO(text.split("\n", 1)[1])))
    assert rows[0][:3] == ["index", "exponents", "parity"]
    assert len(rows) == 1 + 6
    for r in rows[1:]:
        i = int(r[0])
        assert int(r[2]) == T.parity[i]
        vals = [complex(float(r[3 + 2 * k]), float(r[4 + 2 * k])) for k in range(6)]
        assert np.abs(np.array(vals) - T.values[i]).max() < 1e-11
