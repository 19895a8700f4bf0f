"""Dirichlet characters modulo m, built from a cyclic decomposition of (Z/mZ)^x.

Every value chi(a) is stored as an integer exponent j with chi(a) = exp(2 pi i j / L),
L the exponent of the group, so values come out of a single root-of-unity table.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from math import gcd, lcm
from pathlib import Path

import numpy as np

from .residue_ring import SizeError, UnitsGroup

#: Largest phi(m) for which a full value table is built (phi^2 complex entries).
MAX_PHI = 4096


class ConsistencyError(ArithmeticError):
    """An internal numerical check exceeded its tolerance."""


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def primitive_root_prime_power(p: int, k: int) -> int:
    """Smallest primitive root mod p, lifted to p^k (odd p)."""
    q = p - 1
    qs = [r for r, _ in factorize(q)]
    g = next(g for g in range(2, p) if all(pow(g, q // r, p) != 1 for r in qs))
    if k >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True, eq=False)
class CyclicDecomposition:
    generators: tuple[int, ...]  # units mod m
    orders: tuple[int, ...]
    dlog: np.ndarray  # (phi, ncomp) exponent tuple of each unit, in unit-list order

    @property
    def exponent(self) -> int:
        return lcm(*self.orders) if self.orders else 1


def cyclic_decomposition(G: UnitsGroup) -> CyclicDecomposition:
    m = G.modulus
    units = G.units
    gens: list[int] = []
    orders: list[int] = []
    cols: list[np.ndarray] = []

    def lift(g: int, q: int) -> int:
        # unit mod m that is g mod q and 1 mod m/q
        r = m // q
        if r == 1:
            return g % m
        t = ((g - 1) * pow(r, -1, q)) % q
        return (1 + r * t) % m

    for p, k in factorize(m):
        q = p**k
        res = units % q
        if p == 2:
            if k == 1:
                continue
            gens.append(lift(q - 1, q))
            orders.append(2)
            neg = (res % 4) == 3
            cols.append(neg.astype(np.int64))
            if k >= 3:
                o = q // 4
                log5 = np.zeros(q, dtype=np.int64)
                x = 1
                for j in range(o):
                    log5[x] = j
                    x = x * 5 % q
                gens.append(lift(5, q))
                orders.append(o)
                cols.append(log5[np.where(neg, q - res, res)])
        else:
            g = primitive_root_prime_power(p, k)
            o = q // p * (p - 1)
            table = np.zeros(q, dtype=np.int64)
            x = 1
            for j in range(o):
                table[x] = j
                x = x * g % q
            gens.append(lift(g, q))
            orders.append(o)
            cols.append(table[res])

    dlog = np.stack(cols, axis=1) if cols else np.zeros((G.phi, 0), dtype=np.int64)
    return CyclicDecomposition(tuple(gens), tuple(orders), dlog)


@dataclass(frozen=True, eq=False)
class CharacterTable:
    group: UnitsGroup
    decomposition: CyclicDecomposition
    exponents: np.ndarray  # (phi, ncomp), lexicographic order
    value_exponents: np.ndarray = field(repr=False)  # (nchar, phi) ints mod L
    values: np.ndarray = field(repr=False)  # (nchar, phi) complex
    parity: np.ndarray  # (nchar,) +1 / -1
    trivial_index: int = 0

    @property
    def count(self) -> int:
        return len(self.exponents)

    @property
    def odd_indices(self) -> np.ndarray:
        return np.flatnonzero(self.parity == -1)

    @property
    def even_indices(self) -> np.ndarray:
        return np.flatnonzero(self.parity == 1)

    def index_of_exponents(self, e) -> int:
        idx = 0
        for ek, o in zip(e, self.decomposition.orders):
            idx = idx * o + (int(ek) % o)
        return idx

    def conjugate_index(self, chi: int) -> int:
        return self.index_of_exponents(-self.exponents[chi])

    def product_index(self, chi1: int, chi2: int) -> int:
        return self.index_of_exponents(self.exponents[chi1] + self.exponents[chi2])

    def residue_values(self, chars=None) -> np.ndarray:
        """Values indexed by residue mod m (zero at non-units), shape (len(chars), m)."""
        rows = self.values if chars is None else self.values[np.asarray(chars)]
        out = np.zeros((rows.shape[0], self.group.modulus), dtype=complex)
        out[:, self.group.units] = rows
        return out


def build_character_table(G: UnitsGroup, max_phi: int = MAX_PHI) -> CharacterTable:
    if G.phi > max_phi:
        raise SizeError(f"phi({G.modulus}) = {G.phi} exceeds character-table bound {max_phi}")
    dec = cyclic_decomposition(G)
    L = dec.exponent
    exps = np.array(
        list(itertools.product(*(range(o) for o in dec.orders))), dtype=np.int64
    ).reshape(-1, len(dec.orders))
    K = np.zeros((len(exps), G.phi), dtype=np.int64)
    for k, o in enumerate(dec.orders):
        scaled = exps[:, k] * (L // o)
        K = (K + np.outer(scaled, dec.dlog[:, k])) % L
    roots = np.exp(2j * np.pi * np.arange(L) / L)
    values = roots[K]
    # the last unit is m - 1
    at_minus_one = K[:, -1]
    if not np.all((at_minus_one == 0) | (2 * at_minus_one == L)):
        raise ConsistencyError("character value at -1 is not +-1")
    parity = np.where(at_minus_one == 0, 1, -1).astype(np.int64)
    return CharacterTable(G, dec, exps, K, values, parity, 0)


def char_value(T: CharacterTable, chi: int, n: int) -> complex:
    m = T.group.modulus
    r = n % m
    if gcd(r, m) != 1:
        return 0j
    return complex(T.values[chi, T.group.unit_index[r]])


def char_parity(T: CharacterTable, chi: int, tol: float = 1e-9) -> int:
    v = char_value(T, chi, T.group.modulus - 1)
    sign = 1 if v.real > 0 else -1
    if abs(v - sign) >= tol:
        raise ConsistencyError(f"chi_{chi}(-1) = {v} is not a sign within {tol}")
    return sign


def dump_character_table(T: CharacterTable, path=None) -> str:
    """CSV: index, exponents (';'-joined), parity, then re/im columns per unit."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    G = T.group
    buf.write(f"# characters b={G.base} ell={G.ell} m={G.modulus} phi={G.phi} "
              f"generators={';'.join(map(str, T.decomposition.generators))} "
              f"orders={';'.join(map(str, T.decomposition.orders))}\n")
    header = ["index", "exponents", "parity"]
    for a in G.units:
        header += [f"re_{a}", f"im_{a}"]
    w.writerow(header)
    for i in range(T.count):
        row = [i, ";".join(map(str, T.exponents[i])), int(T.parity[i])]
        for v in T.values[i]:
            row += [f"{v.real:.12g}", f"{v.imag:.12g}"]
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
