"""The unit group (Z/mZ)^x for m = b^(ell+1), with reflection and spectral classes."""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

#: Largest modulus accepted by :func:`build_units_group`.
MAX_MODULUS = 10**7


class SizeError(ValueError):
    """Raised when a requested object exceeds the configured size bound."""


class NotAUnitError(ValueError):
    """Raised when an operation needs a unit of the group and gets something else."""


@dataclass(frozen=True, eq=False)
class UnitsGroup:
    base: int
    ell: int
    modulus: int
    units: np.ndarray  # int64, ascending
    unit_index: dict[int, int] = field(repr=False)

    @property
    def phi(self) -> int:
        return len(self.units)

    def index_of(self, a: int) -> int:
        try:
            return self.unit_index[a % self.modulus]
        except KeyError:
            raise NotAUnitError(f"{a} is not a unit modulo {self.modulus}") from None

    def index_lookup(self) -> np.ndarray:
        """Array mapping residue r in [0, m) to its unit index, or -1 for non-units."""
        lut = np.full(self.modulus, -1, dtype=np.int64)
        lut[self.units] = np.arange(self.phi, dtype=np.int64)
        return lut

    def reflection_permutation(self) -> np.ndarray:
        """perm[i] is the index of m - units[i]; the ascending order makes it a reversal."""
        return np.arange(self.phi - 1, -1, -1, dtype=np.int64)

    def spectral_classes(self) -> np.ndarray:
        return (self.units - 1) % self.base


def build_units_group(b: int, ell: int, max_modulus: int = MAX_MODULUS) -> UnitsGroup:
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if ell < 1:
        raise ValueError(f"lag must be >= 1, got {ell}")
    m = b ** (ell + 1)
    if m > max_modulus or m >= 2**63:
        raise SizeError(f"modulus {b}^{ell + 1} = {m} exceeds bound {max_modulus}")

    # a unit mod b^(ell+1) is exactly an integer coprime to b
    rad = [p for p in range(2, b + 1) if b % p == 0 and all(p % q for q in range(2, p))]
    mask = np.ones(m, dtype=bool)
    mask[0] = False
    for p in rad:
        mask[::p] = False
    units = np.flatnonzero(mask).astype(np.int64)
    unit_index = {int(a): i for i, a in enumerate(units)}
    return UnitsGroup(b, ell, m, units, unit_index)


def reflect(G: UnitsGroup, a: int) -> int:
    if a not in G.unit_index:
        raise NotAUnitError(f"{a} is not a unit modulo {G.modulus}")
    return G.modulus - a


def spectral_class(G: UnitsGroup, a: int) -> int:
    if a not in G.unit_index:
        raise NotAUnitError(f"{a} is not a unit modulo {G.modulus}")
    return (a - 1) % G.base
