"""Invariant tables on units: ingestion, synthesis, spectral-class means, centering.

Values are carried as exact fractions wherever the source allows it, so that the
algebraic identities (reflection, class-mean pairing, antisymmetry) are checked
exactly. ``InvariantTable.values`` is the float view used by the numerical code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .residue_ring import UnitsGroup

RAW = "raw"
CENTERED = "centered"

REFLECTION_TOL = 1e-9

# synthetic values lie on the half-integer grid -3, -5/2, ..., 2
SYNTH_GRID = tuple(Fraction(k, 2) for k in range(-6, 5))

_HEADER = re.compile(r"#\s*collision-invariant\s+b=(\d+)\s+ell=(\d+)\s+m=(\d+)\s*$")


class InvariantFormatError(ValueError):
    pass


class ReflectionViolation(ValueError):
    def __init__(self, a: int, total):
        super().__init__(f"reflection identity S(a) + S(m-a) = -1 fails at a={a}: sum is {total}")
        self.unit = a


class EmptyClassError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class InvariantTable:
    group: UnitsGroup
    values: np.ndarray  # float, unit-list order
    kind: str = RAW
    provenance: str = "synthetic"
    exact: tuple[Fraction, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.values) != self.group.phi:
            raise ValueError("invariant length does not match group")

    def value_at(self, a: int) -> float:
        return float(self.values[self.group.index_of(a)])

    def residue_lookup(self) -> np.ndarray:
        """Value array indexed by residue mod m; zero at non-units."""
        out = np.zeros(self.group.modulus)
        out[self.group.units] = self.values
        return out


def from_fractions(G: UnitsGroup, vals, kind=RAW, provenance="synthetic") -> InvariantTable:
    vals = tuple(Fraction(v) for v in vals)
    return InvariantTable(G, np.array([float(v) for v in vals]), kind, provenance, vals)


def reflection_defect(S: InvariantTable):
    """Worst violation of the reflection identity, as (unit, deviation of the pair sum)."""
    target = -1 if S.kind == RAW else 0
    if S.exact is not None:
        n = S.group.phi
        worst = (None, Fraction(0))
        for i in range(n // 2):
            d = S.exact[i] + S.exact[n - 1 - i] - target
            if abs(d) > abs(worst[1]):
                worst = (int(S.group.units[i]), d)
        return worst
    d = S.values + S.values[::-1] - target
    i = int(np.argmax(np.abs(d)))
    return int(S.group.units[i]), float(d[i])


def synth_invariant(G: UnitsGroup, seed: int) -> InvariantTable:
    if G.modulus <= 2:
        raise ValueError("synthetic invariants need m > 2")
    rng = np.random.default_rng(seed)
    n = G.phi
    picks = rng.integers(0, len(SYNTH_GRID), size=n // 2)
    vals: list[Fraction] = [Fraction(0)] * n
    for i, k in enumerate(picks):
        v = SYNTH_GRID[k]
        vals[i] = v
        vals[n - 1 - i] = -1 - v
    return from_fractions(G, vals, RAW, f"synthetic(seed={seed})")


def _parse_value(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InvariantFormatError(f"unparseable value {text!r}") from None


def load_invariant(G: UnitsGroup, path) -> InvariantTable:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise InvariantFormatError(f"{path}: empty file")
    hm = _HEADER.match(lines[0].strip())
    if not hm:
        raise InvariantFormatError(f"{path}:1: missing '# collision-invariant b= ell= m=' header")
    b, ell, m = map(int, hm.groups())
    if (b, ell, m) != (G.base, G.ell, G.modulus):
        raise InvariantFormatError(
            f"{path}:1: header declares b={b} ell={ell} m={m}, "
            f"expected b={G.base} ell={G.ell} m={G.modulus}")

    seen: dict[int, Fraction] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InvariantFormatError(f"{path}:{lineno}: expected 'a<TAB>value'")
        try:
            a = int(parts[0])
        except ValueError:
            raise InvariantFormatError(f"{path}:{lineno}: bad unit {parts[0]!r}") from None
        if a not in G.unit_index:
            raise InvariantFormatError(f"{path}:{lineno}: {a} is not a unit modulo {m}")
        if a in seen:
            raise InvariantFormatError(f"{path}:{lineno}: duplicate unit {a}")
        seen[a] = _parse_value(parts[1])
    missing = [int(a) for a in G.units if int(a) not in seen]
    if missing:
        raise InvariantFormatError(f"{path}: missing unit {missing[0]} ({len(missing)} missing)")

    S = from_fractions(G, [seen[int(a)] for a in G.units], RAW, f"ingested({path})")
    a, d = reflection_defect(S)
    if a is not None and abs(d) > REFLECTION_TOL:
        raise ReflectionViolation(a, -1 + d)
    return S


def _format_value(S: InvariantTable, i: int) -> str:
    if S.exact is not None:
        v = S.exact[i]
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(S.values[i]))


def dump_invariant(S: InvariantTable, path=None) -> str:
    G = S.group
    rows = [f"# collision-invariant b={G.base} ell={G.ell} m={G.modulus}"]
    rows += [f"{a}\t{_format_value(S, i)}" for i, a in enumerate(G.units)]
    text = "\n".join(rows) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


@dataclass(frozen=True)
class SpectralClassMeans:
    base: int
    means: tuple  # per class R in [0, b); None where the class is empty
    counts: tuple[int, ...]

    @property
    def empty_classes(self) -> list[int]:
        return [r for r, c in enumerate(self.counts) if c == 0]

    def pair_defects(self):
        """mean_R + mean_{b-2-R} + 1 for every nonempty R."""
        b = self.base
        return {r: self.means[r] + self.means[(b - 2 - r) % b] + 1
                for r in range(b) if self.counts[r]}


def class_means(G: UnitsGroup, S: InvariantTable, allow_empty: bool = True) -> SpectralClassMeans:
    if S.kind != RAW:
        raise ValueError("class means are defined for raw invariants")
    b = G.base
    classes = G.spectral_classes()
    counts = np.bincount(classes, minlength=b)
    if not allow_empty and (counts == 0).any():
        raise EmptyClassError(f"empty spectral classes {np.flatnonzero(counts == 0).tolist()}")
    if S.exact is not None:
        sums = [Fraction(0)] * b
        for r, v in zip(classes.tolist(), S.exact):
            sums[r] += v
        means = tuple(sums[r] / int(counts[r]) if counts[r] else None for r in range(b))
    else:
        sums = np.bincount(classes, weights=S.values, minlength=b)
        means = tuple(float(sums[r] / counts[r]) if counts[r] else None for r in range(b))
    return SpectralClassMeans(b, means, tuple(int(c) for c in counts))


def center(G: UnitsGroup, S: InvariantTable) -> InvariantTable:
    cm = class_means(G, S)
    classes = G.spectral_classes().tolist()
    prov = S.provenance
    if S.exact is not None:
        vals = [v - cm.means[r] for v, r in zip(S.exact, classes)]
        return from_fractions(G, vals, CENTERED, prov)
    mean_arr = np.array([cm.means[r] for r in classes], dtype=float)
    return InvariantTable(G, S.values - mean_arr, CENTERED, prov, None)
