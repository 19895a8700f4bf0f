"""Forward and inverse collision transform, and the coefficient-structure reports."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .characters import CharacterTable, ConsistencyError
from .invariant import CENTERED, InvariantTable

THEOREM_TOL = 1e-12
IMAG_TOL = 1e-10


class GroupMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TransformCoefficients:
    table: CharacterTable
    coeffs: np.ndarray  # complex, character-table order
    source_kind: str
    # mean of S computed in rationals when the source carries exact values
    exact_trivial: Fraction | None = field(default=None, repr=False)

    def __getitem__(self, chi: int) -> complex:
        return complex(self.coeffs[chi])


def forward_transform(T: CharacterTable, S: InvariantTable) -> TransformCoefficients:
    """coeff(chi) = (1/phi) * sum_a S(a) conj(chi(a))."""
    if S.group is not T.group and S.group.modulus != T.group.modulus:
        raise GroupMismatch(f"invariant mod {S.group.modulus} vs characters mod {T.group.modulus}")
    phi = T.group.phi
    coeffs = (T.values.conj() @ S.values) / phi
    exact = sum(S.exact, Fraction(0)) / phi if S.exact is not None else None
    return TransformCoefficients(T, coeffs, S.kind, exact)


def inverse_transform(T: CharacterTable, C: TransformCoefficients, chars=None,
                      tol: float = IMAG_TOL) -> InvariantTable:
    """S(a) = sum_chi coeff(chi) chi(a), optionally restricted to a subset of characters."""
    if C.table is not T:
        raise GroupMismatch("coefficients were computed over a different character table")
    if chars is None:
        vals = C.coeffs @ T.values
    else:
        chars = np.asarray(chars)
        vals = C.coeffs[chars] @ T.values[chars]
    resid = float(np.max(np.abs(vals.imag))) if len(vals) else 0.0
    if resid >= tol:
        raise ConsistencyError(f"inverse transform has imaginary residual {resid:.3e}")
    return InvariantTable(T.group, vals.real.copy(), C.source_kind, "inverse-transform")


def parseval_residual(C: TransformCoefficients, S: InvariantTable) -> float:
    lhs = float(np.sum(np.abs(C.coeffs) ** 2))
    rhs = float(np.sum(S.values**2)) / S.group.phi
    return abs(lhs - rhs)


def conjugate_symmetry_residual(C: TransformCoefficients) -> float:
    T = C.table
    conj = np.array([T.conjugate_index(i) for i in range(T.count)])
    return float(np.max(np.abs(C.coeffs[conj] - C.coeffs.conj())))


@dataclass
class AntisymmetryReport:
    even_max: float
    odd: list[tuple[int, complex]]  # (character index, coefficient), largest magnitude first
    tol: float

    @property
    def passed(self) -> bool:
        return self.even_max < self.tol


def antisymmetry_report(C: TransformCoefficients, tol: float = THEOREM_TOL) -> AntisymmetryReport:
    if C.source_kind != CENTERED:
        raise ValueError("antisymmetry report needs coefficients of a centered invariant")
    T = C.table
    even = T.even_indices
    even_max = float(np.max(np.abs(C.coeffs[even]))) if len(even) else 0.0
    odd = sorted(((int(i), complex(C.coeffs[i])) for i in T.odd_indices),
                 key=lambda t: (-abs(t[1]), t[0]))
    return AntisymmetryReport(even_max, odd, tol)


def dump_coefficients(C: TransformCoefficients, path=None, header: str | None = None) -> str:
    T = C.table
    G = T.group
    buf = io.StringIO()
    buf.write(header or f"# coefficients b={G.base} ell={G.ell} m={G.modulus} kind={C.source_kind}")
    buf.write("\nindex,parity,re,im,abs\n")
    for i, c in enumerate(C.coeffs):
        buf.write(f"{i},{int(T.parity[i])},{c.real:.12g},{c.imag:.12g},{abs(c):.12g}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
