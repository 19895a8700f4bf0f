"""Run drivers behind the command line: scans, mod-3 reports, base sums, verification.

Work is split into independent (base, lag, s) tasks. A task's numbers depend only on
its inputs, so the emitted files are identical whatever the worker count.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path

import numpy as np

from . import harmonic, mod3, primes
from .characters import build_character_table
from .config import ScanConfig
from .invariant import (InvariantTable, ReflectionViolation, center, class_means,
                        load_invariant, reflection_defect, synth_invariant)
from .residue_ring import build_units_group
from .transform import (antisymmetry_report, dump_coefficients, forward_transform,
                        inverse_transform, parseval_residual)

log = logging.getLogger(__name__)


def fmt(v) -> str:
    return "empty" if v is None else f"{float(v):.12g}"


def resolve_invariant(cfg: ScanConfig, G) -> InvariantTable:
    path = cfg.invariant_path(G.base, G.ell)
    if path is None:
        return synth_invariant(G, cfg.seed)
    return load_invariant(G, path)


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _header(cfg: ScanConfig, **extra) -> str:
    parts = [f"{k}={v}" for k, v in extra.items()]
    parts += [f"prime_count={cfg.prime_count}", f"source={cfg.source_label()}"]
    return "# " + " ".join(parts) + "\n"


# ---------------------------------------------------------------------------- scan

@dataclass
class ScanCell:
    b: int
    ell: int
    s: float
    m: int
    f_direct: float
    f_decomposed: float
    sign: harmonic.SignStructure
    char_rows: list = field(default_factory=list)
    series: list = field(default_factory=list)


def _scan_task(args) -> ScanCell:
    cfg, b, ell, s = args
    G = build_units_group(b, ell)
    T = build_character_table(G)
    Sc = center(G, resolve_invariant(cfg, G))
    C = forward_transform(T, Sc)
    stream = primes.PrimeStream(G.modulus, count=cfg.prime_count)
    odd = [int(i) for i in T.odd_indices]
    P = harmonic.prime_char_sums(s, T, odd, stream)
    Pv = {c: complex(p.final) for c, p in zip(odd, P)}
    F = harmonic.f_circ_direct(s, Sc, stream)
    dec = harmonic.f_circ_decomposed(s, C, Pv)
    rows = []
    for c in odd:
        prod = C[c] * Pv[c]
        rows.append((c, C[c], Pv[c], prod.real))
    return ScanCell(b, ell, s, G.modulus, float(F.final), dec,
                    harmonic.sign_structure(s, C, Pv), rows, F.checkpoints)


def run_scan(cfg: ScanConfig, out: Path | None = None) -> list[ScanCell]:
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(cfg, b, ell, s) for ell in cfg.lags for b in cfg.bases for s in cfg.s_grid]
    cells = _map(_scan_task, tasks, cfg.workers)
    by_key = {(c.b, c.ell, c.s): c for c in cells}

    cols = [(b, ell) for ell in cfg.lags for b in cfg.bases]
    lines = [_header(cfg, table="F_circ", bases=";".join(map(str, cfg.bases)),
                     lags=";".join(map(str, cfg.lags)))]
    lines.append(",".join(["s"] + [f"b{b}_l{ell}" for b, ell in cols]) + "\n")
    for s in cfg.s_grid:
        lines.append(",".join([repr(float(s))] + [fmt(by_key[(b, ell, s)].f_direct) for b, ell in cols]) + "\n")
    (out / "fcirc_table.csv").write_text("".join(lines))

    for c in cells:
        tag = f"b{c.b}_l{c.ell}_s{c.s!r}"
        head = _header(cfg, b=c.b, ell=c.ell, m=c.m, s=repr(c.s))
        rows = [head, "index,re_coeff,im_coeff,re_P,im_P,re_product\n"]
        rows += [f"{i},{fmt(k.real)},{fmt(k.imag)},{fmt(p.real)},{fmt(p.imag)},{fmt(r)}\n"
                 for i, k, p, r in c.char_rows]
        st = c.sign
        rows.append(f"# positive={st.positive} negative={st.negative} zero={st.zero} "
                    f"pearson={'absent' if st.pearson is None else fmt(st.pearson)} "
                    f"decomposed={fmt(c.f_decomposed)} direct={fmt(c.f_direct)}\n")
        (out / f"characters_{tag}.csv").write_text("".join(rows))
        ser = [head, "checkpoint,x,re,im\n"]
        ser += [f"{n},{x},{fmt(np.real(v))},{fmt(np.imag(v))}\n" for n, x, v in c.series]
        (out / f"series_{tag}.csv").write_text("".join(ser))
    return cells


# ----------------------------------------------------------------------- transform

def run_transform(cfg: ScanConfig, out: Path | None = None) -> list:
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for ell in cfg.lags:
        for b in cfg.bases:
            G = build_units_group(b, ell)
            T = build_character_table(G)
            S = resolve_invariant(cfg, G)
            for kind, tab in (("raw", S), ("centered", center(G, S))):
                C = forward_transform(T, tab)
                head = _header(cfg, b=b, ell=ell, m=G.modulus, kind=kind).rstrip("\n")
                dump_coefficients(C, out / f"coefficients_b{b}_l{ell}_{kind}.csv", header=head)
                if kind == "centered":
                    reports.append((b, ell, antisymmetry_report(C)))
    return reports


# ---------------------------------------------------------------------- neutrality

def run_neutrality(cfg: ScanConfig, out: Path | None = None):
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for ell in cfg.lags:
        for b in cfg.bases:
            G = build_units_group(b, ell)
            S = resolve_invariant(cfg, G)
            rep = mod3.neutrality_report(G, S)
            Sc = center(G, S)
            mc = mod3.mod3_means(G, Sc)
            head = _header(cfg, b=b, ell=ell, m=G.modulus)
            lines = [head, "quantity,value\n"]
            if not rep.applicable:
                lines.append("neutrality,not applicable\n")
            else:
                lines += [f"k_star,{rep.neutral}\n", f"neutral_mean,{fmt(rep.neutral_mean)}\n",
                          f"swapped_pair,{rep.swapped[0]};{rep.swapped[1]}\n",
                          f"swapped_sum,{fmt(rep.swapped_sum)}\n",
                          f"neutrality,{'pass' if rep.passed else 'fail'}\n"]
            for k in range(3):
                v = mc.means[k]
                lines.append(f"mu3_centered_{k},{fmt(v)}\n")
            lines += [f"c0,{fmt(mc.c0)}\n", f"c1,{fmt(mc.c1)}\n"]
            (out / f"mod3_b{b}_l{ell}.csv").write_text("".join(lines))

            series = []
            if rep.applicable and mc.visible:
                stream = primes.PrimeStream(G.modulus, count=cfg.prime_count)
                series = [mod3.f_double_circ(s, Sc, mc, stream) for s in cfg.s_grid]
                rows = [head, "s,F_circ,M,F_double_circ,identity_residual\n"]
                rows += [f"{x.s!r},{fmt(x.F_circ.final)},{fmt(x.M.final)},"
                         f"{fmt(x.F_double_circ.final)},{fmt(x.identity_residual())}\n" for x in series]
                (out / f"fdoublecirc_b{b}_l{ell}.csv").write_text("".join(rows))
            results.append((b, ell, rep, mc, series))
    return results


# ------------------------------------------------------------------------- basesum

def run_basesum(cfg: ScanConfig, out: Path | None = None, bases=None) -> list[mod3.BaseSumTable]:
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    bases = list(bases or cfg.bases)
    if cfg.primes_only:
        bases = [b for b in bases if b in mod3.default_bases(primes_only=True)]
    weights = mod3.default_weights(bases)
    inv = {}
    for b in bases:
        G = build_units_group(b, 1)
        inv[b] = center(G, resolve_invariant(cfg, G))
    stream = primes.PrimeStream(max(b * b for b in bases), count=cfg.prime_count)
    tables = [mod3.base_sum(bases, weights, inv, stream, s) for s in cfg.s_grid]
    lines = [_header(cfg, table="base_sum", lag=1, weights="1/b^2")]
    lines.append(",".join(["base", "weight"] + [f"s={s!r}" for s in cfg.s_grid]) + "\n")
    for b in bases:
        lines.append(",".join([str(b), fmt(weights[b])] +
                              [fmt(t.per_base[b].final) for t in tables]) + "\n")
    lines.append(",".join(["F_R", ""] + [fmt(t.F_R.final) for t in tables]) + "\n")
    lines.append(",".join(["weighted_total", ""] + [fmt(t.weighted_total().final) for t in tables]) + "\n")
    (out / "basesum.csv").write_text("".join(lines))
    return tables


# -------------------------------------------------------------------------- verify

@dataclass
class Check:
    name: str
    module: str
    inputs: str
    residual: float
    tol: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.note == "not applicable":
            status = "N/A "
        return (f"{status} {self.name:<34} [{self.module}] {self.inputs}: "
                f"residual={self.residual:.3e} tol={self.tol:.0e} {self.note}").rstrip()


def verify_suite(cfg: ScanConfig, verify_x: int = 10**6, identity_x: int = 10**7,
                 n_primes: int | None = None) -> list[Check]:
    """Every theorem-level property, with measured residuals."""
    checks: list[Check] = []
    n_primes = n_primes or min(cfg.prime_count, 10**4)
    add = checks.append

    for ell in cfg.lags:
        for b in cfg.bases:
            G = build_units_group(b, ell)
            where = f"b={b} ell={ell} m={G.modulus}"
            try:
                S = resolve_invariant(cfg, G)
            except ReflectionViolation as e:
                add(Check("reflection identity", "invariant", where, 1.0, 0.0, False,
                          f"violated at a={e.unit}"))
                continue
            except ValueError as e:
                add(Check("invariant load", "invariant", where, 1.0, 0.0, False, str(e)))
                continue
            a, d = reflection_defect(S)
            add(Check("reflection identity", "invariant", where, float(abs(d)), 0.0 if S.exact else 1e-9,
                      d == 0 if S.exact is not None else abs(d) <= 1e-9))
            T = build_character_table(G)
            C = forward_transform(T, S)
            exact_ok = C.exact_trivial == Fraction(-1, 2) if C.exact_trivial is not None else True
            r = abs(C[0] + 0.5)
            add(Check("trivial coefficient", "transform", where, r, 1e-12, r < 1e-12 and exact_ok))
            Sc = center(G, S)
            Cc = forward_transform(T, Sc)
            rep = antisymmetry_report(Cc)
            add(Check("antisymmetry (even coeffs vanish)", "transform", where, rep.even_max, 1e-12, rep.passed))
            back = inverse_transform(T, C)
            r = max(float(np.max(np.abs(back.values - S.values))), parseval_residual(C, S))
            add(Check("inversion + Parseval", "transform", where, r, 1e-10, r < 1e-10))

            stream = primes.PrimeStream(G.modulus, count=n_primes)
            odd = [int(i) for i in T.odd_indices]
            gap = 0.0
            for s in cfg.s_grid:
                P = harmonic.prime_char_sums(s, T, odd, stream)
                Pv = {c: complex(p.final) for c, p in zip(odd, P)}
                terms = harmonic.decomposition_terms(Cc, Pv)
                if set(terms) != set(odd) or 0 in terms:
                    gap = float("inf")
                F = harmonic.f_circ_direct(s, Sc, stream)
                gap = max(gap, abs(F.final - harmonic.f_circ_decomposed(s, Cc, Pv)))
            add(Check("decomposition identity", "harmonic", f"{where} primes={n_primes}", gap, 1e-9, gap < 1e-9))

            worst = 0.0
            rng = np.random.default_rng(G.modulus)
            for _ in range(3):
                chi = int(rng.integers(1, T.count))
                s = float(rng.uniform(0.5, 2.0))
                X = int(rng.integers(G.modulus + 1, verify_x))
                worst = max(worst, harmonic.abel_check(s, T, chi, X, refinements=()).residual)
            add(Check("Abel summation (discrete)", "harmonic", where, worst, 1e-12, worst < 1e-12))

            nrep = mod3.neutrality_report(G, S)
            if not nrep.applicable or nrep.vacuous:
                add(Check("neutrality + swapped pair", "mod3", where, 0.0, 0.0, True, "not applicable"))
            else:
                r = max(nrep.residuals())
                add(Check("neutrality + swapped pair", "mod3", f"{where} k*={nrep.neutral}",
                          r, 0.0, nrep.passed))
                mc = mod3.mod3_means(G, Sc)
                ser = mod3.f_double_circ(cfg.s_grid[-1], Sc, mc, stream)
                pt = mod3.principal_terms(Cc, mc)
                ok = (set(harmonic.decomposition_terms(Cc, {c: 0j for c in range(T.count)})) == set(odd)
                      and abs(pt.f_circ) < 1e-12 and pt.mertens_projection == mc.c0
                      and abs(pt.f_double_circ + mc.c0) < 1e-12)
                r = ser.identity_residual()
                add(Check("perfect cancellation bookkeeping", "mod3", where, r, 1e-12, ok and r < 1e-12))

    # qualitative Mertens cancellation, at the first lag's modulus
    for b in cfg.bases:
        m = b ** (cfg.lags[0] + 1)
        G = build_units_group(b, cfg.lags[0])
        T = build_character_table(G)
        ps = primes.progression_sums(primes.geometric_bounds(1000, verify_x), m)
        bad = []
        for chi in range(1, T.count):
            ser = ps.character_series(T.residue_values([chi])[0])
            if not ser.oscillation(3) < ser.oscillation(3, first=True):
                bad.append(chi)
        add(Check("Mertens cancellation (qualitative)", "primes", f"m={m} x<={verify_x}",
                  float(len(bad)), 0.0, not bad, f"stalled characters {bad}" if bad else ""))

    worst = 0.0
    stream = primes.PrimeStream(0, upper=identity_x)
    for b, ell in ((2, 1), (3, 1), (5, 1)):
        G = build_units_group(b, ell)
        T = build_character_table(G)
        chars = list(range(1, T.count))
        for s in (1.2, 1.5, 2.0):
            P = harmonic.prime_char_sums(s, T, chars, stream)
            H = harmonic.h_tail(s, T, chars, stream)
            for c, p, h in zip(chars, P, H):
                L = harmonic.log_l_dirichlet(s, T, c)
                worst = max(worst, abs(L.log - h.final - p.final))
    add(Check("log L - H = P", "harmonic", f"m in (4,9,25) primes<={identity_x}", worst, 2e-6, worst < 2e-6))
    return checks
