"""Declarative run configuration (INI file, one section per command)."""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .primes import DEFAULT_PRIME_COUNT

MODES = ("transform", "scan", "neutrality", "basesum", "verify")


class ConfigError(ValueError):
    def __init__(self, msg: str, key: str | None = None):
        super().__init__(msg)
        self.key = key


@dataclass(frozen=True)
class ScanConfig:
    bases: tuple[int, ...] = (10,)
    lags: tuple[int, ...] = (1,)
    s_grid: tuple[float, ...] = (1.0, 0.8, 0.6, 0.5)
    prime_count: int = DEFAULT_PRIME_COUNT
    invariant: str = "synthetic:1"  # or file:<template with {b} {ell} {m}>
    out: str = "out"
    workers: int = 1
    primes_only: bool = False  # restrict the base-sum base set to primes

    def __post_init__(self):
        if not self.bases or any(b < 2 for b in self.bases):
            raise ConfigError("bases must be integers >= 2", "bases")
        if not self.lags or any(l < 1 for l in self.lags):
            raise ConfigError("lags must be integers >= 1", "lags")
        if not self.s_grid or any(s <= 0 for s in self.s_grid):
            raise ConfigError("s values must be > 0", "s")
        if self.prime_count < 1:
            raise ConfigError("primes must be >= 1", "primes")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", "workers")
        kind, _, arg = self.invariant.partition(":")
        if kind == "synthetic":
            try:
                int(arg)
            except ValueError:
                raise ConfigError(f"invariant 'synthetic:<seed>' needs an integer seed, got {arg!r}", "invariant") from None
        elif kind != "file" or not arg:
            raise ConfigError(f"invariant must be 'synthetic:<seed>' or 'file:<template>', got {self.invariant!r}", "invariant")

    @property
    def seed(self) -> int | None:
        kind, _, arg = self.invariant.partition(":")
        return int(arg) if kind == "synthetic" else None

    def invariant_path(self, b: int, ell: int) -> Path | None:
        kind, _, arg = self.invariant.partition(":")
        if kind != "file":
            return None
        return Path(arg.format(b=b, ell=ell, m=b ** (ell + 1)))

    def source_label(self) -> str:
        return self.invariant

    def with_overrides(self, **kw) -> "ScanConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_KEYS = {
    "bases": "bases", "lags": "lags", "s": "s_grid", "primes": "prime_count",
    "invariant": "invariant", "out": "out", "workers": "workers", "primes_only": "primes_only",
}


def _ints(text):
    return tuple(int(t) for t in re.split(r"[,\s]+", text.strip()) if t)


def _floats(text):
    return tuple(float(t) for t in re.split(r"[,\s]+", text.strip()) if t)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS = {
    "bases": _ints, "lags": _ints, "s_grid": _floats, "prime_count": int,
    "invariant": str.strip, "out": str.strip, "workers": int, "primes_only": _bool,
}


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        sm = re.match(r"\s*\[([^\]]+)\]", line)
        if sm:
            current = sm.group(1).strip()
            continue
        if re.match(rf"\s*{re.escape(key)}\s*[=:]", line) and current in (section, "DEFAULT"):
            return i
    return None


def parse_config(text: str, mode: str = "scan", source: str = "<config>") -> ScanConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    if mode not in cp and not cp.defaults():
        raise ConfigError(f"{source}: no [{mode}] section")
    sect = cp[mode] if mode in cp else cp[cp.default_section]
    kw = {}
    for key, value in sect.items():
        if key not in _KEYS:
            line = _line_of(text, sect.name, key)
            raise ConfigError(f"{source}:{line}: unknown key {key!r}")
        name = _KEYS[key]
        try:
            kw[name] = _PARSERS[name](value)
        except ValueError as e:
            line = _line_of(text, sect.name, key)
            raise ConfigError(f"{source}:{line}: bad value for {key!r}: {e}") from None
    try:
        return ScanConfig(**kw)
    except ConfigError as e:
        line = _line_of(text, sect.name, e.key) if e.key else None
        raise ConfigError(f"{source}:{line}: {e}") from None


def load_config(path, mode: str = "scan") -> ScanConfig:
    path = Path(path)
    return parse_config(path.read_text(), mode, str(path))


def emit_config(cfg: ScanConfig, mode: str = "scan") -> str:
    vals = {
        "bases": ", ".join(map(str, cfg.bases)),
        "lags": ", ".join(map(str, cfg.lags)),
        "s": ", ".join(repr(float(s)) for s in cfg.s_grid),
        "primes": str(cfg.prime_count),
        "invariant": cfg.invariant,
        "out": cfg.out,
        "workers": str(cfg.workers),
        "primes_only": "true" if cfg.primes_only else "false",
    }
    lines = [f"[{mode}]"] + [f"{k} = {v}" for k, v in vals.items()]
    return "\n".join(lines) + "\n"
