"""Experiment configuration and its ``key = value`` text form."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field, fields
from decimal import Decimal, InvalidOperation
from typing import get_type_hints

from .reduce import default_workers

KINDS = ("sieve", "phase", "quasi-tr", "quasi-birkhoff", "kbsz", "short-interval",
         "block-stat", "switched", "selftest")

# fields that do not change the produced numbers and stay out of the hash
RUNTIME_FIELDS = ("out", "workers", "fixture", "tolerance")


class ConfigError(ValueError):
    pass


def parse_int(text: str) -> int:
    """Integers, also written as ``1e6`` or ``10**6``."""
    s = str(text).strip().replace("_", "")
    if "**" in s:
        base, _, exp = s.partition("**")
        return parse_int(base) ** parse_int(exp)
    try:
        v = Decimal(s)
    except InvalidOperation:
        raise ValueError(f"not an integer: {text!r}") from None
    if v != v.to_integral_value():
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


def _parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(parse_int(s) for s in text.split(",") if s.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    poly: str = "sqrt2,0,0"
    nu: str = "moebius"
    scheme: str = "sqrt"
    lo: int = 1
    hi: int = 1000
    n0: int = 0
    count: int = 16
    N: int = 100000
    M: tuple[int, ...] = ()
    H: tuple[int, ...] = ()
    K: tuple[int, ...] = ()
    ends: tuple[int, ...] = ()
    primes_up_to: int = 50
    d: int = 2
    r_max: int = 20
    freq: tuple[int, ...] = (1,)
    alpha: str = "sqrt2-1"
    align: bool = False
    out: str = "-"
    workers: int = field(default_factory=default_workers)
    fixture: str = ""
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.H and len(self.H) != len(self.M):
            raise ConfigError("H must be empty or have one entry per M")

    def to_text(self, include_runtime: bool = True) -> str:
        lines = []
        for f in fields(self):
            if not include_runtime and f.name in RUNTIME_FIELDS:
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text(include_runtime=False).encode()).hexdigest()

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_HINTS = get_type_hints(ExperimentConfig)
_PARSERS = {
    int: parse_int,
    float: float,
    str: str.strip,
    bool: _parse_bool,
    tuple[int, ...]: _parse_int_list,
}


def coerce(name: str, text: str):
    if name not in _HINTS:
        raise ConfigError(f"unknown key {name!r}")
    return _PARSERS[_HINTS[name]](text)


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.  Unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _HINTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = coerce(key, value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: field {key!r}: {exc}") from None
    if "kind" not in values:
        raise ConfigError("missing required key 'kind'")
    return ExperimentConfig(**values)
