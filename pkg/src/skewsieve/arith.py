"""Segmented sieves for bounded multiplicative functions.

Values over ``[lo, hi)`` are assembled prime by prime: every prime up to
``sqrt(hi)`` is divided out of the segment in place, and whatever cofactor is
left afterwards is a single large prime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .reduce import cmul, pmap

SEGMENT_CAPACITY = 1 << 22
MODULUS_SLACK = 2.0**-30


class CapacityError(ValueError):
    pass


class DomainError(ValueError):
    pass


class SpecError(ValueError):
    pass


KINDS = ("moebius", "liouville", "archimedean", "custom")


@dataclass(frozen=True)
class MultiplicativeSpec:
    """A multiplicative function with |nu| <= 1, fixed by its prime-power values.

    ``custom`` tables map each prime power q = p**e to nu(q); every prime power
    that occurs in an evaluated range must be present.
    """

    kind: str
    t: float = 0.0
    table: dict = field(default_factory=dict, compare=False, hash=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown multiplicative kind {self.kind!r}")
        if self.kind == "custom":
            for q, v in self.table.items():
                if abs(complex(v)) > 1 + MODULUS_SLACK:
                    raise SpecError(f"custom value at {q} has modulus {abs(complex(v))} > 1")

    @classmethod
    def moebius(cls) -> "MultiplicativeSpec":
        return cls("moebius", label="moebius")

    @classmethod
    def liouville(cls) -> "MultiplicativeSpec":
        return cls("liouville", label="liouville")

    @classmethod
    def archimedean(cls, t: float) -> "MultiplicativeSpec":
        return cls("archimedean", t=float(t), label=f"archimedean:{float(t)!r}")

    @classmethod
    def custom(cls, table: dict, label: str = "custom") -> "MultiplicativeSpec":
        return cls("custom", table={int(q): complex(v) for q, v in table.items()}, label=label)

    @classmethod
    def random_unimodular(cls, limit: int, seed: int = 0) -> "MultiplicativeSpec":
        """Independent uniform phases on every prime power below ``limit``."""
        rng = np.random.default_rng(seed)
        qs = prime_powers_below(limit)
        phases = np.exp(2j * np.pi * rng.random(len(qs)))
        return cls.custom(dict(zip(qs.tolist(), phases.tolist())),
                          label=f"unimodular:{seed}:{limit}")

    @classmethod
    def parse(cls, text: str) -> "MultiplicativeSpec":
        """``moebius``, ``liouville``, ``one``, ``archimedean:T`` or ``unimodular:SEED:LIMIT``."""
        name, _, rest = text.strip().partition(":")
        if name in ("moebius", "mobius", "mu"):
            return cls.moebius()
        if name in ("liouville", "lambda"):
            return cls.liouville()
        if name == "one":
            return cls.archimedean(0.0)
        if name == "archimedean":
            return cls.archimedean(float(rest))
        if name == "unimodular":
            seed, _, limit = rest.partition(":")
            return cls.random_unimodular(int(float(limit)), int(seed))
        raise SpecError(f"cannot parse multiplicative spec {text!r}")

    def __str__(self):
        return self.label or self.kind

    @property
    def is_integer(self) -> bool:
        return self.kind in ("moebius", "liouville")


@dataclass(frozen=True)
class SieveSegment:
    lo: int
    hi: int
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.hi - self.lo:
            raise ValueError("segment length does not match its range")

    def __getitem__(self, n: int):
        return self.values[n - self.lo]


@lru_cache(maxsize=8)
def _primes_cached(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def primes_upto(limit: int) -> np.ndarray:
    """All primes p <= limit."""
    return _primes_cached(int(limit))


def prime_powers_below(limit: int) -> np.ndarray:
    qs = []
    for p in primes_upto(limit - 1).tolist():
        q = p
        while q < limit:
            qs.append(q)
            q *= p
    return np.array(sorted(qs), dtype=np.int64)


def _check_range(lo: int, hi: int, capacity: int):
    if lo < 1:
        raise DomainError(f"multiplicative functions are defined for n >= 1, got lo={lo}")
    if hi <= lo:
        raise DomainError(f"empty range [{lo}, {hi})")
    if hi - lo > capacity:
        raise CapacityError(f"range length {hi - lo} exceeds segment capacity {capacity}")
    if hi > 1 << 63:
        raise DomainError("ranges beyond 2**63 are not supported")


def _first_offset(lo: int, q: int) -> int:
    return -lo % q


def sieve_moebius(lo: int, hi: int, capacity: int = SEGMENT_CAPACITY) -> SieveSegment:
    """mu(n) for lo <= n < hi as int8."""
    _check_range(lo, hi, capacity)
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    prod = np.ones(size, dtype=np.int64)
    for p in primes_upto(math.isqrt(hi - 1)).tolist():
        s = _first_offset(lo, p)
        mu[s::p] *= -1
        prod[s::p] *= p
        pp = p * p
        mu[_first_offset(lo, pp)::pp] = 0
    n = np.arange(lo, hi, dtype=np.int64)
    big = (prod != n) & (mu != 0)
    mu[big] *= -1
    return SieveSegment(lo, hi, mu)


def _factor_exponents(lo: int, hi: int) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """For each prime p <= sqrt(hi-1): (p, offsets of multiples of p, their p-adic
    valuations).  Divides p out of the shared cofactor array as it goes; the
    cofactor array is yielded last as (0, cofactor, empty)."""
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes_upto(math.isqrt(hi - 1)).tolist():
        s = _first_offset(lo, p)
        if s >= size:
            continue
        idx = np.arange(s, size, p)
        exps = np.zeros(len(idx), dtype=np.int64)
        sub = rem[idx]
        live = np.ones(len(idx), dtype=bool)
        while live.any():
            live &= sub % p == 0
            sub[live] //= p
            exps += live
        rem[idx] = sub
        yield p, idx, exps
    yield 0, rem, np.empty(0, dtype=np.int64)


def _liouville(lo: int, hi: int) -> np.ndarray:
    omega = np.zeros(hi - lo, dtype=np.int64)
    for p, idx, exps in _factor_exponents(lo, hi):
        if p == 0:
            omega += idx > 1
        else:
            omega[idx] += exps
    return np.where(omega % 2 == 0, 1, -1).astype(np.int8)


def _custom(spec: MultiplicativeSpec, lo: int, hi: int) -> np.ndarray:
    table = spec.table
    vals = np.ones(hi - lo, dtype=np.complex128)

    def lookup(q: int) -> complex:
        try:
            return table[q]
        except KeyError:
            raise SpecError(f"custom spec {spec} has no value for prime power {q}") from None

    for p, idx, exps in _factor_exponents(lo, hi):
        if p == 0:
            big = np.flatnonzero(idx > 1)
            if len(big):
                qs, inv = np.unique(idx[big], return_inverse=True)
                vals[big] = cmul(vals[big], np.array([lookup(int(q)) for q in qs])[inv])
            continue
        for e in np.unique(exps).tolist():
            sel = idx[exps == e]
            vals[sel] = cmul(vals[sel], lookup(p**e))
    if len(vals) and np.abs(vals).max() > 1 + MODULUS_SLACK:
        raise SpecError("custom spec produced a value of modulus > 1")
    return vals


def eval_multiplicative(spec: MultiplicativeSpec, lo: int, hi: int,
                        capacity: int = SEGMENT_CAPACITY) -> SieveSegment:
    """nu(n) for lo <= n < hi; int8 for mu and lambda, complex128 otherwise."""
    _check_range(lo, hi, capacity)
    if spec.kind == "moebius":
        return sieve_moebius(lo, hi, capacity)
    if spec.kind == "liouville":
        return SieveSegment(lo, hi, _liouville(lo, hi))
    if spec.kind == "archimedean":
        # n^{it} is completely multiplicative, so the prime-power assembly collapses
        n = np.arange(lo, hi, dtype=np.float64)
        return SieveSegment(lo, hi, np.exp(1j * spec.t * np.log(n)))
    return SieveSegment(lo, hi, _custom(spec, lo, hi))


def eval_range(spec: MultiplicativeSpec, lo: int, hi: int, *, segment: int = SEGMENT_CAPACITY,
               workers: int = 1) -> np.ndarray:
    """nu over an arbitrary range, sieved segment by segment."""
    if hi <= lo:
        return np.empty(0, dtype=np.int8 if spec.is_integer else np.complex128)
    bounds = [(a, min(a + segment, hi)) for a in range(lo, hi, segment)]
    parts = pmap(lambda b: eval_multiplicative(spec, b[0], b[1], capacity=segment).values,
                 bounds, workers)
    return np.concatenate(parts)


def mertens(N: int, *, segment: int = SEGMENT_CAPACITY, workers: int = 1) -> int:
    """sum_{n <= N} mu(n)."""
    if N < 1:
        raise DomainError("N must be >= 1")
    bounds = [(a, min(a + segment, N + 1)) for a in range(1, N + 1, segment)]
    sums = pmap(lambda b: int(sieve_moebius(b[0], b[1], capacity=segment).values.sum(dtype=np.int64)),
                bounds, workers)
    return sum(sums)
