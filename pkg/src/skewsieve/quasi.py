"""Symbolic quasi-eigenfunctions of the affine skew product.

A quasi-eigenfunction here is ``x -> exp(2 pi i (m . x + c))`` with an integer
frequency vector ``m`` and a constant phase ``c``.  For an affine map
``S x = B x + beta`` one has

    f(Sx) / f(x) = exp(2 pi i ((B^t - I) m . x + m . beta)),

so the W operator maps the pair (m, c) to ((B^t - I) m, m . beta) and every
identity about towers of such functions becomes integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .reduce import chunk_sums, pmap, split_aligned, tree_total
from .torus import (MASK, ZERO, AffineSkewMap, DimensionError, Frac64, TorusPoint, jump,
                    orbit_block, raw_to_phase)

INT64_MAX = (1 << 63) - 1


@dataclass(frozen=True)
class Character:
    m: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if any(abs(v) > INT64_MAX for v in m):
            raise OverflowError("character frequencies must fit in signed 64-bit integers")
        object.__setattr__(self, "m", m)


@dataclass(frozen=True)
class QuasiEig:
    m: tuple[int, ...]
    c: Frac64 = ZERO

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))

    @classmethod
    def character(cls, m: Sequence[int]) -> "QuasiEig":
        return cls(tuple(m), ZERO)

    @property
    def d(self) -> int:
        return len(self.m)

    @property
    def is_constant(self) -> bool:
        return not any(self.m)

    def __mul__(self, other: "QuasiEig") -> "QuasiEig":
        return QuasiEig(tuple(a + b for a, b in zip(self.m, other.m)), self.c + other.c)

    def __pow__(self, k: int) -> "QuasiEig":
        return QuasiEig(tuple(k * a for a in self.m), self.c * k)

    def __call__(self, x: TorusPoint) -> complex:
        acc = self.c.raw + sum(mi * xi.raw for mi, xi in zip(self.m, x.coords))
        return Frac64(acc & MASK).phase()


def _check(m: AffineSkewMap, f: QuasiEig):
    if f.d != m.d:
        raise DimensionError(f"frequency has length {f.d}, map has dimension {m.d}")


def _dot(m: Sequence[int], beta: Sequence[Frac64]) -> Frac64:
    return Frac64(sum(a * b.raw for a, b in zip(m, beta)) & MASK)


def power_data(m: AffineSkewMap, r: int) -> tuple[list[list[int]], tuple[Frac64, ...]]:
    """(A^r, T^r(0)): T^r x = A^r x + T^r(0)."""
    return m.matrix_power(r), jump(m, TorusPoint.zero(m.d), r).coords


def apply_W_affine(B: Sequence[Sequence[int]], beta: Sequence[Frac64], f: QuasiEig) -> QuasiEig:
    d = f.d
    new_m = tuple(sum(B[i][j] * f.m[i] for i in range(d)) - f.m[j] for j in range(d))
    return QuasiEig(new_m, _dot(f.m, beta))


def apply_WT(m: AffineSkewMap, f: QuasiEig) -> QuasiEig:
    """W_T f = f o T / f.  For the Jordan-block map the frequency shifts up by one slot."""
    _check(m, f)
    return QuasiEig(f.m[1:] + (0,), m.alpha * f.m[0])


def apply_WTr(m: AffineSkewMap, r: int, f: QuasiEig) -> QuasiEig:
    """W for the r-th iterate T^r."""
    _check(m, f)
    if r < 1:
        raise ValueError("r must be >= 1")
    B, beta = power_data(m, r)
    return apply_W_affine(B, beta, f)


def compose_power(m: AffineSkewMap, f: QuasiEig, i: int) -> QuasiEig:
    """f o T^i."""
    _check(m, f)
    B, beta = power_data(m, i)
    d = f.d
    new_m = tuple(sum(B[k][j] * f.m[k] for k in range(d)) for j in range(d))
    return QuasiEig(new_m, f.c + _dot(f.m, beta))


def ek_degree(m: AffineSkewMap, chi) -> int:
    """Least k with (A^t - I)^k m = 0."""
    freq = chi.m
    if len(freq) != m.d:
        raise DimensionError(f"frequency has length {len(freq)}, map has dimension {m.d}")
    k = 0
    while any(freq):
        freq = freq[1:] + (0,)
        k += 1
    return k


def iterate_W(m: AffineSkewMap, f: QuasiEig, k: int, r: int = 1) -> QuasiEig:
    for _ in range(k):
        f = apply_WT(m, f) if r == 1 else apply_WTr(m, r, f)
    return f


def check_tr_lemma(m: AffineSkewMap, f: QuasiEig, r: int, kmax: int) -> bool:
    """Exact check of W_{T^r}^k f == (W_T^k f)^(r^k) with k the tower degree of f."""
    if r < 1:
        raise ValueError("r must be >= 1")
    k = ek_degree(m, f)
    if k > kmax:
        raise ValueError(f"tower degree {k} exceeds kmax={kmax}")
    lhs = iterate_W(m, f, k, r)
    rhs = iterate_W(m, f, k) ** (r**k)
    return lhs.is_constant and rhs.is_constant and lhs.c == rhs.c


def birkhoff_average(m: AffineSkewMap, f: QuasiEig, p0: TorusPoint, N: int,
                     workers: int = 1) -> complex:
    """(1/N) sum_{n<N} f(T^n p0) along the exact orbit."""
    _check(m, f)
    if N < 1:
        raise ValueError("N must be >= 1")
    weights = [np.uint64(mi & MASK) for mi in f.m]
    c = np.uint64(f.c.raw)

    def part(bounds):
        lo, hi = bounds
        start = jump(m, p0, lo) if lo else p0
        sums = []
        for a in range(lo, hi, 1 << 16):
            size = min(1 << 16, hi - a)
            states, start = orbit_block(m, start, size)
            arg = np.full(size, c, dtype=np.uint64)
            for w, row in zip(weights, states):
                if w:
                    arg += w * row
            sums.append(chunk_sums(raw_to_phase(arg)))
        return np.concatenate(sums)

    pieces = pmap(part, split_aligned(0, N, workers, align=1 << 16), workers)
    return complex(tree_total(np.concatenate(pieces))) / N


def key_lemma_search(c1: Frac64, c2: Frac64, bound: int, tol: float) -> list[tuple[int, int]]:
    """Coprime (r, s) in [1, bound]^2 with ||r c1 - s c2|| < tol; tol == 0 means exact equality."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    out = []
    for r in range(1, bound + 1):
        rc1 = c1 * r
        for s in range(1, bound + 1):
            if math.gcd(r, s) != 1:
                continue
            diff = rc1 - c2 * s
            hit = diff.raw == 0 if tol == 0 else diff.norm() < tol
            if hit:
                out.append((r, s))
    return out
