"""Slow, independent reference computations used to cross-check the fast paths."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .torus import MOD


def factorize(n: int) -> dict[int, int]:
    """Trial division."""
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mu(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def liouville(n: int) -> int:
    return -1 if sum(factorize(n).values()) % 2 else 1


def multiplicative_value(table: dict, n: int) -> complex:
    v = 1 + 0j
    for p, e in factorize(n).items():
        v *= table[p**e]
    return v


def trial_division_table(hi: int) -> tuple[np.ndarray, np.ndarray]:
    """(mu, lambda) for 1 <= n < hi by column-wise trial division of every n.

    Each n is divided by every candidate divisor up to sqrt(hi) as long as it
    divides, counting exponents; whatever remains above 1 is prime.
    """
    dtype = np.int32 if hi < 1 << 31 else np.int64
    rem = np.arange(1, hi, dtype=dtype)
    omega = np.zeros(len(rem), dtype=np.int64)
    square = np.zeros(len(rem), dtype=bool)
    nfac = np.zeros(len(rem), dtype=np.int64)
    d = 2
    while d * d < hi:
        idx = np.flatnonzero(rem % d == 0)
        nfac[idx] += 1
        while len(idx):
            rem[idx] //= d
            omega[idx] += 1
            idx = idx[rem[idx] % d == 0]
            square[idx] = True
        d += 1 if d == 2 else 2
    big = rem > 1
    omega += big
    nfac += big
    mu_ = np.where(square, 0, np.where(nfac % 2 == 1, -1, 1)).astype(np.int8)
    lam = np.where(omega % 2 == 1, -1, 1).astype(np.int8)
    return mu_, lam


def binomial_formula(alpha: Fraction, xs, n: int) -> Fraction:
    """C(n,d) alpha + C(n,d-1) x_1 + ... + x_d reduced mod 1, in exact rationals."""
    d = len(xs)
    total = math.comb(n, d) * alpha + sum(math.comb(n, d - j) * x for j, x in enumerate(xs, 1))
    return total - math.floor(total)


def circle_distance(a: Fraction, b: Fraction) -> Fraction:
    t = (a - b) % 1
    return min(t, 1 - t)


def naive_window_stat(z: np.ndarray, M: int, H: int) -> float:
    """(1/M) sum_m (1/H) |sum_{m<=n<m+H} z_n| with z indexed from n = M, every window summed afresh."""
    total = 0.0
    for j in range(M):
        total += abs(complex(np.sum(z[j:j + H]))) / H
    return total / M


def rotation_correlation(alpha_raw: int, r: int, s: int, N: int) -> complex:
    """Closed form of (1/N) sum_{n=1}^N e((r-s) n alpha) with alpha = alpha_raw / 2**64."""
    theta = ((r - s) * alpha_raw) % MOD
    if theta == 0:
        return 1.0 + 0j
    q = cmath.exp(2j * math.pi * theta / MOD)
    qN = cmath.exp(2j * math.pi * ((N * theta) % MOD) / MOD)
    return q * (1 - qN) / (1 - q) / N


def rotation_bound(alpha_raw: int, r: int, s: int, N: int) -> float:
    theta = ((r - s) * alpha_raw) % MOD
    norm = min(theta, MOD - theta) / MOD
    return math.inf if norm == 0 else 1 / (2 * N * norm)


def poly_phase_128(coeffs, n: int) -> Fraction:
    """P(n) mod 1 with coefficients already given as exact rationals."""
    v = sum(Fraction(c) * n**j for j, c in enumerate(coeffs))
    return v - math.floor(v)
