"""Weighted averages of phase sequences against multiplicative functions.

A *phase sequence* is anything with ``values(n0, count)`` returning the complex
terms ``a_n`` for ``n0 <= n < n0 + count``.  :class:`~skewsieve.torus.PolyOrbit`
is one, and also supports ``dilate(r)`` (the sequence ``n -> a_{rn}``) by exact
jump-ahead, which is what the prime-power correlations need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .arith import MultiplicativeSpec, eval_range
from .reduce import chunk_sums, cmul, concat, pairwise_sum, pmap, split_aligned, tree_total
from .torus import PolyOrbit, PolySpec

REFRESH = 1 << 16


class ParameterError(ValueError):
    pass


class StreamTooShort(ValueError):
    pass


class ArraySequence:
    """A finite sequence given as an array whose index 0 is a_0."""

    def __init__(self, values):
        self.data = np.asarray(values, dtype=np.complex128)

    def values(self, n0: int, count: int) -> np.ndarray:
        if n0 < 0 or n0 + count > len(self.data):
            raise StreamTooShort(f"need terms [{n0}, {n0 + count}), have {len(self.data)}")
        return self.data[n0:n0 + count]

    def dilate(self, r: int) -> "ArraySequence":
        return ArraySequence(self.data[::r])


class ConstantSequence:
    def __init__(self, value: complex = 1.0):
        self.value = complex(value)

    def values(self, n0: int, count: int) -> np.ndarray:
        return np.full(count, self.value, dtype=np.complex128)

    def dilate(self, r: int) -> "ConstantSequence":
        return self


def as_sequence(a):
    if isinstance(a, PolySpec):
        return PolyOrbit.from_poly(a)
    if hasattr(a, "values") and callable(a.values):
        return a
    if np.isscalar(a):
        return ConstantSequence(a)
    return ArraySequence(a)


def weighted_terms(a, nu: MultiplicativeSpec, lo: int, hi: int, workers: int = 1) -> np.ndarray:
    """a_n nu(n) for lo <= n < hi."""
    a = as_sequence(a)
    return cmul(a.values(lo, hi - lo), eval_range(nu, lo, hi, workers=workers))


def basic_average(a, nu: MultiplicativeSpec, N: int, workers: int = 1) -> complex:
    """(1/N) sum_{1 <= n <= N} a_n nu(n)."""
    if N < 1:
        raise ParameterError("N must be >= 1")
    a = as_sequence(a)

    def part(b):
        return chunk_sums(weighted_terms(a, nu, b[0], b[1]))

    pieces = pmap(part, split_aligned(1, N + 1, workers), workers)
    return complex(tree_total(concat(pieces))) / N


def kbsz_correlation(a, r: int, s: int, N: int, workers: int = 1) -> complex:
    """(1/N) sum_{1 <= n <= N} a_{rn} conj(a_{sn})."""
    if r == s:
        raise ParameterError("r and s must differ")
    if r < 1 or s < 1 or N < 1:
        raise ParameterError("r, s and N must be >= 1")
    a = as_sequence(a)
    ar, as_ = a.dilate(r), a.dilate(s)

    def part(b):
        lo, hi = b
        return chunk_sums(cmul(ar.values(lo, hi - lo), np.conj(as_.values(lo, hi - lo))))

    pieces = pmap(part, split_aligned(1, N + 1, workers), workers)
    return complex(tree_total(concat(pieces))) / N


# ---------------------------------------------------------------------------
# blocks


def _gap_rule(name: str) -> Callable[[np.ndarray], np.ndarray]:
    kind, _, arg = name.partition(":")
    if kind == "sqrt":
        return lambda k: np.floor(np.sqrt(k)).astype(np.int64) + 1
    if kind == "isqrt":
        return lambda k: np.floor(np.sqrt(k)).astype(np.int64)
    if kind == "log2":
        return lambda k: np.floor(np.log(k) ** 2).astype(np.int64) + 1
    if kind == "power":
        theta = float(arg)
        if theta <= 0:
            raise ParameterError("power rule needs theta > 0 so gaps grow")
        return lambda k: np.maximum(np.floor(k ** theta).astype(np.int64), 1)
    if kind == "const":
        g = int(arg)
        if g < 1:
            raise ParameterError("constant gap must be >= 1")
        return lambda k: np.full(len(k), g, dtype=np.int64)
    raise ParameterError(f"unknown block rule {name!r}")


@dataclass(frozen=True)
class BlockScheme:
    """Block starts 1 = b_1 < b_2 < ...; block k is [b_k, b_{k+1})."""

    boundaries: tuple[int, ...]
    descriptor: str = "explicit"

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        if not b or b[0] != 1:
            raise ParameterError("block boundaries must start at 1")
        if any(y <= x for x, y in zip(b, b[1:])):
            raise ParameterError("block boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def from_rule(cls, rule: str, limit: int) -> "BlockScheme":
        """Boundaries from a gap rule, up to and including the first one past ``limit``.

        Rules: ``sqrt`` (floor(sqrt k) + 1), ``isqrt`` (floor(sqrt k)),
        ``log2`` (floor(log^2 k) + 1), ``power:THETA`` (floor(k^THETA)),
        ``const:G``.
        """
        gap = _gap_rule(rule)
        b = [np.array([1], dtype=np.int64)]
        last, k0, step = 1, 1, 1024
        while last <= limit:
            g = gap(np.arange(k0, k0 + step, dtype=np.float64))
            chunk = last + np.cumsum(g)
            b.append(chunk)
            last = int(chunk[-1])
            k0 += step
            step *= 2
        full = np.concatenate(b)
        stop = int(np.searchsorted(full, limit, side="right")) + 1
        return cls(tuple(full[:stop].tolist()), descriptor=rule)

    @classmethod
    def explicit(cls, boundaries: Sequence[int]) -> "BlockScheme":
        return cls(tuple(boundaries), "explicit")

    def __len__(self):
        return len(self.boundaries)

    @property
    def num_blocks(self) -> int:
        """Number of complete blocks [b_k, b_{k+1})."""
        return len(self.boundaries) - 1

    def end(self, K: int) -> int:
        """b_{K+1}."""
        self._check_K(K)
        return self.boundaries[K]

    def K_for(self, target: int) -> int:
        """Largest K with b_{K+1} <= target."""
        K = int(np.searchsorted(np.array(self.boundaries), target, side="right")) - 1
        if K < 1:
            raise ParameterError(f"no complete block ends at or below {target}")
        return K

    def block_of(self, n: int) -> int:
        """1-based index k with b_k <= n < b_{k+1}; n = 0 belongs to block 1."""
        return max(1, int(np.searchsorted(np.array(self.boundaries), n, side="right")))

    def _check_K(self, K: int):
        if K < 1 or K > self.num_blocks:
            raise ParameterError(f"K={K} outside 1..{self.num_blocks} for this scheme")


def block_sums(a, nu: MultiplicativeSpec, blocks: BlockScheme, K: int,
               workers: int = 1) -> np.ndarray:
    """sum_{b_k <= n < b_{k+1}} a_n nu(n) for k = 1..K."""
    blocks._check_K(K)
    a = as_sequence(a)
    b = np.array(blocks.boundaries[:K + 1], dtype=np.int64)
    groups = split_aligned(0, K, workers, align=1)

    def part(g):
        k0, k1 = g
        lo, hi = int(b[k0]), int(b[k1])
        z = weighted_terms(a, nu, lo, hi)
        return np.add.reduceat(z, b[k0:k1] - lo)

    return np.concatenate(pmap(part, groups, workers))


def weighted_block_stat(a, nu: MultiplicativeSpec, blocks: BlockScheme, K: int,
                        workers: int = 1) -> float:
    """(1/b_{K+1}) sum_{k <= K} |sum_{b_k <= n < b_{k+1}} a_n nu(n)|."""
    sums = block_sums(a, nu, blocks, K, workers)
    return float(pairwise_sum(np.abs(sums))) / blocks.end(K)


# ---------------------------------------------------------------------------
# short intervals


def icbrt(n: int) -> int:
    x = round(n ** (1 / 3))
    while x ** 3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def default_H(M: int) -> int:
    """floor(M^(1/3)); no relation H(M) is canonical, this one is a convenient default."""
    return max(1, icbrt(M))


@dataclass(frozen=True)
class ShortIntervalGrid:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(M), int(H)) for M, H in self.pairs)
        for M, H in pairs:
            if not 1 <= H <= M:
                raise ParameterError(f"need 1 <= H <= M, got M={M}, H={H}")
        for (M0, H0), (M1, H1) in zip(pairs, pairs[1:]):
            if H1 < H0 or H1 * M0 >= H0 * M1:
                raise ParameterError("grid needs nondecreasing H and strictly decreasing H/M")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_Ms(cls, Ms: Sequence[int]) -> "ShortIntervalGrid":
        return cls(tuple((M, default_H(M)) for M in Ms))


def window_sums(z: np.ndarray, H: int, count: int, offset: int = 0) -> np.ndarray:
    """Sliding sums S_j = z[j] + ... + z[j+H-1] for j < count.

    S is carried from one position to the next by adding the entering term and
    removing the leaving one; at every position ``j`` with ``(offset + j)``
    divisible by 2**16 it is recomputed from scratch to cap drift.
    """
    out = np.empty(count, dtype=np.complex128)
    j = 0
    while j < count:
        nxt = min(count, (offset + j) // REFRESH * REFRESH + REFRESH - offset)
        L = nxt - j
        seed = pairwise_sum(z[j:j + H])
        steps = np.empty(L, dtype=np.complex128)
        steps[0] = seed
        steps[1:] = z[j + H:j + H + L - 1] - z[j:j + L - 1]
        np.cumsum(steps, out=out[j:nxt])
        j = nxt
    return out


def short_interval_stat(P, nu: MultiplicativeSpec, M: int, H: int, workers: int = 1) -> float:
    """(1/M) sum_{M <= m < 2M} (1/H) |sum_{m <= n < m+H} e(P(n)) nu(n)|."""
    if H < 1 or M < 1:
        raise ParameterError("M and H must be >= 1")
    if H > M:
        raise ParameterError(f"H={H} exceeds M={M}")
    a = as_sequence(P)

    def part(b):
        lo, hi = b
        z = weighted_terms(a, nu, lo, hi + H - 1)
        return np.abs(window_sums(z, H, hi - lo, offset=lo - M)) / H

    parts = pmap(part, split_aligned(M, 2 * M, workers, align=REFRESH), workers)
    return float(pairwise_sum(concat(parts))) / M


def hx_blocks(grid: ShortIntervalGrid, residues: Sequence[int]) -> BlockScheme:
    """{1} together with {m : M_l <= m < 2 M_l + H_l, m = r_l mod H_l} over the grid."""
    pairs = grid.pairs
    if len(residues) != len(pairs):
        raise ParameterError("need one residue per grid point")
    for (M0, H0), (M1, _) in zip(pairs, pairs[1:]):
        if M1 <= 2 * M0 + H0:
            raise ParameterError(f"groups overlap: M={M1} <= 2*{M0}+{H0}")
    out = [1]
    for (M, H), r in zip(pairs, residues):
        if not 0 <= r < H:
            raise ParameterError(f"residue {r} not in [0, {H})")
        first = M + (r - M) % H
        out.extend(m for m in range(first, 2 * M + H, H) if m > out[-1])
    return BlockScheme(tuple(out), descriptor="hx")
