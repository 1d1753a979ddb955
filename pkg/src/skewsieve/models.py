"""Orbit-switching sequences: follow the orbit of x_k while b_k <= n < b_{k+1}."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .arith import MultiplicativeSpec
from .reduce import pairwise_sum
from .stats import BlockScheme, ParameterError, block_sums
from .torus import AffineSkewMap, Frac64, PolyOrbit, TorusPoint, jump, orbit_block, raw_to_phase


class MissingSeed(LookupError):
    pass


@dataclass(frozen=True)
class SwitchedOrbit:
    """y_n = T^n x_k for b_k <= n < b_{k+1} (n = 0 uses x_1).

    Block k covers [b_k, b_{k+1}); the last listed boundary opens a final
    unbounded block.  ``seeds[k-1]`` is x_k.
    """

    map: AffineSkewMap
    blocks: BlockScheme
    seeds: tuple[TorusPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))

    def _seed(self, k: int) -> TorusPoint:
        if k > len(self.seeds):
            raise MissingSeed(f"no seed for block {k} (have {len(self.seeds)})")
        return self.seeds[k - 1]

    def segments(self, n0: int, count: int) -> Iterator[tuple[int, int, int]]:
        """(k, start, stop) pieces of [n0, n0+count) lying in one block each."""
        b = self.blocks.boundaries
        end = n0 + count
        n = n0
        k = self.blocks.block_of(n0)
        while n < end:
            stop = min(end, b[k]) if k < len(b) else end
            yield k, n, stop
            n = stop
            k += 1

    def states(self, n0: int, count: int) -> np.ndarray:
        out = np.empty((self.map.d, count), dtype=np.uint64)
        for k, start, stop in self.segments(n0, count):
            # exact jump-ahead onto the k-th orbit at the block start
            state = jump(self.map, self._seed(k), start)
            out[:, start - n0:stop - n0] = orbit_block(self.map, state, stop - start)[0]
        return out

    def values(self, n0: int, count: int) -> np.ndarray:
        return raw_to_phase(self.states(n0, count)[-1])


def switched_stream(orbit: SwitchedOrbit, count: int, n0: int = 0,
                    chunk: int = 1 << 16) -> Iterator[complex]:
    for a in range(n0, n0 + count, chunk):
        yield from orbit.values(a, min(chunk, n0 + count - a)).tolist()


def rotation_to_real(s: complex) -> Frac64:
    """t in [0, 1) with exp(2 pi i t) s = |s|; zero sums give t = 0."""
    if s == 0:
        return Frac64(0)
    return Frac64.from_float(-cmath.phase(s) / (2 * math.pi))


def aligned_seeds(m: AffineSkewMap, base: TorusPoint, blocks: BlockScheme,
                  nu: MultiplicativeSpec, K: int, workers: int = 1) -> list[TorusPoint]:
    """Seeds base + (0, ..., 0, t_k) rotating each block sum onto the positive axis."""
    sums = block_sums(PolyOrbit(m, base), nu, blocks, K, workers)
    return [base.shift_last(rotation_to_real(complex(s))) for s in sums]


def switched_average(orbit: SwitchedOrbit, nu: MultiplicativeSpec, K: int,
                     workers: int = 1) -> complex:
    """(1/b_{K+1}) sum_{k <= K} sum_{b_k <= n < b_{k+1}} f(T^n x_k) nu(n)."""
    sums = block_sums(orbit, nu, orbit.blocks, K, workers)
    return complex(pairwise_sum(sums)) / orbit.blocks.end(K)


def invariance_defect(blocks: BlockScheme, N: int) -> float:
    """2 #{k : b_k <= N} / N, the total-variation size of T_* nu_N - nu_N."""
    if N < 1:
        raise ParameterError("N must be >= 1")
    count = int(np.searchsorted(np.array(blocks.boundaries), N, side="right"))
    if count == len(blocks.boundaries) and blocks.descriptor != "explicit":
        raise ParameterError(f"scheme was generated only up to {blocks.boundaries[-1]}")
    return 2 * count / N
