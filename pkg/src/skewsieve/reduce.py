"""Deterministic reductions and the worker pool used by every estimator.

Floating sums go through a fixed binary tree over 1024-element chunks aligned
to global indices, so splitting the work across any number of workers changes
no output bit as long as each worker owns whole chunks.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

CHUNK = 1 << 10

T = TypeVar("T")
R = TypeVar("R")


def cmul(a, b) -> np.ndarray:
    """Complex product from separately rounded real operations.

    numpy's complex multiply may or may not fuse multiply-adds depending on
    array length, which would make results depend on how work is split.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    out = np.empty(np.broadcast(a, b).shape, dtype=np.complex128)
    out.real = ar * br - ai * bi
    out.imag = ar * bi + ai * br
    return out


def default_workers() -> int:
    return os.cpu_count() or 1


def _tree(x: np.ndarray) -> np.ndarray:
    # x has shape (rows, 2**k); halve the last axis until one column remains
    while x.shape[-1] > 1:
        half = x.shape[-1] // 2
        x = x[..., :half] + x[..., half:]
    return x[..., 0]


def chunk_sums(values: np.ndarray) -> np.ndarray:
    """Tree sum of each aligned 1024-element chunk (last one zero padded)."""
    values = np.asarray(values)
    n = len(values)
    rows = -(-n // CHUNK)
    padded = np.zeros(rows * CHUNK, dtype=values.dtype)
    padded[:n] = values
    return _tree(padded.reshape(rows, CHUNK))


def tree_total(partials: np.ndarray):
    partials = np.asarray(partials)
    if len(partials) == 0:
        return partials.dtype.type(0)
    width = 1 << (len(partials) - 1).bit_length()
    padded = np.zeros(width, dtype=partials.dtype)
    padded[: len(partials)] = partials
    return _tree(padded[None, :])[0]


def pairwise_sum(values: np.ndarray):
    """Sum with a fixed summation tree; result depends only on the values."""
    values = np.asarray(values)
    if len(values) == 0:
        return values.dtype.type(0)
    return tree_total(chunk_sums(values))


def split_aligned(lo: int, hi: int, parts: int, align: int = CHUNK) -> list[tuple[int, int]]:
    """Split [lo, hi) into at most ``parts`` contiguous pieces whose inner cuts
    fall on multiples of ``align`` measured from ``lo``."""
    total = hi - lo
    if total <= 0:
        return []
    units = -(-total // align)
    parts = max(1, min(parts, units))
    base, extra = divmod(units, parts)
    out = []
    start = 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        stop = min(total, start + size * align)
        out.append((lo + start, lo + stop))
        start = stop
    return out


def pmap(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """Ordered map over ``items`` on a thread pool (numpy releases the GIL)."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def concat(arrays: Iterable[np.ndarray]) -> np.ndarray:
    arrays = list(arrays)
    if not arrays:
        return np.empty(0)
    return np.concatenate(arrays)
