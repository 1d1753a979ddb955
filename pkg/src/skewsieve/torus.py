"""Exact fixed-point orbits of the rotation and of the unipotent affine skew product on T^d.

State is held as unsigned 64-bit fixed point, so ``x + y mod 1`` is an exact
wrapping integer addition and the orbit of

    T(x_1, ..., x_d) = (x_1 + alpha, x_2 + x_1, ..., x_d + x_{d-1})

carries no arithmetic error at all.  The only rounding happens when a real
number is first turned into a :class:`Frac64`, and when a state is turned into
a phase ``exp(2 pi i x_d)``.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

MOD = 1 << 64
MASK = MOD - 1
MAX_DIM = 16
CONST_BITS = 128
STREAM_CHUNK = 1 << 16

_TWO_PI_ULP = 2.0 * math.pi / 2.0**64


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Frac64:
    """An element ``raw / 2**64`` of the circle R/Z."""

    raw: int

    def __post_init__(self):
        if not 0 <= self.raw < MOD:
            object.__setattr__(self, "raw", self.raw & MASK)

    @classmethod
    def from_fraction(cls, q) -> "Frac64":
        """Round ``q mod 1`` to the nearest multiple of 2**-64 (ties up)."""
        q = Fraction(q)
        scaled = q * MOD + Fraction(1, 2)
        return cls(math.floor(scaled) & MASK)

    @classmethod
    def from_float(cls, x: float) -> "Frac64":
        return cls.from_fraction(Fraction(x))

    def __add__(self, other: "Frac64") -> "Frac64":
        return Frac64((self.raw + other.raw) & MASK)

    def __sub__(self, other: "Frac64") -> "Frac64":
        return Frac64((self.raw - other.raw) & MASK)

    def __neg__(self) -> "Frac64":
        return Frac64(-self.raw & MASK)

    def __mul__(self, k: int) -> "Frac64":
        if not isinstance(k, int):
            return NotImplemented
        return Frac64((self.raw * k) & MASK)

    __rmul__ = __mul__

    def __float__(self) -> float:
        return self.raw / MOD

    def as_fraction(self) -> Fraction:
        return Fraction(self.raw, MOD)

    def norm(self) -> float:
        """Distance to the nearest integer."""
        return min(self.raw, MOD - self.raw) / MOD

    def phase(self) -> complex:
        signed = self.raw - MOD if self.raw >= 1 << 63 else self.raw
        theta = signed * _TWO_PI_ULP
        return complex(math.cos(theta), math.sin(theta))


ZERO = Frac64(0)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[Frac64, ...]

    def __post_init__(self):
        coords = tuple(c if isinstance(c, Frac64) else Frac64.from_fraction(c) for c in self.coords)
        if not 1 <= len(coords) <= MAX_DIM:
            raise DimensionError(f"torus dimension must be in [1, {MAX_DIM}], got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zero(cls, d: int) -> "TorusPoint":
        return cls((ZERO,) * d)

    @classmethod
    def from_raws(cls, raws: Sequence[int]) -> "TorusPoint":
        return cls(tuple(Frac64(int(r)) for r in raws))

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def raws(self) -> tuple[int, ...]:
        return tuple(c.raw for c in self.coords)

    def shift_last(self, t: Frac64) -> "TorusPoint":
        return TorusPoint(self.coords[:-1] + (self.coords[-1] + t,))


@dataclass(frozen=True)
class AffineSkewMap:
    """The map ``x -> Ax + (alpha, 0, ..., 0)`` with A the unipotent Jordan block."""

    d: int
    alpha: Frac64

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DIM:
            raise DimensionError(f"torus dimension must be in [1, {MAX_DIM}], got {self.d}")
        if not isinstance(self.alpha, Frac64):
            object.__setattr__(self, "alpha", Frac64.from_fraction(self.alpha))

    def matrix_power(self, r: int) -> list[list[int]]:
        """Integer matrix of A^r: entry (i, j) is C(r, i - j) below the diagonal."""
        return [[math.comb(r, i - j) if i >= j else 0 for j in range(self.d)] for i in range(self.d)]


def _check_dim(m: AffineSkewMap, p: TorusPoint):
    if p.d != m.d:
        raise DimensionError(f"point has dimension {p.d}, map has dimension {m.d}")


def step(m: AffineSkewMap, p: TorusPoint) -> TorusPoint:
    _check_dim(m, p)
    prev = (m.alpha,) + p.coords[:-1]
    return TorusPoint(tuple(x + y for x, y in zip(p.coords, prev)))


def step_inverse(m: AffineSkewMap, p: TorusPoint) -> TorusPoint:
    _check_dim(m, p)
    out = list(p.coords)
    out[0] = out[0] - m.alpha
    for j in range(1, m.d):
        out[j] = p.coords[j] - out[j - 1]
    return TorusPoint(tuple(out))


@lru_cache(maxsize=4096)
def binom_mod(n: int, k: int) -> int:
    """C(n, k) mod 2**64."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k) & MASK


def _coordinate(m: AffineSkewMap, p: TorusPoint, n: int, j: int) -> int:
    # j-th coordinate (1-based) of T^n p: C(n,j) alpha + C(n,j-1) x_1 + ... + x_j
    acc = binom_mod(n, j) * m.alpha.raw
    for i in range(1, j + 1):
        acc += binom_mod(n, j - i) * p.coords[i - 1].raw
    return acc & MASK


def binomial_eval(m: AffineSkewMap, p: TorusPoint, n: int) -> Frac64:
    """Last coordinate of T^n p by the closed binomial formula."""
    _check_dim(m, p)
    if n < 0:
        raise ValueError("n must be non-negative")
    return Frac64(_coordinate(m, p, n, m.d))


def jump(m: AffineSkewMap, p: TorusPoint, n: int) -> TorusPoint:
    """T^n p for n >= 0, computed in O(d^2) exact operations."""
    _check_dim(m, p)
    if n < 0:
        raise ValueError("n must be non-negative")
    return TorusPoint.from_raws([_coordinate(m, p, n, j) for j in range(1, m.d + 1)])


def orbit_block(m: AffineSkewMap, p: TorusPoint, count: int) -> tuple[np.ndarray, TorusPoint]:
    """States ``T^i p`` for ``0 <= i < count`` as a (d, count) uint64 array, plus ``T^count p``.

    Each row is the running sum of the row above it, which is exactly what
    repeated :func:`step` computes; uint64 arithmetic wraps mod 2**64.
    """
    _check_dim(m, p)
    d = m.d
    out = np.empty((d, count), dtype=np.uint64)
    if count == 0:
        return out, p
    alpha = np.uint64(m.alpha.raw)
    prev = np.full(count, alpha, dtype=np.uint64)
    for j in range(d):
        row = out[j]
        row[0] = p.coords[j].raw
        np.cumsum(prev[:-1], out=row[1:])
        row[1:] += row[0]
        prev = row
    nxt = [(int(out[0, -1]) + m.alpha.raw) & MASK]
    nxt += [(int(out[j, -1]) + int(out[j - 1, -1])) & MASK for j in range(1, d)]
    return out, TorusPoint.from_raws(nxt)


def raw_to_phase(raw: np.ndarray) -> np.ndarray:
    """exp(2 pi i raw / 2**64), using the signed representative for accuracy near 0."""
    theta = np.asarray(raw, dtype=np.uint64).view(np.int64).astype(np.float64) * _TWO_PI_ULP
    return np.exp(1j * theta)


def phase_stream(m: AffineSkewMap, p0: TorusPoint, n0: int, count: int,
                 chunk: int = STREAM_CHUNK) -> Iterator[complex]:
    """Yield exp(2 pi i x_d(n)) for n0 <= n < n0 + count, where x(n) = T^n p0."""
    state = jump(m, p0, n0) if n0 else p0
    remaining = count
    while remaining > 0:
        size = min(chunk, remaining)
        block, state = orbit_block(m, state, size)
        yield from raw_to_phase(block[-1]).tolist()
        remaining -= size


@dataclass(frozen=True)
class PolyOrbit:
    """A phase sequence ``a_n = exp(2 pi i x_d(T^n p0))`` with exact random access."""

    map: AffineSkewMap
    p0: TorusPoint

    def __post_init__(self):
        _check_dim(self.map, self.p0)

    @classmethod
    def from_poly(cls, poly: "PolySpec") -> "PolyOrbit":
        return cls(*poly_to_initial(poly))

    def states(self, n0: int, count: int) -> np.ndarray:
        start = jump(self.map, self.p0, n0) if n0 else self.p0
        return orbit_block(self.map, start, count)[0]

    def last(self, n0: int, count: int) -> np.ndarray:
        return self.states(n0, count)[-1]

    def values(self, n0: int, count: int) -> np.ndarray:
        return raw_to_phase(self.last(n0, count))

    def dilate(self, r: int) -> "PolyOrbit":
        """Orbit whose last coordinate at time n equals this one's at time r*n.

        n -> x_d(r n) is again a degree-d integer-valued polynomial combination
        of the registers, so its forward differences mod 2**64 are exact and
        define a new skew product.
        """
        if r < 1:
            raise ValueError("dilation factor must be >= 1")
        d = self.map.d
        samples = [binomial_eval(self.map, self.p0, r * n).raw for n in range(d + 1)]
        diffs = [samples[0]]
        row = samples
        for _ in range(d):
            row = [(b - a) & MASK for a, b in zip(row, row[1:])]
            diffs.append(row[0])
        # diffs[k] = k-th forward difference at 0
        alpha = Frac64(diffs[d])
        coords = [Frac64(diffs[d - j]) for j in range(1, d + 1)]
        return PolyOrbit(AffineSkewMap(d, alpha), TorusPoint(tuple(coords)))


# ---------------------------------------------------------------------------
# high precision constants and polynomials


def _nearest_scaled_sqrt(n: int, bits: int) -> int:
    # floor(sqrt(n) * 2**bits + 1/2)
    return (math.isqrt(n << (2 * bits + 2)) + 1) >> 1


@lru_cache(maxsize=None)
def constant(name: str) -> Fraction:
    """Named irrational constants as 128-fractional-bit rationals."""
    scale = 1 << CONST_BITS
    if name == "sqrt2":
        return Fraction(_nearest_scaled_sqrt(2, CONST_BITS), scale)
    if name == "phi":
        twice = scale + math.isqrt(5 << (2 * CONST_BITS))
        return Fraction((twice + 1) >> 1, scale)
    if name in ("pi_frac", "pi-frac"):
        import mpmath

        with mpmath.workprec(CONST_BITS + 64):
            scaled = int(mpmath.floor(mpmath.pi * scale + mpmath.mpf(1) / 2))
        return Fraction(scaled - 3 * scale, scale)
    raise KeyError(f"unknown constant {name!r}")


CONSTANT_NAMES = ("sqrt2", "phi", "pi-frac")


def parse_real(text: str) -> Fraction:
    """Evaluate a small real expression exactly.

    Accepts decimal literals, the names ``sqrt2``, ``phi`` and ``pi-frac``
    (fractional part of pi), and ``+ - * /`` with parentheses.
    """
    src = text.strip().replace("pi-frac", "pi_frac")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse real expression {text!r}") from exc

    def ev(node) -> Fraction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return Fraction(ast.get_source_segment(src, node))
        if isinstance(node, ast.Name):
            try:
                return constant(node.id)
            except KeyError:
                raise ValueError(f"unknown constant {node.id!r} in {text!r}") from None
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise ValueError(f"unsupported syntax in real expression {text!r}")

    return ev(tree)


@dataclass(frozen=True)
class PolySpec:
    """P(x) = sum_j coeffs[j] x^j with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]
    source: str = ""

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient is zero")

    @classmethod
    def parse(cls, text: str) -> "PolySpec":
        """Parse ``"c_d,...,c_1,c_0"`` (highest degree first)."""
        parts = [s for s in text.split(",")]
        if any(not s.strip() for s in parts):
            raise ValueError(f"empty coefficient in {text!r}")
        coeffs = [parse_real(s) for s in parts]
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs.pop(0)
        return cls(tuple(reversed(coeffs)), source=text)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, n) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc


def forward_differences(values: Sequence) -> list:
    """[v0, dv0, d^2 v0, ...] for the leading entries of repeated differencing."""
    out = [values[0]]
    row = list(values)
    while len(row) > 1:
        row = [b - a for a, b in zip(row, row[1:])]
        out.append(row[0])
    return out


def poly_to_initial(poly: PolySpec) -> tuple[AffineSkewMap, TorusPoint]:
    """Skew product and start point whose last coordinate at time n is P(n) mod 1."""
    d = poly.degree
    if d > MAX_DIM:
        raise DimensionError(f"degree {d} exceeds the supported maximum {MAX_DIM}")
    diffs = forward_differences([poly(n) for n in range(d + 1)])
    alpha = Frac64.from_fraction(diffs[d])
    coords = tuple(Frac64.from_fraction(diffs[d - j]) for j in range(1, d + 1))
    return AffineSkewMap(d, alpha), TorusPoint(coords)
