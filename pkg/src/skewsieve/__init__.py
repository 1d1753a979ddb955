"""Exact skew-product phase sequences, multiplicative sieves and their correlation statistics."""

from .arith import MultiplicativeSpec, eval_multiplicative, mertens, sieve_moebius
from .torus import AffineSkewMap, Frac64, PolyOrbit, PolySpec, TorusPoint, poly_to_initial

__version__ = "0.1.0"

__all__ = [
    "AffineSkewMap",
    "Frac64",
    "MultiplicativeSpec",
    "PolyOrbit",
    "PolySpec",
    "TorusPoint",
    "eval_multiplicative",
    "mertens",
    "poly_to_initial",
    "sieve_moebius",
]
