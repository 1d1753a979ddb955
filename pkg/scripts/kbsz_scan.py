"""Largest prime-pair correlation |(1/N) sum a_{rn} conj(a_{sn})| as primes grow.

Compares a rotation, a quadratic phase and a cubic phase; the rotation row
also shows the geometric-series bound 1 / (2 N ||(r-s) alpha||).

    python scripts/kbsz_scan.py --N 1e5 --pmax 100
"""

import argparse

from skewsieve import oracles
from skewsieve.arith import primes_upto
from skewsieve.config import parse_int
from skewsieve.reduce import default_workers
from skewsieve.stats import kbsz_correlation
from skewsieve.torus import Frac64, PolyOrbit, PolySpec, constant

POLYS = {
    "rotation": None,
    "sqrt2 n^2": "sqrt2,0,0",
    "phi n^3 + n/3": "phi,0,1/3,0",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--N", default="1e5")
    ap.add_argument("--pmax", type=int, default=60)
    ap.add_argument("--workers", type=int, default=default_workers())
    args = ap.parse_args()
    N = parse_int(args.N)

    alpha = Frac64.from_fraction(constant("phi") - 1)
    primes = primes_upto(args.pmax).tolist()
    for name, text in POLYS.items():
        poly = PolySpec((0, alpha.as_fraction())) if text is None else PolySpec.parse(text)
        seq = PolyOrbit.from_poly(poly)
        print(f"# {name}")
        # window of primes [lo, pmax]; the maximum should shrink as lo grows
        for lo in primes[::max(1, len(primes) // 4)]:
            window = [p for p in primes if p >= lo]
            best, arg = 0.0, None
            for i, r in enumerate(window):
                for s in window[i + 1:]:
                    c = abs(kbsz_correlation(seq, r, s, N, workers=args.workers))
                    if c > best:
                        best, arg = c, (r, s)
            if arg is None:
                continue
            line = f"  primes >= {lo:>3}: max |C| = {best:.3e} at {arg}"
            if text is None:
                line += f"  (bound {oracles.rotation_bound(alpha.raw, *arg, N):.3e})"
            print(line)


if __name__ == "__main__":
    main()
