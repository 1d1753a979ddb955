"""Short-interval and block statistics for e(P(n)) nu(n) over growing scales.

    python scripts/decay_experiment.py
    python scripts/decay_experiment.py --poly "phi,0,0" --nu liouville --top 7
"""

import argparse
import time

from skewsieve.arith import MultiplicativeSpec
from skewsieve.reduce import default_workers
from skewsieve.stats import BlockScheme, default_H, short_interval_stat, weighted_block_stat
from skewsieve.torus import PolyOrbit, PolySpec


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--poly", default="sqrt2,0,0")
    ap.add_argument("--nu", default="moebius")
    ap.add_argument("--scheme", default="sqrt")
    ap.add_argument("--top", type=int, default=6, help="largest scale is 10**top")
    ap.add_argument("--workers", type=int, default=default_workers())
    args = ap.parse_args()

    orbit = PolyOrbit.from_poly(PolySpec.parse(args.poly))
    nu = MultiplicativeSpec.parse(args.nu)
    scales = [10**e for e in range(3, args.top + 1)]
    scheme = BlockScheme.from_rule(args.scheme, scales[-1])

    print(f"{'scale':>10} {'H':>5} {'S(M,H)':>12} {'K':>7} {'W(K)':>12} {'sec':>6}")
    for M in scales:
        t0 = time.perf_counter()
        H = default_H(M)
        S = short_interval_stat(orbit, nu, M, H, workers=args.workers)
        K = scheme.K_for(M)
        W = weighted_block_stat(orbit, nu, scheme, K, workers=args.workers)
        print(f"{M:>10} {H:>5} {S:>12.6f} {K:>7} {W:>12.6f} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
