"""Regenerate the committed regression fixtures in tests/fixtures/ from the slow reference paths.

    python scripts/make_fixtures.py            # fixtures only
    python scripts/make_fixtures.py --values   # also print frozen scalar values used by the tests
"""

import argparse
import gzip
import math
from pathlib import Path

import mpmath
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from skewsieve import oracles
from skewsieve.arith import MultiplicativeSpec
from skewsieve.cli import render_csv
from skewsieve.config import ExperimentConfig
from skewsieve.stats import BlockScheme, default_H, weighted_terms
from skewsieve.torus import PolyOrbit, PolySpec, constant

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def sieve_fixture():
    cfg = ExperimentConfig(kind="sieve", nu="moebius", lo=1, hi=10**6)
    mu, _ = oracles.trial_division_table(10**6)
    text, _ = render_csv(cfg, ["n", "value"], zip(range(1, 10**6), mu.tolist()))
    with gzip.GzipFile(FIXTURES / "sieve_moebius_1e6.csv.gz", "wb", mtime=0) as fh:
        fh.write(text.encode())


def short_interval_fixture():
    Ms = (10**4, 10**5, 10**6)
    cfg = ExperimentConfig(kind="short-interval", poly="sqrt2,0,0", nu="moebius", M=Ms)
    orbit = PolyOrbit.from_poly(PolySpec.parse(cfg.poly))
    nu = MultiplicativeSpec.moebius()
    rows = []
    for M in Ms:
        H = default_H(M)
        z = weighted_terms(orbit, nu, M, 2 * M + H - 1)
        # every window summed from scratch
        windows = sliding_window_view(z, H).sum(axis=1)[:M]
        rows.append((M, H, math.fsum(np.abs(windows).tolist()) / H / M))
    text, _ = render_csv(cfg, ["M", "H", "S"], rows)
    (FIXTURES / "short_interval_decay.csv").write_text(text)


def block_stat_fixture():
    ends = (10**4, 10**5, 10**6)
    cfg = ExperimentConfig(kind="block-stat", poly="sqrt2,0,0", nu="moebius", scheme="sqrt", ends=ends)
    orbit = PolyOrbit.from_poly(PolySpec.parse(cfg.poly))
    nu = MultiplicativeSpec.moebius()
    scheme = BlockScheme.from_rule("sqrt", max(ends))
    z = weighted_terms(orbit, nu, 1, scheme.boundaries[-1])
    b = scheme.boundaries
    rows = []
    for e in ends:
        K = scheme.K_for(e)
        # two passes: block sums first, then their moduli
        sums = [complex(np.sum(z[b[k] - 1:b[k + 1] - 1])) for k in range(K)]
        rows.append((K, math.fsum(abs(s) for s in sums) / b[K]))
    text, _ = render_csv(cfg, ["K", "W"], rows)
    (FIXTURES / "block_stat_decay.csv").write_text(text)


def frozen_values():
    mpmath.mp.prec = 256
    scale = mpmath.mpf(2) ** 128
    for name, val in (("sqrt2", mpmath.sqrt(2)), ("phi", (1 + mpmath.sqrt(5)) / 2),
                      ("pi-frac", mpmath.pi - 3)):
        print(name, int(mpmath.floor(val * scale + mpmath.mpf(1) / 2)))
    # Birkhoff average of x -> e(x_2) from the origin, alpha = sqrt2 - 1, 128-bit phases
    a = constant("sqrt2") - 1
    num, mod = a.numerator * (1 << 128) // a.denominator, 1 << 128
    re, im = [], []
    N = 10**6
    for n in range(N):
        v = (n * (n - 1) // 2 * num) % mod
        theta = 2 * math.pi * (v / mod)
        re.append(math.cos(theta))
        im.append(math.sin(theta))
    print("birkhoff d=2 m=(0,1):", abs(complex(math.fsum(re), math.fsum(im))) / N)
    # correlation of a_n = e(sqrt2 n^2) at (r, s) = (2, 3), N = 1e5
    s2 = constant("sqrt2")
    s2num = s2.numerator * (1 << 128) // s2.denominator
    re, im = [], []
    N = 10**5
    for n in range(1, N + 1):
        v = (s2num * ((2 * n) ** 2 - (3 * n) ** 2)) % mod
        theta = 2 * math.pi * (v / mod)
        re.append(math.cos(theta))
        im.append(math.sin(theta))
    print("kbsz sqrt2 n^2 (2,3):", abs(complex(math.fsum(re), math.fsum(im))) / N)
    mu, lam = oracles.trial_division_table(10**6 + 1)
    print("mertens 1e6:", int(mu.sum(dtype=np.int64)), "liouville 1e6:", int(lam.sum(dtype=np.int64)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--values", action="store_true")
    args = ap.parse_args()
    FIXTURES.mkdir(parents=True, exist_ok=True)
    sieve_fixture()
    short_interval_fixture()
    block_stat_fixture()
    if args.values:
        frozen_values()


if __name__ == "__main__":
    main()
