"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import csv
import gzip
import math
import time
from fractions import Fraction

import numpy as np

from skewsieve import oracles
from skewsieve.arith import MultiplicativeSpec, eval_range, mertens
from skewsieve.cli import main
from skewsieve.models import SwitchedOrbit, aligned_seeds, invariance_defect, switched_average
from skewsieve.quasi import Character, QuasiEig, check_tr_lemma, ek_degree, key_lemma_search
from skewsieve.reduce import default_workers
from skewsieve.stats import (BlockScheme, default_H, kbsz_correlation, short_interval_stat,
                             weighted_block_stat, weighted_terms)
from skewsieve.torus import (MOD, AffineSkewMap, Frac64, PolyOrbit, PolySpec, TorusPoint,
                             binomial_eval, constant, orbit_block, phase_stream, raw_to_phase)

MU = MultiplicativeSpec.moebius()
LAM = MultiplicativeSpec.liouville()
SQRT2_SQ = PolySpec.parse("sqrt2,0,0")


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(ln for ln in fh if not ln.startswith("#")))


def test_1_sieve_oracle(criterion):
    with criterion("1 sieve oracle equivalence") as c:
        t0 = time.perf_counter()
        mu_ref, lam_ref = oracles.trial_division_table(10**6 + 1)
        mu = eval_range(MU, 1, 10**6 + 1, workers=default_workers())
        lam = eval_range(LAM, 1, 10**6 + 1, workers=default_workers())
        assert np.array_equal(mu, mu_ref), "mu differs from trial division"
        assert np.array_equal(lam, lam_ref), "lambda differs from trial division"
        ref = np.cumsum(mu_ref, dtype=np.int64)
        for N in (10**3, 10**4, 10**5, 10**6):
            assert mertens(N) == ref[N - 1], f"M({N})"
        assert mertens(10**6) == 212
        elapsed = time.perf_counter() - t0
        c.note(f"{elapsed:.1f}s")
        assert elapsed <= 10, f"runtime {elapsed:.1f}s > 10s"


def test_2_orbit_formula(criterion):
    with criterion("2 orbit/formula exactness") as c:
        t0 = time.perf_counter()
        rng = np.random.default_rng(2)
        count = 10**5 + 1
        for d in range(1, 6):
            # dyadic data with 40 significant bits
            alpha = Frac64(int(rng.integers(0, 2**40)) << 24)
            p = TorusPoint.from_raws([int(v) << 24 for v in rng.integers(0, 2**40, size=d)])
            m = AffineSkewMap(d, alpha)
            states, _ = orbit_block(m, p, count)
            last = states[-1].tolist()
            for n in range(count):
                assert last[n] == binomial_eval(m, p, n).raw, f"d={d} n={n}"
            phases = np.fromiter(phase_stream(m, p, 0, count), dtype=np.complex128, count=count)
            assert np.array_equal(phases, raw_to_phase(states[-1]))
        elapsed = time.perf_counter() - t0
        c.note(f"{elapsed:.1f}s")
        assert elapsed <= 5, f"runtime {elapsed:.1f}s > 5s"


def _stream_fractions(poly, count):
    return [Fraction(int(v), MOD) for v in PolyOrbit.from_poly(poly).last(0, count)]


def test_3_poly_to_initial(criterion):
    with criterion("3 poly_to_initial correctness") as c:
        beta = Fraction(12345, 1 << 40)
        got = _stream_fractions(PolySpec((0, 0, beta)), 10**4 + 1)
        assert all(got[n] == (beta * n * n) % 1 for n in range(10**4 + 1)), "beta n^2"
        c.note("dyadic beta n^2 exact")

        rng = np.random.default_rng(3)
        states = PolyOrbit.from_poly(SQRT2_SQ).last(0, 10**6 + 1)
        worst = 0.0
        for n in rng.integers(2, 10**6 + 1, size=1000).tolist():
            err = oracles.circle_distance(Fraction(int(states[n]), MOD),
                                          oracles.poly_phase_128(SQRT2_SQ.coeffs, n))
            bound = Fraction(math.comb(n, 2) * 3, 1 << 63)
            assert err <= bound, f"sqrt2 n^2 at n={n}"
            worst = max(worst, float(err / bound))
        c.note(f"sqrt2 n^2 within bound (worst {worst:.3f} of it)")

        cube = PolySpec((0, 0, 0, Fraction(1, 7)))
        got = _stream_fractions(cube, 10**4 + 1)
        bad = [n for n in range(10**4 + 1) if got[n] != Fraction(n**3, 7) % 1]
        c.note(f"n^3/7: {len(bad)} of {10**4 + 1} values differ from the rational oracle")
        assert not bad, f"n^3/7 not exact, first n={bad[0]}"


def test_4_quasi_calculus(criterion):
    with criterion("4 quasi calculus") as c:
        rng = np.random.default_rng(4)
        checks = 0
        for d in range(1, 5):
            m = AffineSkewMap(d, Frac64(int(rng.integers(0, 2**63)) * 2 + 1))
            chars = rng.integers(-10**6, 10**6, size=(1000, d)).tolist()
            for r in range(1, 21):
                for ch in chars:
                    assert check_tr_lemma(m, QuasiEig(tuple(ch)), r, d), (d, r, ch)
                    checks += 1
        c.note(f"{checks} Tr checks")
        for d in range(1, 7):
            assert ek_degree(AffineSkewMap(d, Frac64(1)), Character((0,) * (d - 1) + (1,))) == d
        gamma = Frac64.from_fraction(constant("sqrt2") - 1)
        cases = 0
        for a in range(1, 11):
            for b in range(1, 11):
                if math.gcd(a, b) == 1:
                    hits = key_lemma_search(gamma * a, gamma * b, 50, 0)
                    assert hits == [(b, a)], (a, b, hits)
                    cases += 1
        c.note(f"{cases} key-lemma cases")


def test_5_kbsz_rotation(criterion):
    with criterion("5 KBSZ rotation bound") as c:
        t0 = time.perf_counter()
        raw = (math.isqrt(5 << 128) - (1 << 64)) // 2
        seq = PolyOrbit.from_poly(PolySpec((0, Fraction(raw, MOD))))
        N = 10**5
        primes = [p for p in range(2, 51) if all(p % q for q in range(2, p))]
        pairs = [(r, s) for r in primes for s in primes if r < s]
        worst = 0.0
        for r, s in pairs:
            corr = kbsz_correlation(seq, r, s, N, workers=default_workers())
            assert abs(corr) <= oracles.rotation_bound(raw, r, s, N) + 1e-12, (r, s)
            gap = abs(corr - oracles.rotation_correlation(raw, r, s, N))
            assert gap <= 1e-9, (r, s, gap)
            worst = max(worst, gap)
        elapsed = time.perf_counter() - t0
        c.note(f"{len(pairs)} pairs, max closed-form gap {worst:.1e}, {elapsed:.1f}s")
        assert elapsed <= 30


def test_6_sliding_window(criterion):
    with criterion("6 sliding-window equivalence") as c:
        orbit = PolyOrbit.from_poly(SQRT2_SQ)
        Ms = (1000, 2500, 5000, 7500, 10000)
        Hs = (1, 10, 50, 120, 200)
        worst = 0.0
        for nu in (MU, MultiplicativeSpec.random_unimodular(2 * max(Ms) + max(Hs), seed=6)):
            for M in Ms:
                for H in Hs:
                    z = weighted_terms(orbit, nu, M, 2 * M + H - 1)
                    gap = abs(short_interval_stat(orbit, nu, M, H) - oracles.naive_window_stat(z, M, H))
                    assert gap <= 1e-9, (str(nu), M, H, gap)
                    worst = max(worst, gap)
        c.note(f"max gap {worst:.1e}")


def test_7_decay_trend(criterion, fixtures_dir):
    with criterion("7 short-interval decay") as c:
        t0 = time.perf_counter()
        fixture = read_rows(fixtures_dir / "short_interval_decay.csv")
        vals = []
        for row in fixture:
            M = int(row["M"])
            H = default_H(M)
            assert H == int(row["H"])
            S = short_interval_stat(SQRT2_SQ, MU, M, H, workers=default_workers())
            assert abs(S - float(row["S"])) <= 1e-9, (M, S, row["S"])
            vals.append(S)
        assert [int(r["M"]) for r in fixture] == [10**4, 10**5, 10**6]
        assert vals[0] > vals[1] > vals[2], vals
        elapsed = time.perf_counter() - t0
        c.note(" > ".join(f"{v:.4f}" for v in vals) + f", {elapsed:.1f}s")
        assert elapsed <= 60


def test_8_block_statistic(criterion, fixtures_dir):
    with criterion("8 block statistic") as c:
        ends = (10**4, 10**5, 10**6)
        scheme = BlockScheme.from_rule("sqrt", max(ends))
        m, base = PolyOrbit.from_poly(SQRT2_SQ).map, PolyOrbit.from_poly(SQRT2_SQ).p0
        orbit = PolyOrbit(m, base)
        fixture = read_rows(fixtures_dir / "block_stat_decay.csv")
        vals = []
        for e, row in zip(ends, fixture):
            K = scheme.K_for(e)
            assert K == int(row["K"])
            W = weighted_block_stat(orbit, MU, scheme, K, workers=default_workers())
            assert abs(W - float(row["W"])) <= 1e-9, (K, W, row["W"])
            switched = SwitchedOrbit(m, scheme, tuple(aligned_seeds(m, base, scheme, MU, K)))
            avg = switched_average(switched, MU, K)
            assert abs(avg - W) <= 1e-9, (K, avg, W)
            vals.append(W)
        assert vals[0] > vals[1] > vals[2], vals
        c.note(" > ".join(f"{v:.4f}" for v in vals))


def test_9_model_defect(criterion):
    with criterion("9 model defect") as c:
        blocks = BlockScheme.from_rule("isqrt", 10**5)
        defects = [invariance_defect(blocks, N) for N in (10**3, 10**4, 10**5)]
        assert defects[0] > defects[1] > defects[2], defects
        m, p = PolyOrbit.from_poly(SQRT2_SQ).map, PolyOrbit.from_poly(SQRT2_SQ).p0
        count = 10**5 + 1
        sw = SwitchedOrbit(m, blocks, (p,) * len(blocks))
        plain = PolyOrbit(m, p)
        assert np.array_equal(sw.states(0, count), plain.states(0, count))
        assert np.array_equal(sw.values(0, count), plain.values(0, count))
        c.note(" > ".join(f"{v:.4f}" for v in defects))


CLI_RUNS = {
    "sieve-mu": ["sieve", "--to", "3e5"],
    "sieve-unimodular": ["sieve", "--kind", "unimodular:1:70000", "--to", "7e4"],
    "phase": ["phase", "--poly", "sqrt2,phi,1/3,0", "--from", "1000", "--count", "2e5"],
    "quasi-tr": ["quasi", "--check", "tr-lemma", "--d", "4", "--r-max", "20"],
    "quasi-birkhoff": ["quasi", "--birkhoff", "--freq", "0,1", "--N", "3e5"],
    "kbsz": ["kbsz", "--poly", "sqrt2,0,0", "--primes-up-to", "20", "--N", "5e4"],
    "short-interval": ["short-interval", "--poly", "sqrt2,0,0", "--M", "1e4,1e5,2e5"],
    "short-interval-unimodular": ["short-interval", "--poly", "phi,0,0", "--nu", "unimodular:2:21000",
                                  "--M", "1e4", "--H", "30"],
    "block-stat": ["block-stat", "--ends", "1e4,1e5,3e5"],
    "switched": ["switched", "--ends", "1e5"],
    "switched-aligned": ["switched", "--align", "--ends", "1e5"],
    "selftest": ["selftest"],
}


def test_10_determinism(criterion, tmp_path):
    with criterion("10 determinism across workers") as c:
        counts = sorted({1, 4, default_workers()})
        for name, args in CLI_RUNS.items():
            outputs = []
            for w in counts:
                out = tmp_path / f"{name}-{w}.csv"
                assert main([*args, "--workers", str(w), "--out", str(out)]) == 0, name
                outputs.append(out.read_bytes())
            assert all(o == outputs[0] for o in outputs), f"{name} differs across workers"
        c.note(f"{len(CLI_RUNS)} experiments, workers {counts}")
