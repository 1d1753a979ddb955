"""Quick consistency checks behind the ``selftest`` subcommand."""

from __future__ import annotations

import numpy as np

from . import arith, oracles, quasi, stats, torus


def _sieve():
    mu, lam = oracles.trial_division_table(20000)
    ok_mu = np.array_equal(arith.sieve_moebius(1, 20000).values, mu)
    spec = arith.MultiplicativeSpec.liouville()
    return ok_mu and np.array_equal(arith.eval_multiplicative(spec, 1, 20000).values, lam)


def _orbit():
    m = torus.AffineSkewMap(3, torus.Frac64(0x9E3779B97F4A7C15))
    p = torus.TorusPoint.from_raws([1 << 60, 3 << 61, 5 << 59])
    states = torus.PolyOrbit(m, p).last(0, 2000)
    return all(int(states[n]) == torus.binomial_eval(m, p, n).raw for n in range(0, 2000, 7))


def _tr_lemma():
    m = torus.AffineSkewMap(4, torus.Frac64.from_fraction(torus.constant("sqrt2")))
    chars = [quasi.QuasiEig.character(v) for v in ((0, 0, 0, 1), (1, 2, 3, 4), (0, -5, 2, 0))]
    return all(quasi.check_tr_lemma(m, f, r, 4) for f in chars for r in range(1, 8))


def _kbsz():
    alpha = torus.Frac64.from_fraction(torus.constant("phi") - 1)
    orbit = torus.PolyOrbit.from_poly(torus.PolySpec((0, alpha.as_fraction())))
    c = stats.kbsz_correlation(orbit, 3, 7, 5000)
    return abs(c - oracles.rotation_correlation(alpha.raw, 3, 7, 5000)) < 1e-9


def _window():
    nu = arith.MultiplicativeSpec.moebius()
    orbit = torus.PolyOrbit.from_poly(torus.PolySpec.parse("sqrt2,0,0"))
    M, H = 300, 17
    z = stats.weighted_terms(orbit, nu, M, 2 * M + H - 1)
    return abs(stats.short_interval_stat(orbit, nu, M, H) - oracles.naive_window_stat(z, M, H)) < 1e-9


CHECKS = [
    ("sieve-vs-trial-division", _sieve),
    ("orbit-vs-binomial-formula", _orbit),
    ("tr-lemma", _tr_lemma),
    ("kbsz-rotation-closed-form", _kbsz),
    ("sliding-window-vs-naive", _window),
]


def run_checks():
    return [(name, bool(fn())) for name, fn in CHECKS]
