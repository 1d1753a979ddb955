import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewsieve.quasi import (Character, QuasiEig, apply_W_affine, apply_WT, apply_WTr,
                             birkhoff_average, check_tr_lemma, compose_power, ek_degree,
                             iterate_W, key_lemma_search, power_data)
from skewsieve.torus import (MOD, AffineSkewMap, DimensionError, Frac64, TorusPoint, constant,
                             jump, step)

SQRT2M1 = Frac64.from_fraction(constant("sqrt2") - 1)
freqs = st.integers(-1000, 1000)


def rnd_point(rng, d):
    return TorusPoint.from_raws([int(v) for v in rng.integers(0, 2**63, size=d) * 2])


def test_W_examples():
    m = AffineSkewMap(2, SQRT2M1)
    f = QuasiEig.character((0, 1))
    g = apply_WT(m, f)
    assert g.m == (1, 0) and g.c == Frac64(0)
    h = apply_WT(m, g)
    assert h.is_constant and h.c == SQRT2M1
    assert apply_WT(m, h) == QuasiEig((0, 0), Frac64(0))


def test_W_matches_numeric_ratio():
    rng = np.random.default_rng(1)
    m = AffineSkewMap(3, SQRT2M1)
    f = QuasiEig((2, -3, 5), Frac64(12345))
    g = apply_WT(m, f)
    for _ in range(100):
        x = rnd_point(rng, 3)
        assert abs(f(step(m, x)) / f(x) - g(x)) < 1e-12


def test_W_affine_agrees_with_jordan_shortcut():
    m = AffineSkewMap(4, Frac64(0xDEADBEEF12345))
    B, beta = power_data(m, 1)
    f = QuasiEig((3, -1, 4, 1))
    assert apply_W_affine(B, beta, f) == apply_WT(m, f) == apply_WTr(m, 1, f)


def test_power_data_is_the_iterate():
    rng = np.random.default_rng(2)
    m = AffineSkewMap(3, SQRT2M1)
    B, beta = power_data(m, 7)
    assert B == [[math.comb(7, i - j) if i >= j else 0 for j in range(3)] for i in range(3)]
    for _ in range(5):
        x = rnd_point(rng, 3)
        lin = [sum(B[i][j] * x.coords[j].raw for j in range(3)) + beta[i].raw for i in range(3)]
        assert TorusPoint.from_raws([v % MOD for v in lin]) == jump(m, x, 7)


def test_ek_degree_examples():
    for d in range(1, 7):
        m = AffineSkewMap(d, SQRT2M1)
        assert ek_degree(m, Character((0,) * (d - 1) + (1,))) == d
        assert ek_degree(m, Character((1,) + (0,) * (d - 1))) == 1
        assert ek_degree(m, Character((0,) * d)) == 0
    with pytest.raises(DimensionError):
        ek_degree(AffineSkewMap(2, SQRT2M1), Character((1, 0, 0)))


@settings(max_examples=60)
@given(st.lists(freqs, min_size=1, max_size=6))
def test_nilpotency_and_degree_decrement(mv):
    d = len(mv)
    m = AffineSkewMap(d, SQRT2M1)
    f = QuasiEig(tuple(mv))
    k = ek_degree(m, f)
    assert k <= d
    assert iterate_W(m, f, d).is_constant
    assert apply_WT(m, iterate_W(m, f, d)).m == (0,) * d
    if k > 0:
        assert ek_degree(m, apply_WT(m, f)) == k - 1


def test_tr_lemma_square_example():
    # W_{T^r}^2 of e(x_2) is the constant r^2 alpha
    m = AffineSkewMap(2, SQRT2M1)
    f = QuasiEig.character((0, 1))
    for r in (1, 2, 3, 10):
        assert iterate_W(m, f, 2, r) == QuasiEig((0, 0), SQRT2M1 * (r * r))
        assert check_tr_lemma(m, f, r, 2)


def test_tr_lemma_kmax_and_errors():
    m = AffineSkewMap(3, SQRT2M1)
    with pytest.raises(ValueError):
        check_tr_lemma(m, QuasiEig.character((0, 0, 1)), 2, kmax=2)
    with pytest.raises(ValueError):
        check_tr_lemma(m, QuasiEig.character((0, 0, 1)), 0, kmax=3)
    with pytest.raises(OverflowError):
        Character((1 << 63,))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 20), st.data())
def test_tr_lemma_random(d, r, data):
    m = AffineSkewMap(d, Frac64(data.draw(st.integers(0, MOD - 1))))
    f = QuasiEig(tuple(data.draw(st.lists(freqs, min_size=d, max_size=d))))
    assert check_tr_lemma(m, f, r, d)


def test_telescoping():
    # f o T^i = f * prod_{j<i} (W_T f) o T^j
    m = AffineSkewMap(3, SQRT2M1)
    f = QuasiEig((4, -2, 7), Frac64(99))
    g = apply_WT(m, f)
    for i in range(6):
        prod = f
        for j in range(i):
            prod = prod * compose_power(m, g, j)
        assert compose_power(m, f, i) == prod


def test_birkhoff_constant_function():
    m = AffineSkewMap(2, SQRT2M1)
    avg = birkhoff_average(m, QuasiEig((0, 0)), TorusPoint.zero(2), 1000)
    assert avg == 1


def test_birkhoff_rotation_bound():
    m = AffineSkewMap(1, SQRT2M1)
    N = 10**5
    avg = birkhoff_average(m, QuasiEig.character((1,)), TorusPoint.zero(1), N)
    assert abs(avg) <= 1 / (2 * N * SQRT2M1.norm()) + 1e-12


def test_birkhoff_skew_threshold():
    # oracle: 128-bit phases, fsum, |avg| = 0.0008479000923296328
    m = AffineSkewMap(2, SQRT2M1)
    avg = birkhoff_average(m, QuasiEig.character((0, 1)), TorusPoint.zero(2), 10**6, workers=4)
    assert abs(avg) <= 2 * 0.0008479000923296328
    assert abs(abs(avg) - 0.0008479000923296328) < 1e-9


def test_birkhoff_worker_independence():
    m = AffineSkewMap(3, SQRT2M1)
    f = QuasiEig((1, 2, 3))
    p = TorusPoint.from_raws([5, 6, 7])
    vals = {birkhoff_average(m, f, p, 300001, workers=w) for w in (1, 3, 8)}
    assert len(vals) == 1


def test_key_lemma_examples():
    gamma = Frac64(0x9E3779B97F4A7C15)  # odd raw
    for a, b in ((1, 2), (3, 7), (10, 9), (5, 1)):
        hits = key_lemma_search(gamma * a, gamma * b, 50, 0)
        assert hits == [(b, a)]
    assert key_lemma_search(Frac64(0), Frac64(0), 3, 0) == [
        (r, s) for r in range(1, 4) for s in range(1, 4) if math.gcd(r, s) == 1]
    with pytest.raises(ValueError):
        key_lemma_search(gamma, gamma, 0, 0)


def test_key_lemma_tolerance_mode():
    c1 = Frac64.from_fraction(Fraction(1, 3))
    c2 = Frac64.from_fraction(Fraction(1, 6))
    assert (1, 2) in key_lemma_search(c1, c2, 6, 1e-12)
    assert key_lemma_search(c1, c2, 6, 0) == []
