import numpy as np
import pytest

from skewsieve.arith import MultiplicativeSpec
from skewsieve.models import (MissingSeed, SwitchedOrbit, aligned_seeds, invariance_defect,
                              rotation_to_real, switched_average, switched_stream)
from skewsieve.stats import BlockScheme, ParameterError, block_sums, weighted_block_stat
from skewsieve.torus import (Frac64, PolyOrbit, PolySpec, TorusPoint, jump,
                             phase_stream, poly_to_initial)

MU = MultiplicativeSpec.moebius()


def setup(limit=5000):
    m, p = poly_to_initial(PolySpec.parse("sqrt2,0,0"))
    return m, p, BlockScheme.from_rule("sqrt", limit)


def test_equal_seeds_reproduce_plain_stream():
    m, p, blocks = setup(3000)
    orbit = SwitchedOrbit(m, blocks, [p] * len(blocks))
    assert list(switched_stream(orbit, 3000)) == list(phase_stream(m, p, 0, 3000))


def test_switched_states_follow_each_seed():
    m, p, _ = setup()
    blocks = BlockScheme.explicit([1, 4, 9])
    seeds = [TorusPoint.from_raws([k, 10 * k]) for k in (1, 2, 3)]
    orbit = SwitchedOrbit(m, blocks, seeds)
    st = orbit.states(0, 12)
    for n in range(12):
        k = blocks.block_of(n)
        assert tuple(int(v) for v in st[:, n]) == jump(m, seeds[k - 1], n).raws


def test_missing_seed():
    m, p, blocks = setup()
    orbit = SwitchedOrbit(m, blocks, [p, p])
    with pytest.raises(MissingSeed):
        orbit.values(0, 10)


def test_rotation_to_real():
    assert rotation_to_real(0) == Frac64(0)
    for s in (1 + 1j, -2, -3j, 0.5 - 0.1j):
        t = rotation_to_real(s)
        rotated = t.phase() * s
        assert abs(rotated.imag) < 1e-12 and rotated.real > 0


def test_aligned_seeds_give_absolute_statistic():
    m, p, blocks = setup(20000)
    K = blocks.K_for(20000)
    seeds = aligned_seeds(m, p, blocks, MU, K)
    orbit = SwitchedOrbit(m, blocks, seeds)
    sums = block_sums(orbit, MU, blocks, K)
    assert np.all(np.abs(sums.imag) < 1e-9)
    assert np.all(sums.real >= -1e-12)
    avg = switched_average(orbit, MU, K)
    assert abs(avg - weighted_block_stat(PolyOrbit(m, p), MU, blocks, K)) < 1e-9


def test_invariance_defect():
    blocks = BlockScheme.from_rule("isqrt", 10**5)
    d = [invariance_defect(blocks, N) for N in (10**3, 10**4, 10**5)]
    assert d[0] > d[1] > d[2]
    # b_k <= N for k up to about (3N/2)^(2/3)
    assert abs(d[2] - 2 * 1.5 ** (2 / 3) * 10 ** (10 / 3) / 10**5) < 0.01
    assert invariance_defect(BlockScheme.explicit([1, 2, 3]), 3) == 2
    with pytest.raises(ParameterError):
        invariance_defect(blocks, 0)
    with pytest.raises(ParameterError):
        invariance_defect(BlockScheme.from_rule("isqrt", 100), 10**4)
