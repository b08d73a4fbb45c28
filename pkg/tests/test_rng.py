import math

import numpy as np
import pytest
from scipy.stats import qmc

from qmcpricer import rng


def test_first_point_is_origin():
    assert np.array_equal(rng.sobol_point(0, 4), np.zeros(4))


def test_second_point_dim1():
    assert rng.sobol_point(1, 1)[0] == 0.5


def test_first_coordinate_van_der_corput():
    pts = [rng.sobol_point(i, 1)[0] for i in (1, 2, 3)]
    assert pts[0] == 0.5
    assert set(pts) == {0.5, 0.75, 0.25}


def test_block_matches_pointwise():
    block = rng.sobol_block(16, 6, start=5)
    for i in range(16):
        np.testing.assert_array_equal(block[i], rng.sobol_point(5 + i, 6))


def test_block_matches_scipy():
    # independent implementation of the same direction numbers
    d = 12
    ours = rng.sobol_block(256, d)
    ref = qmc.Sobol(d, scramble=False).random(256)
    np.testing.assert_allclose(ours, ref, atol=0.0)


def test_digital_net_stratification():
    # every dyadic interval [i/2^k, (i+1)/2^k) holds exactly one point
    for dim in (1, 2, 5, 17, 32):
        for k in range(1, 11):
            pts = rng.sobol_block(2**k, dim)
            for j in range(min(dim, 3)):
                cells = np.floor(pts[:, j] * 2**k).astype(int)
                assert sorted(cells) == list(range(2**k))


def test_points_distinct_dim1():
    pts = rng.sobol_block(2**20, 1)[:, 0]
    ints = np.round(pts * 2**32).astype(np.int64)
    assert np.unique(ints).size == 2**20


def test_unsupported_dimension():
    with pytest.raises(ValueError, match="unsupported dimension"):
        rng.sobol_point(0, rng.max_dimension() + 1)
    assert rng.max_dimension() >= 2500


def test_apply_shift():
    np.testing.assert_array_equal(
        rng.apply_shift(np.array([0.25, 0.5]), np.array([0.0, 0.0])),
        np.array([0.25, 0.5]),
    )
    np.testing.assert_allclose(rng.apply_shift(np.array([0.75]), np.array([0.5])), [0.25])


def test_shift_roundtrip():
    gen = np.random.default_rng(3)
    p = gen.random(20)
    s = gen.random(20)
    back = rng.apply_shift(rng.apply_shift(p, s), 1.0 - s)
    np.testing.assert_allclose(back, p, atol=1e-15)


def test_shift_stays_in_unit_interval():
    p = rng.sobol_block(64, 8)
    s = rng.shift_vector(0, 0, 8)
    q = rng.apply_shift(p, s)
    assert np.all(q >= 0.0) and np.all(q < 1.0)


def test_shift_vector_reproducible_and_distinct():
    a = rng.shift_vector(7, 3, 10)
    b = rng.shift_vector(7, 3, 10)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, rng.shift_vector(7, 4, 10))
    assert not np.array_equal(a, rng.shift_vector(8, 3, 10))
    assert np.all(a >= 0.0) and np.all(a < 1.0)


def _Phi(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def test_inv_normal_cdf_against_erf_oracle():
    u = np.linspace(1e-6, 1.0 - 1e-6, 10_000)
    z = rng.inv_normal_cdf(u)
    err = np.abs(np.array([_Phi(v) for v in z]) - u)
    assert err.max() <= 1e-9


def test_inv_normal_cdf_values():
    assert rng.inv_normal_cdf(0.5) == 0.0
    assert abs(rng.inv_normal_cdf(0.975) - 1.959964) < 5e-7
    assert abs(rng.inv_normal_cdf(0.00134990) - (-3.000)) < 1e-4


def test_inv_normal_cdf_monotone():
    u = np.linspace(1e-6, 1.0 - 1e-6, 10_000)
    z = rng.inv_normal_cdf(u)
    assert np.all(np.diff(z) > 0.0)


def test_inv_normal_cdf_domain():
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError, match="out of domain"):
            rng.inv_normal_cdf(bad)


def test_normal_vector_zero_at_half():
    # a point with all coordinates 0.5 maps to the zero vector
    z = rng.inv_normal_cdf(np.full(6, 0.5))
    np.testing.assert_array_equal(z, np.zeros(6))


def test_normal_block_statistics():
    shift = rng.shift_vector(11, 0, 4)
    z = rng.normal_block(2**14, shift)
    x = z[:, 0]
    assert abs(x.mean()) <= 3.0 * x.std() / 2**7
    assert abs(x.var() - 1.0) < 0.1


def test_normal_vector_matches_block():
    shift = rng.shift_vector(2, 5, 3)
    block = rng.normal_block(8, shift, start=4)
    for i in range(8):
        np.testing.assert_array_equal(rng.normal_vector(4 + i, shift, 3), block[i])
