import math

import numpy as np
import pytest

from qmcpricer import transforms as tr


def brownian_cov(n, T):
    j = np.arange(1, n + 1)
    return (T / n) * np.minimum.outer(j, j)


def test_householder_identity_target():
    refl = tr.householder_from_target(np.array([1.0, 0.0, 0.0]))
    assert refl.is_identity
    x = np.array([0.3, -1.2, 2.0])
    np.testing.assert_array_equal(refl.apply(x), x)


def test_householder_maps_e1():
    refl = tr.householder_from_target(np.array([3.0, 4.0]))
    e1 = np.array([1.0, 0.0])
    np.testing.assert_allclose(refl.apply(e1), [0.6, 0.8], atol=1e-12)


def test_householder_negative_axis():
    refl = tr.householder_from_target(np.array([-1.0, 0.0, 0.0]))
    np.testing.assert_allclose(refl.apply(np.array([1.0, 0.0, 0.0])), [-1.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(refl.apply(np.array([0.0, 1.0, 0.0])), [0.0, 1.0, 0.0], atol=1e-15)


def test_householder_involution_of_example():
    refl = tr.householder_from_target(np.array([3.0, 4.0]))
    np.testing.assert_allclose(refl.apply(np.array([0.6, 0.8])), [1.0, 0.0], atol=1e-12)


def test_householder_reflects_its_normal():
    v = np.array([0.0, 1.0, -2.0, 0.5])
    refl = tr.HouseholderReflection(v.copy(), offset=1)
    np.testing.assert_allclose(refl.apply(v), -v, atol=1e-12)


def test_householder_fixes_orthogonal_complement():
    v = np.array([1.0, 1.0, 0.0])
    refl = tr.HouseholderReflection(v, offset=1)
    x = np.array([1.0, -1.0, 3.0])  # orthogonal to v
    np.testing.assert_allclose(refl.apply(x), x, atol=1e-14)


def test_householder_norm_and_involution_random():
    gen = np.random.default_rng(0)
    a = gen.standard_normal(12)
    refl = tr.householder_from_target(a)
    for _ in range(100):
        x = gen.standard_normal(12)
        y = refl.apply(x)
        assert abs(np.linalg.norm(y) - np.linalg.norm(x)) <= 1e-12 * np.linalg.norm(x)
        np.testing.assert_allclose(refl.apply(y), x, atol=1e-12)


def test_householder_offset_support():
    a = np.array([0.0, 0.0, 3.0, 4.0])
    refl = tr.householder_from_target(a, k=3)
    e3 = np.array([0.0, 0.0, 1.0, 0.0])
    np.testing.assert_allclose(refl.apply(e3), a / 5.0, atol=1e-12)
    # coordinates before the offset untouched
    x = np.array([1.0, -2.0, 0.3, 0.7])
    y = refl.apply(x)
    np.testing.assert_array_equal(y[:2], x[:2])


def test_householder_target_not_in_subspace():
    with pytest.raises(ValueError, match="target not in subspace"):
        tr.householder_from_target(np.array([0.5, 1.0, 2.0]), k=2)


def test_householder_zero_target_is_identity():
    refl = tr.householder_from_target(np.zeros(4))
    assert refl.is_identity


def test_apply_dimension_mismatch():
    refl = tr.householder_from_target(np.array([3.0, 4.0]))
    with pytest.raises(ValueError, match="dimension mismatch"):
        refl.apply(np.ones(3))


def test_apply_householder_batch():
    gen = np.random.default_rng(1)
    refl = tr.householder_from_target(gen.standard_normal(6))
    X = gen.standard_normal((40, 6))
    batch = refl.apply(X)
    for i in range(40):
        np.testing.assert_allclose(batch[i], refl.apply(X[i]), atol=1e-14)


def test_chain_product_order_and_orthogonality():
    gen = np.random.default_rng(2)
    r1 = tr.householder_from_target(gen.standard_normal(5))
    r2 = tr.householder_from_target(np.concatenate([[0.0], gen.standard_normal(4)]), k=2)
    chain = tr.TransformChain([r1, r2])
    U = chain.materialize(5)
    np.testing.assert_allclose(U.T @ U, np.eye(5), atol=1e-12)
    x = gen.standard_normal(5)
    # product U1 U2 applies the rightmost factor first
    np.testing.assert_allclose(chain.apply(x), r1.apply(r2.apply(x)), atol=1e-14)
    np.testing.assert_allclose(chain.apply_t(chain.apply(x)), x, atol=1e-12)


def test_complete_canonical_columns_is_identity():
    cols = [np.eye(4)[:, j] for j in range(3)]
    chain = tr.complete_first_k_columns(cols)
    np.testing.assert_allclose(chain.materialize(4), np.eye(4), atol=1e-14)


def test_complete_single_swap_column():
    chain = tr.complete_first_k_columns([np.array([0.0, 1.0])])
    U = chain.materialize(2)
    np.testing.assert_allclose(U[:, 0], [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(U.T @ U, np.eye(2), atol=1e-14)


def test_complete_random_orthogonal_columns():
    gen = np.random.default_rng(3)
    Q, _ = np.linalg.qr(gen.standard_normal((4, 4)))
    chain = tr.complete_first_k_columns([Q[:, 0], Q[:, 1]])
    U = chain.materialize(4)
    np.testing.assert_allclose(U[:, :2], Q[:, :2], atol=1e-12)
    np.testing.assert_allclose(U.T @ U, np.eye(4), atol=1e-10)


def test_complete_rejects_non_orthonormal():
    with pytest.raises(ValueError, match="orthonormal"):
        tr.complete_first_k_columns([np.array([1.0, 1.0]) / math.sqrt(2.0), np.array([1.0, 0.0])])


def test_complete_larger_set():
    gen = np.random.default_rng(4)
    Q, _ = np.linalg.qr(gen.standard_normal((24, 24)))
    cols = [Q[:, j] for j in range(8)]
    chain = tr.complete_first_k_columns(cols)
    U = chain.materialize(24)
    np.testing.assert_allclose(U[:, :8], Q[:, :8], atol=1e-10)
    np.testing.assert_allclose(U.T @ U, np.eye(24), atol=1e-10)


def test_construct_path_n1_any_method():
    x = np.array([0.7])
    for method in ("forward", "brownian_bridge", "pca"):
        c = tr.path_construction(method, 1, 4.0)
        np.testing.assert_allclose(tr.construct_path(c, x), [2.0 * 0.7], atol=1e-14)


def test_forward_example():
    c = tr.ForwardConstruction(2, 1.0)
    np.testing.assert_allclose(
        c.apply(np.array([1.0, 1.0])), [1.0 / math.sqrt(2.0), 2.0 / math.sqrt(2.0)], atol=1e-14
    )


def test_pca_example_covariance():
    c = tr.PcaConstruction(2, 1.0)
    A = tr.construction_matrix(c)
    np.testing.assert_allclose(A @ A.T, [[0.5, 0.5], [0.5, 1.0]], atol=1e-12)


def test_all_constructions_match_covariance():
    for n in (2, 7, 64, 128):
        Sigma = brownian_cov(n, 1.5)
        for method in ("forward", "brownian_bridge", "pca"):
            c = tr.path_construction(method, n, 1.5)
            A = tr.construction_matrix(c)
            assert np.abs(A @ A.T - Sigma).max() <= 1e-9, (method, n)


def test_pca_factors_against_eigh():
    n = 16
    Sigma = brownian_cov(n, 2.0)
    lam, vecs = tr.pca_factors(n, 2.0)
    ref = np.linalg.eigvalsh(Sigma)[::-1]
    np.testing.assert_allclose(lam, ref, rtol=1e-12)
    np.testing.assert_allclose(vecs @ np.diag(lam) @ vecs.T, Sigma, atol=1e-12)
    assert np.all(np.diff(lam) < 0.0)


def test_bridge_terminal_uses_first_normal():
    c = tr.BrownianBridgeConstruction(8, 2.0)
    x = np.zeros(8)
    x[0] = 1.3
    path = c.apply(x)
    assert abs(path[-1] - math.sqrt(2.0) * 1.3) < 1e-14


def test_bridge_handles_non_power_of_two():
    for n in (3, 5, 250):
        c = tr.BrownianBridgeConstruction(n, 1.0)
        A = tr.construction_matrix(c)
        assert np.abs(A @ A.T - brownian_cov(n, 1.0)).max() <= 1e-9


def test_chain_construction_identity_equals_forward():
    c = tr.ChainConstruction(tr.TransformChain(), 5, 1.0)
    f = tr.ForwardConstruction(5, 1.0)
    x = np.random.default_rng(5).standard_normal(5)
    np.testing.assert_array_equal(c.apply(x), f.apply(x))


def test_chain_construction_covariance_preserved():
    gen = np.random.default_rng(6)
    chain = tr.TransformChain([tr.householder_from_target(gen.standard_normal(7))])
    c = tr.ChainConstruction(chain, 7, 1.0)
    A = tr.construction_matrix(c)
    assert np.abs(A @ A.T - brownian_cov(7, 1.0)).max() <= 1e-9


def test_path_construction_unknown_method():
    with pytest.raises(ValueError, match="unknown construction"):
        tr.path_construction("haar", 4, 1.0)
    with pytest.raises(ValueError, match="chain"):
        tr.path_construction("chain", 4, 1.0)


# --- basket -----------------------------------------------------------------


def _basket_spec(m, n, rho, vols, T=1.0):
    corr = np.full((m, m), rho)
    np.fill_diagonal(corr, 1.0)
    return tr.BasketCovSpec(m=m, n=n, T=T, vols=np.asarray(vols, dtype=float), corr=corr)


def test_basket_single_asset_reduces_to_pca():
    spec = _basket_spec(1, 4, 0.0, [0.3])
    x = np.random.default_rng(7).standard_normal(4)
    single = 0.3 * tr.PcaConstruction(4, 1.0).apply(x)
    np.testing.assert_allclose(tr.basket_construct(spec, x), single, atol=1e-12)


def test_basket_zero_correlation_block_diagonal():
    spec = _basket_spec(2, 2, 0.0, [0.1, 0.3])
    C = tr.construction_matrix(tr.BasketPcaConstruction(spec))
    cov = C @ C.T
    Sigma = brownian_cov(2, 1.0)
    np.testing.assert_allclose(cov[:2, :2], 0.01 * Sigma, atol=1e-12)
    np.testing.assert_allclose(cov[2:, 2:], 0.09 * Sigma, atol=1e-12)
    np.testing.assert_allclose(cov[:2, 2:], 0.0, atol=1e-12)


def test_basket_constructions_match_kronecker_covariance():
    spec = _basket_spec(2, 2, 0.05, [0.1, 0.3])
    target = np.kron(spec.R(), brownian_cov(2, 1.0))
    for cls in (
        tr.BasketPcaConstruction,
        tr.BasketForwardConstruction,
        tr.BasketBridgeConstruction,
    ):
        C = tr.construction_matrix(cls(spec))
        assert np.abs(C @ C.T - target).max() <= 1e-10, cls.__name__


def test_basket_larger_covariance():
    spec = _basket_spec(4, 8, 0.2, [0.1, 0.15, 0.2, 0.3], T=2.0)
    target = np.kron(spec.R(), brownian_cov(8, 2.0))
    for cls in (
        tr.BasketPcaConstruction,
        tr.BasketForwardConstruction,
        tr.BasketBridgeConstruction,
    ):
        C = tr.construction_matrix(cls(spec))
        assert np.abs(C @ C.T - target).max() <= 1e-8, cls.__name__


def test_basket_chain_construction_covariance():
    spec = _basket_spec(2, 3, 0.1, [0.2, 0.25])
    gen = np.random.default_rng(8)
    chain = tr.TransformChain([tr.householder_from_target(gen.standard_normal(6))])
    C = tr.construction_matrix(tr.BasketChainConstruction(spec, chain))
    target = np.kron(spec.R(), brownian_cov(3, 1.0))
    assert np.abs(C @ C.T - target).max() <= 1e-10


def test_basket_forward_matrix_is_kron():
    spec = _basket_spec(2, 2, 0.05, [0.1, 0.3])
    M = tr.basket_forward_matrix(spec)
    assert M.shape == (4, 4)
    np.testing.assert_allclose(M @ M.T, np.kron(spec.R(), brownian_cov(2, 1.0)), atol=1e-12)


def test_basket_not_psd_rejected():
    corr = np.array([[1.0, 2.0], [2.0, 1.0]])  # not a correlation matrix
    spec = tr.BasketCovSpec(m=2, n=2, T=1.0, vols=np.array([0.1, 0.2]), corr=corr)
    with pytest.raises(ValueError, match="positive semidefinite"):
        tr.BasketPcaConstruction(spec)


def test_jacobi_matches_numpy():
    gen = np.random.default_rng(9)
    B = gen.standard_normal((6, 6))
    M = B @ B.T
    vals, vecs = tr.jacobi_eigh(M)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(M)[::-1], rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.T, M, atol=1e-9)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(6), atol=1e-12)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        tr.jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
