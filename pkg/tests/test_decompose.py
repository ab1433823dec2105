"""Tests for deflation, the classical baseline and Gram-Schmidt projection."""
import warnings

import numpy as np
import pytest

from rsvddpd import RSvdConfig, classical_svd, reconstruct, rsvd_dpd
from rsvddpd.core.decompose import iter_classical_triples
from rsvddpd.core.gram_schmidt import orthogonalize_against
from rsvddpd.errors import ContractError, DegenerateInputError, NonConvergenceWarning, RankDeficiencyError, RankTruncationWarning


class TestRsvdDpd:
    def test_diagonal(self):
        model = rsvd_dpd(np.diag([3.0, 2.0, 1.0]), RSvdConfig(alpha = 0.0, rank = 2))
        np.testing.assert_allclose(model.lambdas, [3.0, 2.0], rtol = 1e-6)
        assert model.rank == 2
        assert not model.truncated

    def test_identity_full_rank(self):
        model = rsvd_dpd(np.eye(3), RSvdConfig(alpha = 0.0, rank = 3))
        np.testing.assert_allclose(model.lambdas, [1.0, 1.0, 1.0], rtol = 1e-9)

    def test_full_rank_matches_numpy_svd(self):
        config = RSvdConfig(alpha = 0.0, tol = 1e-12, max_iter = 20000)
        for seed in range(10):
            X = np.random.default_rng(seed).standard_normal((8, 5))
            model = rsvd_dpd(X, config.with_overrides(rank = 5))
            np.testing.assert_allclose(model.lambdas, np.linalg.svd(X, compute_uv = False), rtol = 1e-5)
            np.testing.assert_allclose(reconstruct(model), X, atol = 1e-6)

    @pytest.mark.parametrize('alpha', [0.0, 0.5, 1.0])
    def test_vectors_are_orthonormal(self, alpha):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((12, 3)) @ rng.standard_normal((3, 9)) + 0.1 * rng.standard_normal((12, 9))
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', NonConvergenceWarning)
            model = rsvd_dpd(X, RSvdConfig(alpha = alpha, rank = 3))
        assert np.max(np.abs(model.U.T @ model.U - np.eye(3))) <= 1e-6
        assert np.max(np.abs(model.V.T @ model.V - np.eye(3))) <= 1e-6

    def test_extraction_order_is_kept(self):
        model = rsvd_dpd(np.diag([1.0, 4.0, 2.0]), RSvdConfig(alpha = 0.0, rank = 3))
        np.testing.assert_allclose(model.lambdas, [4.0, 2.0, 1.0], rtol = 1e-9)
        assert len(model.sigma2s) == 3
        assert model.sigma2 == model.sigma2s[-1]

    def test_exhausted_residual_truncates(self):
        X = np.outer(np.arange(1.0, 6.0), np.arange(1.0, 5.0))
        with pytest.warns(RankTruncationWarning, match = 'rank 1 of 2'):
            model = rsvd_dpd(X, RSvdConfig(alpha = 0.0, rank = 2))
        assert model.truncated
        assert model.rank == 1

    def test_rank_above_min_dimension(self):
        with pytest.raises(ContractError, match = 'at most'):
            rsvd_dpd(np.ones((4, 3)), RSvdConfig(rank = 4))

    def test_zero_matrix(self):
        with pytest.raises(DegenerateInputError):
            rsvd_dpd(np.zeros((3, 3)))

    def test_config_is_recorded(self):
        model = rsvd_dpd(np.ones((3, 3)), RSvdConfig(alpha = 0.25))
        assert model.alpha == 0.25
        assert model.config['alpha'] == 0.25
        assert model.config['rank'] == 1
        assert len(model.traces) == 1

    def test_scaling_the_matrix_scales_every_component(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((10, 2)) @ rng.standard_normal((2, 8)) + 0.2 * rng.standard_normal((10, 8))
        X[1, 2] += 15.0
        config = RSvdConfig(alpha = 0.5, rank = 2, tol = 1e-10, max_iter = 2000)
        base = rsvd_dpd(X, config)
        scaled = rsvd_dpd(7.3 * X, config)
        np.testing.assert_allclose(scaled.lambdas, 7.3 * base.lambdas, rtol = 1e-8)
        np.testing.assert_allclose(scaled.U, base.U, atol = 1e-8)
        np.testing.assert_allclose(scaled.V, base.V, atol = 1e-8)
        np.testing.assert_allclose(scaled.sigma2s, 7.3 ** 2 * np.asarray(base.sigma2s), rtol = 1e-8)


class TestClassicalSvd:
    def test_matches_numpy(self):
        X = np.random.default_rng(3).standard_normal((6, 4))
        model = classical_svd(X, 2)
        s = np.linalg.svd(X, compute_uv = False)
        np.testing.assert_allclose(model.lambdas, s[:2], rtol = 1e-8)
        residual = X - reconstruct(model)
        assert model.sigma2 == pytest.approx(float(np.mean(residual ** 2)))
        assert model.alpha == 0.0

    def test_rank_checked(self):
        with pytest.raises(ContractError):
            classical_svd(np.ones((3, 3)), 0)

    def test_iterator_stops_when_exhausted(self):
        triples = list(iter_classical_triples(np.ones((4, 4))))
        assert len(triples) == 1
        assert triples[0].lam == pytest.approx(4.0)


class TestReconstruct:
    def test_rank_one(self):
        X = np.outer([1.0, 2.0, 3.0], [1.0, -1.0])
        model = rsvd_dpd(X, RSvdConfig(alpha = 0.5))
        np.testing.assert_allclose(reconstruct(model), X, atol = 1e-9)


class TestOrthogonalizeAgainst:
    def test_removes_projection(self):
        out = orthogonalize_against(np.array([1.0, 1.0, 0.0]), [np.array([1.0, 0.0, 0.0])])
        np.testing.assert_allclose(out, [0.0, 1.0, 0.0])

    def test_empty_basis_copies(self):
        vec = np.array([1.0, 2.0])
        out = orthogonalize_against(vec, [])
        np.testing.assert_array_equal(out, vec)
        assert out is not vec

    def test_orthogonal_to_random_basis(self):
        rng = np.random.default_rng(9)
        Q, _ = np.linalg.qr(rng.standard_normal((10, 4)))
        out = orthogonalize_against(rng.standard_normal(10), list(Q.T))
        assert np.max(np.abs(Q.T @ out)) < 1e-12

    def test_vector_in_span(self):
        with pytest.raises(RankDeficiencyError, match = 'span'):
            orthogonalize_against(np.array([2.0, 0.0]), [np.array([1.0, 0.0])])

    def test_zero_vector(self):
        with pytest.raises(RankDeficiencyError, match = 'zero'):
            orthogonalize_against(np.zeros(3), [np.array([1.0, 0.0, 0.0])])

    def test_basis_must_be_orthonormal(self):
        with pytest.raises(ContractError, match = 'orthonormal'):
            orthogonalize_against(np.array([1.0, 1.0]), [np.array([2.0, 0.0])])
