"""Tests for the fixed-point updates."""
import math

import numpy as np
import pytest

from rsvddpd.core.updates import scale_correction, solve_sigma2, update_left, update_right, update_sigma2
from rsvddpd.errors import ConfigError, ContractError, DegenerateRowWarning, DomainError


def _left_by_loop(X, a, b, sigma2, alpha):
    n, p = X.shape
    out = np.zeros(n)
    for i in range(n):
        num = den = 0.0
        for j in range(p):
            r = X[i, j] - a[i] * b[j]
            w = math.exp(-alpha * r * r / (2.0 * sigma2))
            num += b[j] * X[i, j] * w
            den += b[j] * b[j] * w
        out[i] = num / den
    return out


def _sigma2_by_loop(X, a, b, sigma2, alpha):
    num = den = 0.0
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            r = X[i, j] - a[i] * b[j]
            w = math.exp(-alpha * r * r / (2.0 * sigma2))
            num += r * r * w
            den += w
    return num / (den - alpha / (1.0 + alpha) ** 1.5)


@pytest.fixture
def problem():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((6, 4)) + np.outer(np.arange(1.0, 7.0), np.ones(4))
    return X, rng.standard_normal(6), rng.standard_normal(4)


class TestUpdateLeft:
    def test_alpha_zero_is_least_squares(self, problem):
        X, a, b = problem
        expected = X @ b / (b @ b)
        np.testing.assert_allclose(update_left(X, a, b, 1.0, 0.0), expected, rtol = 1e-12)

    @pytest.mark.parametrize('alpha', [0.25, 0.5, 1.0])
    def test_matches_scalar_loop(self, problem, alpha):
        X, a, b = problem
        np.testing.assert_allclose(update_left(X, a, b, 0.6, alpha), _left_by_loop(X, a, b, 0.6, alpha), rtol = 1e-10)

    def test_row_order_does_not_matter(self, problem):
        X, a, b = problem
        perm = np.array([3, 0, 5, 1, 4, 2])
        full = update_left(X, a, b, 0.6, 0.5)
        np.testing.assert_allclose(update_left(X[perm], a[perm], b, 0.6, 0.5), full[perm], rtol = 1e-12)

    def test_zero_denominator_keeps_previous(self):
        X = np.array([[1e3, 1e3], [1.0, 1.0]])
        with pytest.warns(DegenerateRowWarning, match = 'index'):
            out = update_left(X, np.array([0.0, 1.0]), np.array([1.0, 1.0]), 1e-6, 1.0)
        np.testing.assert_allclose(out, [0.0, 1.0])

    def test_zero_b_is_a_contract_error(self):
        with pytest.raises(ContractError, match = 'identically zero'):
            update_left(np.ones((2, 2)), np.ones(2), np.zeros(2), 1.0, 0.5)

    def test_rejects_bad_sigma2(self):
        with pytest.raises(DomainError):
            update_left(np.ones((2, 2)), np.ones(2), np.ones(2), -1.0, 0.5)


class TestUpdateRight:
    @pytest.mark.parametrize('alpha', [0.0, 0.5])
    def test_mirrors_update_left(self, problem, alpha):
        X, a, b = problem
        np.testing.assert_allclose(update_right(X, a, b, 0.6, alpha), update_left(X.T, b, a, 0.6, alpha), rtol = 1e-12)

    def test_zero_a_is_a_contract_error(self):
        with pytest.raises(ContractError):
            update_right(np.ones((2, 2)), np.zeros(2), np.ones(2), 1.0, 0.5)


class TestScaleCorrection:
    def test_normalized_scales_with_cells(self):
        assert scale_correction(1.0, 4, 'normalized') == pytest.approx(4.0 / 2.0 ** 1.5)

    def test_literal_is_single_term(self):
        assert scale_correction(1.0, 4) == pytest.approx(2.0 ** -1.5)
        assert scale_correction(1.0, 4, 'literal') == scale_correction(1.0, 4)

    def test_zero_alpha(self):
        assert scale_correction(0.0, 100) == 0.0

    def test_unknown_correction(self):
        with pytest.raises(ConfigError, match = 'correction'):
            scale_correction(0.5, 4, 'other')


class TestUpdateSigma2:
    def test_alpha_zero_is_mean_squared_residual(self, problem):
        X, a, b = problem
        step = update_sigma2(X, a, b, 1.0, 0.0)
        residual = X - np.outer(a, b)
        assert step.sigma2 == pytest.approx(float(np.mean(residual ** 2)), rel = 1e-12)
        assert step.status == 'ok'

    @pytest.mark.parametrize('correction', ['normalized', 'literal'])
    def test_weighted_formula(self, problem, correction):
        X, a, b = problem
        alpha, previous = 0.5, 20.0
        sq = (X - np.outer(a, b)) ** 2
        W = np.exp(-alpha * sq / (2.0 * previous))
        term = alpha / (1.0 + alpha) ** 1.5
        c = term * X.size if correction == 'normalized' else term
        step = update_sigma2(X, a, b, previous, alpha, correction = correction)
        assert step.sigma2 == pytest.approx(float(np.sum(sq * W) / (np.sum(W) - c)), rel = 1e-12)
        assert not step.floored and not step.breakdown

    def test_exact_fit_is_floored(self):
        X = np.outer([1.0, 2.0], [3.0, 4.0])
        step = update_sigma2(X, np.array([1.0, 2.0]), np.array([3.0, 4.0]), 1.0, 0.5, sigma2_floor = 1e-9)
        assert step.floored
        assert step.sigma2 == 1e-9

    def test_breakdown_keeps_previous(self):
        X = np.full((2, 2), 100.0)
        step = update_sigma2(X, np.zeros(2), np.ones(2), 1e-6, 1.0)
        assert step.breakdown
        assert step.sigma2 == 1e-6

    def test_default_matches_scalar_loop(self):
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        step = update_sigma2(X, np.ones(2), np.ones(2), 1.0, 0.5)
        assert step.sigma2 == pytest.approx(_sigma2_by_loop(X, np.ones(2), np.ones(2), 1.0, 0.5), rel = 1e-12)
        assert step.sigma2 == pytest.approx(1.6156821433, rel = 1e-9)


class TestSolveSigma2:
    def test_result_is_a_fixed_point(self, problem):
        X, a, b = problem
        step = solve_sigma2(X, a, b, 1.0, 0.5)
        assert step.status == 'ok'
        assert update_sigma2(X, a, b, step.sigma2, 0.5).sigma2 == pytest.approx(step.sigma2, rel = 1e-9)

    def test_agrees_with_repeated_updates(self):
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        sigma2 = 1.0
        for _ in range(200):
            sigma2 = update_sigma2(X, np.ones(2), np.ones(2), sigma2, 0.5).sigma2
        assert solve_sigma2(X, np.ones(2), np.ones(2), 1.0, 0.5).sigma2 == pytest.approx(sigma2, rel = 1e-9)

    def test_alpha_zero_is_a_single_update(self, problem):
        X, a, b = problem
        assert solve_sigma2(X, a, b, 3.0, 0.0) == update_sigma2(X, a, b, 3.0, 0.0)

    def test_exact_fit_is_floored(self):
        X = np.outer([1.0, 2.0], [3.0, 4.0])
        step = solve_sigma2(X, np.array([1.0, 2.0]), np.array([3.0, 4.0]), 1.0, 0.5, sigma2_floor = 1e-9)
        assert step.floored
