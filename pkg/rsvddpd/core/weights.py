"""Density power divergence weights and objectives for the rank-one model.

For a cell x_ij with fitted value a_i·b_j the normal-kernel DPD weight is
``exp(-alpha * (x_ij - a_i b_j)**2 / (2 sigma2))``; alpha = 0 gives unit weights
(least squares). `mdpde_objective` averages the per-cell DPD loss V over the
matrix; `least_squares_objective` is the alpha -> 0 regime.

Example:
    >>> from rsvddpd.core.weights import dpd_weight
    >>> round(float(dpd_weight(2.0, 1.0, 0.5)), 6)
    0.367879
"""
from __future__ import annotations
import math
from typing import Union

import numpy as np

from ..errors import DomainError
from .types import check_vector

ArrayLike = Union[float, np.ndarray]


def _check_sigma2(sigma2: float, where: str) -> None:
    if not sigma2 > 0.0 or not math.isfinite(sigma2):
        raise DomainError(f"{where}: sigma2 must be positive and finite, got {sigma2}")


def dpd_weight(residual: ArrayLike, sigma2: float, alpha: float) -> ArrayLike:
    """DPD weight exp(-alpha·r²/(2σ²)), elementwise for arrays.

    Returns a value in (0, 1]; exactly 1 when alpha == 0 or residual == 0.

    Raises:
        DomainError: if sigma2 <= 0.
    """
    _check_sigma2(sigma2, 'dpd_weight')
    r = np.asarray(residual, dtype = np.float64)
    w = np.exp(-alpha * r * r / (2.0 * sigma2))
    return float(w) if w.ndim == 0 else w


def weight_matrix(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2: float, alpha: float) -> np.ndarray:
    """Weights for every cell of X under the rank-one fit a·bᵀ."""
    if alpha == 0.0:
        return np.ones_like(X)
    residual = X - np.outer(a, b)
    return np.exp(-alpha * residual * residual / (2.0 * sigma2))


def mdpde_objective(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2: float, alpha: float) -> float:
    """Average DPD loss of the rank-one fit a·bᵀ with noise scale sigma2.

    ``(2π)^(-α/2) σ^(-α) [(1+α)^(-1/2) - ((1+α)/α)·mean(exp(-α r²/(2σ²)))]``

    Raises:
        DomainError: if alpha == 0 (use `least_squares_objective`) or sigma2 <= 0.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"mdpde_objective: alpha must be in (0, 1], got {alpha}; "
                          "use least_squares_objective for the alpha = 0 limit")
    _check_sigma2(sigma2, 'mdpde_objective')
    n, p = X.shape
    a = check_vector('a', a, n)
    b = check_vector('b', b, p)
    mean_weight = float(np.mean(weight_matrix(X, a, b, sigma2, alpha)))
    scale = (2.0 * math.pi) ** (-alpha / 2.0) * sigma2 ** (-alpha / 2.0)
    return scale * ((1.0 + alpha) ** -0.5 - (1.0 + alpha) / alpha * mean_weight)


def least_squares_objective(X: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Sum of squared residuals of the rank-one fit a·bᵀ."""
    residual = X - np.outer(a, b)
    return float(np.sum(residual * residual))


def profile_objective(X: np.ndarray, lam: float, u: np.ndarray, v: np.ndarray, sigma2: float, alpha: float) -> float:
    """The objective in (λ, u, v, σ²) form with unit u and v; same value as
    ``mdpde_objective(X, lam * u, v, sigma2, alpha)``."""
    return mdpde_objective(X, lam * np.asarray(u, dtype = np.float64), v, sigma2, alpha)


def fit_objective(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2: float, alpha: float) -> float:
    """MDPDE objective for alpha > 0, least squares for alpha == 0."""
    if alpha == 0.0:
        return least_squares_objective(X, a, b)
    return mdpde_objective(X, a, b, sigma2, alpha)
