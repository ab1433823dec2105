"""Fixed-point updates of the rank-one DPD estimating equations.

Each update recomputes the weights from its inputs, so rows (columns) are
independent and the result does not depend on the order they are visited in.
"""
from __future__ import annotations
import logging
import warnings
from typing import NamedTuple

import numpy as np
from scipy import optimize

from ..errors import ConfigError, ContractError, DegenerateRowWarning
from .types import check_vector
from .weights import _check_sigma2, weight_matrix

_logger = logging.getLogger(__name__)

SIGMA2_OK = 'ok'
SIGMA2_FLOOR = 'floor'
SIGMA2_BREAKDOWN = 'breakdown'
BREAKDOWN_RATIO = 1e-8

# How alpha/(1+alpha)^{3/2} enters the scale denominator: once for the whole
# matrix (the update as printed) or once per cell (the stationary point of the
# averaged objective).
CORRECTION_NORMALIZED = 'normalized'
CORRECTION_LITERAL = 'literal'
CORRECTIONS = (CORRECTION_NORMALIZED, CORRECTION_LITERAL)


class Sigma2Step(NamedTuple):
    """Result of `update_sigma2`: the new scale and how it was obtained."""
    sigma2: float
    status: str

    @property
    def floored(self) -> bool:
        return self.status == SIGMA2_FLOOR

    @property
    def breakdown(self) -> bool:
        return self.status == SIGMA2_BREAKDOWN


def _weighted_ratio(X: np.ndarray, W: np.ndarray, coef: np.ndarray, previous: np.ndarray, where: str) -> np.ndarray:
    numerator = (W * X) @ coef
    denominator = W @ (coef * coef)
    out = previous.astype(np.float64, copy = True)
    ok = denominator > 0.0
    out[ok] = numerator[ok] / denominator[ok]
    if not np.all(ok):
        bad = np.flatnonzero(~ok)
        warnings.warn(f"{where}: zero weighted denominator at index {bad.tolist()[:10]}; kept previous value",
                      DegenerateRowWarning, stacklevel = 3)
    return out


def update_left(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2: float, alpha: float) -> np.ndarray:
    """New left factor: a_i = Σ_j b_j x_ij w_ij / Σ_j b_j² w_ij.

    Weights come from the input (a, b, sigma2). Rows whose denominator is zero
    keep their previous value and raise a `DegenerateRowWarning`.
    """
    _check_sigma2(sigma2, 'update_left')
    n, p = X.shape
    a = check_vector('a', a, n)
    b = check_vector('b', b, p)
    if not np.any(b):
        raise ContractError("update_left: b must not be identically zero")
    W = weight_matrix(X, a, b, sigma2, alpha)
    return _weighted_ratio(X, W, b, a, 'update_left')


def update_right(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2: float, alpha: float) -> np.ndarray:
    """New right factor: b_j = Σ_i a_i x_ij w_ij / Σ_i a_i² w_ij (mirror of `update_left`)."""
    _check_sigma2(sigma2, 'update_right')
    n, p = X.shape
    a = check_vector('a', a, n)
    b = check_vector('b', b, p)
    if not np.any(a):
        raise ContractError("update_right: a must not be identically zero")
    W = weight_matrix(X, a, b, sigma2, alpha)
    return _weighted_ratio(X.T, W.T, a, b, 'update_right')


def scale_correction(alpha: float, n_cells: int, correction: str = CORRECTION_LITERAL) -> float:
    """The term subtracted from Σw in the scale update."""
    if correction not in CORRECTIONS:
        raise ConfigError(f"correction must be one of {CORRECTIONS}, got {correction!r}")
    term = alpha / (1.0 + alpha) ** 1.5
    return term * n_cells if correction == CORRECTION_NORMALIZED else term


def update_sigma2(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2_prev: float, alpha: float,
                  sigma2_floor: float = 1e-12, correction: str = CORRECTION_LITERAL) -> Sigma2Step:
    """New noise scale: Σ r²w / (Σ w - c), weights taken at sigma2_prev.

    With the default 'literal' correction c = α/(1+α)^{3/2}; 'normalized' uses
    c = n·p·α/(1+α)^{3/2}, which makes the update the stationary point of the
    averaged objective in σ². Both reduce to the mean squared residual at alpha = 0.

    The result is floored at `sigma2_floor` (status 'floor'). When the
    denominator is at most 1e-8·n·p nearly every cell has been down-weighted and
    `sigma2_prev` is returned unchanged (status 'breakdown').
    """
    _check_sigma2(sigma2_prev, 'update_sigma2')
    n, p = X.shape
    a = check_vector('a', a, n)
    b = check_vector('b', b, p)
    residual = X - np.outer(a, b)
    sq = residual * residual
    if alpha == 0.0:
        W = np.ones_like(X)
    else:
        W = np.exp(-alpha * sq / (2.0 * sigma2_prev))
    denominator = float(np.sum(W)) - scale_correction(alpha, n * p, correction)
    if denominator <= BREAKDOWN_RATIO * n * p:
        _logger.debug("update_sigma2: denominator %.3e below breakdown guard; keeping %.6g", denominator, sigma2_prev)
        return Sigma2Step(float(sigma2_prev), SIGMA2_BREAKDOWN)
    ratio = float(np.sum(sq * W)) / denominator
    if ratio <= sigma2_floor:
        return Sigma2Step(float(sigma2_floor), SIGMA2_FLOOR)
    return Sigma2Step(ratio, SIGMA2_OK)


def solve_sigma2(X: np.ndarray, a: np.ndarray, b: np.ndarray, sigma2_prev: float, alpha: float,
                 sigma2_floor: float = 1e-12, correction: str = CORRECTION_LITERAL,
                 xtol: float = 1e-12, max_iter: int = 500) -> Sigma2Step:
    """Repeat `update_sigma2` with (a, b) held fixed until σ² reproduces itself.

    The scalar map contracts at a rate close to alpha, so the repetition is
    Aitken-accelerated (`scipy.optimize.fixed_point`). The returned value is one
    more plain update from the solved point. If the solve fails, or ends in the
    breakdown guard, the single update from `sigma2_prev` is returned instead.

    Example:
        >>> X = np.array([[1.0, 2.0], [3.0, 4.0]])
        >>> step = solve_sigma2(X, np.ones(2), np.ones(2), 1.0, 0.5)
        >>> abs(update_sigma2(X, np.ones(2), np.ones(2), step.sigma2, 0.5).sigma2 - step.sigma2) < 1e-9
        True
    """
    first = update_sigma2(X, a, b, sigma2_prev, alpha, sigma2_floor, correction)
    if alpha == 0.0 or first.status != SIGMA2_OK:
        return first

    def step(value):
        value = float(value)
        if not np.isfinite(value) or value < sigma2_floor:
            value = sigma2_floor
        return update_sigma2(X, a, b, value, alpha, sigma2_floor, correction).sigma2

    try:
        solved = float(optimize.fixed_point(step, first.sigma2, xtol = xtol, maxiter = max_iter))
    except RuntimeError as exc:
        _logger.debug("solve_sigma2: %s; using the single update", exc)
        return first
    if not np.isfinite(solved) or solved <= 0.0:
        return first
    final = update_sigma2(X, a, b, max(solved, sigma2_floor), alpha, sigma2_floor, correction)
    if final.breakdown:
        _logger.debug("solve_sigma2: solved point %.6g hits the breakdown guard; using the single update", solved)
        return first
    return final
