"""Choosing the background rank and the robustness parameter alpha.

`select_rank` keeps the fewest classical components whose squared singular
values explain more than 1 - epsilon of ‖X‖²_F. `select_alpha` fits every
alpha of a grid and scores it against the alpha = 1 fit with
`alpha_criterion`, a variance term plus the mean squared distance of the
scaled singular vectors from the reference.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .config import DEFAULT_ALPHA_GRID, RSvdConfig
from .core.decompose import iter_classical_triples, rsvd_dpd
from .core.types import RSvdModel, as_data_matrix
from .errors import ContractError, ConvergenceError, DegenerateInputError, RsvdError
from .parallel import ordered_map

_logger = logging.getLogger(__name__)

REFERENCE_ALPHA = 1.0


@dataclass
class RankSelection:
    """Outcome of `select_rank`.

    `classical_lambdas` holds the leading classical singular values up to the
    chosen rank and `shares` the matching cumulative shares of ‖X‖²_F.
    """
    epsilon: float
    classical_lambdas: List[float]
    chosen_rank: int
    shares: List[float] = field(default_factory = list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epsilon': self.epsilon,
            'classical_lambdas': list(self.classical_lambdas),
            'shares': list(self.shares),
            'chosen_rank': self.chosen_rank,
        }


@dataclass
class AlphaSelection:
    """Outcome of `select_alpha`.

    Scores are +inf for grid values whose fit failed, did not converge or lost
    rank; those values are listed in `flagged`. `models` keeps every fit in
    grid order (None where the fit raised).
    """
    grid: List[float]
    scores: List[float]
    chosen: float
    chosen_rank: int
    epsilon: Optional[float] = None
    flagged: List[float] = field(default_factory = list)
    models: List[Optional[RSvdModel]] = field(default_factory = list, repr = False)

    @property
    def chosen_model(self) -> Optional[RSvdModel]:
        return self.models[self.grid.index(self.chosen)] if self.models else None

    def to_dict(self) -> Dict[str, Any]:
        """Report document; infinite scores are written as null."""
        return {
            'grid': list(self.grid),
            'scores': [score if math.isfinite(score) else None for score in self.scores],
            'chosen_alpha': self.chosen,
            'chosen_rank': self.chosen_rank,
            'epsilon': self.epsilon,
            'flagged': list(self.flagged),
        }


def select_rank(X: np.ndarray, epsilon: float = 0.1) -> RankSelection:
    """Smallest r whose classical components explain more than 1 - epsilon of ‖X‖²_F.

    Raises:
        ContractError: if epsilon is outside (0, 1).
        DegenerateInputError: if X is identically zero.

    Example:
        >>> select_rank(np.diag([10.0, 1.0, 0.1]), 0.1).chosen_rank
        1
    """
    if not 0.0 < epsilon < 1.0:
        raise ContractError(f"epsilon must be in (0, 1), got {epsilon}")
    X = as_data_matrix(X)
    total = float(np.sum(X * X))
    if total == 0.0:
        raise DegenerateInputError("select_rank: X is identically zero")
    lambdas: List[float] = []
    shares: List[float] = []
    explained = 0.0
    for triple in iter_classical_triples(X):
        lambdas.append(triple.lam)
        explained += triple.lam ** 2
        shares.append(explained / total)
        if shares[-1] > 1.0 - epsilon:
            break
    _logger.info("select_rank: epsilon=%g -> rank %d (share %.4f)", epsilon, len(lambdas), shares[-1])
    return RankSelection(epsilon = epsilon, classical_lambdas = lambdas, chosen_rank = len(lambdas), shares = shares)


def _aligned_sign(u: np.ndarray, u_ref: np.ndarray) -> float:
    return -1.0 if float(u @ u_ref) < 0.0 else 1.0


def alpha_criterion(model_alpha: RSvdModel, model_ref: RSvdModel, n: int, p: int, alpha: float) -> float:
    """Score of an alpha fit against the alpha = 1 reference fit.

    ``(n+p)·σ²_α·(1 + α²/(1+2α))^{3/2} + (1/r)Σ‖λ_k u_k - λ*_k u*_k‖² + (1/r)Σ‖λ_k v_k - λ*_k v*_k‖²``

    σ² is the alpha fit's own scale. Each component pair (u_k, v_k) is flipped
    jointly when u_k·u*_k < 0 before differencing.

    Raises:
        ContractError: if the ranks differ.
    """
    if model_alpha.rank != model_ref.rank:
        raise ContractError(f"alpha_criterion: rank mismatch {model_alpha.rank} vs reference {model_ref.rank}")
    r = model_ref.rank
    variance = (n + p) * model_alpha.sigma2 * (1.0 + alpha ** 2 / (1.0 + 2.0 * alpha)) ** 1.5
    left = right = 0.0
    for fit, ref in zip(model_alpha.triples, model_ref.triples):
        sign = _aligned_sign(fit.u, ref.u)
        left += float(np.sum((sign * fit.lam * fit.u - ref.lam * ref.u) ** 2))
        right += float(np.sum((sign * fit.lam * fit.v - ref.lam * ref.v) ** 2))
    return variance + left / r + right / r


def select_alpha(X: np.ndarray, rank: int, grid: Sequence[float] = DEFAULT_ALPHA_GRID, *,
                 config: Optional[RSvdConfig] = None, workers: Optional[int] = None,
                 epsilon: Optional[float] = None) -> AlphaSelection:
    """Fit `rsvd_dpd` at every grid alpha and return the criterion minimizer.

    Grid fits run through `ordered_map`, so the result is the same for any
    worker count. Ties go to the smallest alpha.

    Raises:
        ContractError: if the grid is empty, leaves [0, 1] or lacks 1.0.
        ConvergenceError: if no grid value can be scored.
    """
    grid = [float(a) for a in grid]
    if not grid or any(not 0.0 <= a <= 1.0 for a in grid):
        raise ContractError(f"alpha grid must be a nonempty subset of [0, 1], got {grid}")
    if REFERENCE_ALPHA not in grid:
        raise ContractError(f"alpha grid must contain {REFERENCE_ALPHA}, got {grid}")
    X = as_data_matrix(X, min_rows = 2, min_cols = 2)
    n, p = X.shape
    base = (config or RSvdConfig()).with_overrides(rank = rank)

    def fit(alpha: float) -> Optional[RSvdModel]:
        try:
            return rsvd_dpd(X, base.with_overrides(alpha = alpha))
        except RsvdError as exc:
            _logger.warning("select_alpha: fit at alpha=%g failed: %s", alpha, exc)
            return None

    models = ordered_map(fit, grid, workers)
    reference = models[grid.index(REFERENCE_ALPHA)]
    if reference is None:
        raise ConvergenceError("select_alpha: the alpha = 1 reference fit failed")
    if not reference.all_converged:
        _logger.warning("select_alpha: the alpha = 1 reference fit did not converge")

    scores: List[float] = []
    flagged: List[float] = []
    for alpha, model in zip(grid, models):
        if model is None or not model.all_converged or model.rank != reference.rank:
            scores.append(math.inf)
            flagged.append(alpha)
            continue
        scores.append(alpha_criterion(model, reference, n, p, alpha))
        _logger.debug("select_alpha: alpha=%g score=%.6g", alpha, scores[-1])

    finite = [(score, alpha) for score, alpha in zip(scores, grid) if math.isfinite(score)]
    if not finite:
        raise ConvergenceError(f"select_alpha: no grid value could be scored (flagged {flagged})")
    _, chosen = min(finite)
    _logger.info("select_alpha: chose alpha=%g (rank %d, %d flagged)", chosen, reference.rank, len(flagged))
    return AlphaSelection(grid = grid, scores = scores, chosen = chosen, chosen_rank = reference.rank,
                          epsilon = epsilon, flagged = flagged, models = models)
