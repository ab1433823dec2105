"""Sequential deflation: robust rank-r decomposition and the classical baseline."""
from __future__ import annotations
import logging
import warnings
from typing import Iterator, List, Optional

import numpy as np

from ..config import RSvdConfig
from ..errors import ContractError, DegenerateInputError, RankDeficiencyError, RankTruncationWarning
from .gram_schmidt import orthogonalize_against
from .rank_one import power_iteration, rank_one_dpd
from .types import RSvdModel, SvdTriple, as_data_matrix

_logger = logging.getLogger(__name__)

__all__ = ['orthogonalize_against', 'rsvd_dpd', 'classical_svd', 'iter_classical_triples', 'reconstruct']

# residual counts as exhausted below this fraction of max|X|
EXHAUSTED_RATIO = 1e-12


def rsvd_dpd(X: np.ndarray, config: Optional[RSvdConfig] = None) -> RSvdModel:
    """Robust rank-`config.rank` decomposition of X.

    Component k+1 is fit on the residual ``X - Σ_{r<=k} λ_r u_r v_rᵀ`` with its
    left and right vectors kept orthogonal to those already extracted. Triples
    are reported in extraction order.

    If the residual is exhausted, or an update falls into the span of the
    extracted vectors, the model is truncated at the achieved rank,
    ``truncated`` is set and a `RankTruncationWarning` is issued.

    Raises:
        ContractError: if rank exceeds min(n, p).
        DegenerateInputError: if X is identically zero.

    Example:
        >>> model = rsvd_dpd(np.diag([3.0, 2.0, 1.0]), RSvdConfig(alpha = 0.0, rank = 2))
        >>> [round(lam, 6) for lam in model.lambdas]
        [3.0, 2.0]
    """
    config = config or RSvdConfig()
    X = as_data_matrix(X, min_rows = 2, min_cols = 2)
    n, p = X.shape
    if config.rank > min(n, p):
        raise ContractError(f"rank must be at most min(n_rows, n_cols) = {min(n, p)}, got {config.rank}")
    if not np.any(X):
        raise DegenerateInputError("rsvd_dpd: X is identically zero")

    scale = float(np.max(np.abs(X)))
    residual = np.array(X)
    triples: List[SvdTriple] = []
    sigma2s: List[float] = []
    iterations: List[int] = []
    converged: List[bool] = []
    traces = []
    truncated = False

    for k in range(config.rank):
        if k and float(np.max(np.abs(residual))) <= EXHAUSTED_RATIO * scale:
            _logger.info("residual exhausted after %d component(s)", k)
            truncated = True
            break
        try:
            result = rank_one_dpd(residual, config,
                                  left_basis = [t.u for t in triples],
                                  right_basis = [t.v for t in triples])
        except RankDeficiencyError as exc:
            _logger.info("component %d: %s", k + 1, exc)
            truncated = True
            break
        triples.append(result.triple)
        sigma2s.append(result.sigma2)
        iterations.append(result.iterations)
        converged.append(result.converged)
        traces.append(result.trace)
        residual -= result.triple.outer()
        _logger.info("component %d: lambda=%.6g sigma2=%.4g iterations=%d converged=%s start=%s",
                     k + 1, result.triple.lam, result.sigma2, result.iterations, result.converged, result.start)

    if not triples:
        raise RankDeficiencyError("rsvd_dpd: could not extract a first component")
    if truncated:
        warnings.warn(f"rsvd_dpd: truncated at rank {len(triples)} of {config.rank} requested",
                      RankTruncationWarning, stacklevel = 2)
    return RSvdModel(
        triples = triples,
        sigma2 = sigma2s[-1],
        iterations = iterations,
        converged = converged,
        alpha = config.alpha,
        config = config.to_dict(),
        sigma2s = sigma2s,
        truncated = truncated,
        traces = traces,
    )


def iter_classical_triples(X: np.ndarray, max_iter: int = 1000, tol: float = 1e-12) -> Iterator[SvdTriple]:
    """Yield classical singular triples of X by power iteration with deflation.

    Stops after min(n, p) triples or once the residual is exhausted.
    """
    X = np.asarray(X, dtype = np.float64)
    if not np.any(X):
        raise DegenerateInputError("classical SVD of an identically zero matrix")
    scale = float(np.max(np.abs(X)))
    residual = np.array(X)
    for _ in range(min(X.shape)):
        if float(np.max(np.abs(residual))) <= EXHAUSTED_RATIO * scale:
            return
        triple = power_iteration(residual, max_iter, tol)
        yield triple
        residual -= triple.outer()


def classical_svd(X: np.ndarray, rank: int, max_iter: int = 1000, tol: float = 1e-12) -> RSvdModel:
    """Nonrobust rank-`rank` SVD (the alpha = 0 baseline).

    sigma2 is the mean squared residual of the rank-`rank` reconstruction.
    """
    X = as_data_matrix(X, min_rows = 2, min_cols = 2)
    if not 1 <= rank <= min(X.shape):
        raise ContractError(f"rank must be in [1, {min(X.shape)}], got {rank}")
    triples = []
    for triple in iter_classical_triples(X, max_iter, tol):
        triples.append(triple)
        if len(triples) == rank:
            break
    residual = X - sum(t.outer() for t in triples)
    return RSvdModel(
        triples = triples,
        sigma2 = float(np.mean(residual * residual)),
        iterations = [0] * len(triples),
        converged = [True] * len(triples),
        alpha = 0.0,
        config = {'method': 'classical', 'rank': rank, 'max_iter': max_iter, 'tol': tol},
        truncated = len(triples) < rank,
    )


def reconstruct(model: RSvdModel) -> np.ndarray:
    """Σ λ_k u_k v_kᵀ over the model's triples."""
    if model.rank == 0:
        raise ContractError("cannot reconstruct a rank-0 model")
    return (model.U * model.lambdas) @ model.V.T
