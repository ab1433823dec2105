"""Rank-one robust fit by alternating DPD-weighted regressions.

The iterate is kept as (λ, u, v, σ²) with unit u and v. One sweep is

1. ``c = update_left(X, λu, v, σ²)``, projected off the left basis; λ = ‖c‖, u = c/λ
2. ``d = update_right(X, u, λv, σ²)``, projected off the right basis; λ = ‖d‖, v = d/λ
3. ``σ² = solve_sigma2(X, λu, v, σ²)``, the scale update repeated to its fixed point

The fit stops when the largest of the relative change in λ, the ∞-norm changes
in u and v and the relative change in σ² drops below `tol`. Steps 1 and 2 are
weighted least-squares minorize/majorize steps of the DPD objective, so without
a basis they never raise it. The scale fixed point is not the minimizer of the
objective in σ², so with `RSvdConfig.descent_guard` step 3 is instead a single
update, backtracked in log space when it would raise the objective.
"""
from __future__ import annotations
import logging
import warnings
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import RSvdConfig
from ..errors import BreakdownWarning, DegenerateInputError, NonConvergenceWarning, RankDeficiencyError
from .gram_schmidt import _project_out, as_basis
from .types import IterationRecord, RankOneResult, SvdTriple, as_data_matrix
from .updates import solve_sigma2, update_left, update_right, update_sigma2
from .weights import fit_objective, mdpde_objective

_logger = logging.getLogger(__name__)

GUARD_STEPS = 30
START_POWER = 'power'
START_SUMS = 'sums'
START_GIVEN = 'given'


def power_iteration(X: np.ndarray, max_iter: int = 50, tol: float = 1e-9) -> SvdTriple:
    """Classical first singular triple of X by alternating power iteration.

    Starts from the direction of the row of X with the largest norm (lowest
    index on ties), so the result is deterministic. If an iterate collapses to
    zero the normalized row/column sums are returned instead.

    Raises:
        DegenerateInputError: if X is identically zero.
    """
    X = np.asarray(X, dtype = np.float64)
    row_norms = np.linalg.norm(X, axis = 1)
    top = int(np.argmax(row_norms))
    if row_norms[top] == 0.0:
        raise DegenerateInputError("power_iteration: X is identically zero")
    v = X[top] / row_norms[top]
    u = X @ v
    lam = float(np.linalg.norm(u))
    u = u / lam
    for iteration in range(1, max_iter + 1):
        v_next = X.T @ u
        norm_v = float(np.linalg.norm(v_next))
        if norm_v == 0.0 or not np.isfinite(norm_v):
            return _stalled(X)
        v_next = v_next / norm_v
        u_next = X @ v_next
        lam = float(np.linalg.norm(u_next))
        if lam == 0.0 or not np.isfinite(lam):
            return _stalled(X)
        u_next = u_next / lam
        change = max(float(np.max(np.abs(u_next - u))), float(np.max(np.abs(v_next - v))))
        u, v = u_next, v_next
        if change < tol:
            break
    else:
        _logger.debug("power_iteration: no convergence after %d iterations (tol %.1e)", max_iter, tol)
    return SvdTriple(lam = lam, u = u, v = v).canonical()


def _stalled(X: np.ndarray) -> SvdTriple:
    _logger.debug("power_iteration stalled; using row/column sums")
    triple = sums_start(X)
    if triple is None:
        raise DegenerateInputError("power_iteration: no usable starting direction")
    return triple


def sums_start(X: np.ndarray) -> Optional[SvdTriple]:
    """Normalized row and column sums as a rank-one start, or None if a sum vector vanishes."""
    rows = X.sum(axis = 1)
    cols = X.sum(axis = 0)
    if not np.any(rows) or not np.any(cols):
        return None
    u = rows / np.linalg.norm(rows)
    v = cols / np.linalg.norm(cols)
    lam = float(u @ X @ v)
    if lam == 0.0:
        return None
    if lam < 0.0:
        v, lam = -v, -lam
    return SvdTriple(lam = lam, u = u, v = v).canonical()


def rank_one_dpd(X: np.ndarray, config: Optional[RSvdConfig] = None, init: Optional[SvdTriple] = None, *,
                 left_basis: Optional[Sequence[np.ndarray]] = None,
                 right_basis: Optional[Sequence[np.ndarray]] = None) -> RankOneResult:
    """Fit the leading robust singular triple of X.

    Args:
        X: Data matrix, at least 2x2 and not identically zero.
        config: Estimator settings; defaults to `RSvdConfig()`.
        init: Explicit starting triple. Overrides `config.init`.
        left_basis: Orthonormal vectors the left vector must stay orthogonal to.
        right_basis: Same for the right vector.

    Returns:
        RankOneResult with the canonical triple, the final σ², the iteration
        trace and the objective at the returned iterate (least squares when
        alpha is 0). On non-convergence the best iterate seen is returned with
        ``converged=False`` and a `NonConvergenceWarning` is issued.

    Raises:
        DegenerateInputError: if X is identically zero.
        RankDeficiencyError: if an update collapses into the span of a basis.

    Example:
        >>> result = rank_one_dpd(np.ones((10, 10)), RSvdConfig(alpha = 0.5))
        >>> round(result.triple.lam, 9)
        10.0
    """
    config = config or RSvdConfig()
    X = as_data_matrix(X, min_rows = 2, min_cols = 2)
    if not np.any(X):
        raise DegenerateInputError("rank_one_dpd: X is identically zero")
    n, p = X.shape
    Qu = as_basis(left_basis, n)
    Qv = as_basis(right_basis, p)

    fits = [_fit(X, config, label, start, Qu, Qv) for label, start in _starting_triples(X, config, init)]
    # min keeps the first candidate on ties, so the power start wins them
    result, breakdowns = min(fits, key = lambda fit: fit[0].objective)
    if breakdowns:
        warnings.warn(f"rank_one_dpd: scale denominator hit the breakdown guard {breakdowns} time(s); "
                      "previous sigma2 kept", BreakdownWarning, stacklevel = 2)
    if not result.converged:
        warnings.warn(f"rank_one_dpd: no convergence within max_iter={config.max_iter} (alpha={config.alpha}); "
                      "returning the best iterate", NonConvergenceWarning, stacklevel = 2)
    return result


def _starting_triples(X: np.ndarray, config: RSvdConfig, init: Optional[SvdTriple]) -> List[Tuple[str, SvdTriple]]:
    if init is not None:
        return [(START_GIVEN, init)]
    mode = config.init
    if mode == 'sums':
        sums = sums_start(X)
        if sums is not None:
            return [(START_SUMS, sums)]
        _logger.debug("sums start unavailable; falling back to power iteration")
        mode = 'power'
    power = power_iteration(X, config.power_iter, config.power_tol)
    if mode == 'power' or config.alpha == 0.0:
        return [(START_POWER, power)]
    starts = [(START_POWER, power)]
    sums = sums_start(X)
    if sums is not None and not _same_direction(power, sums):
        starts.append((START_SUMS, sums))
    return starts


def _same_direction(first: SvdTriple, second: SvdTriple, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(first.u - second.u)) < tol and np.max(np.abs(first.v - second.v)) < tol)


def _normalized(vec: np.ndarray, Q: np.ndarray, side: str) -> Tuple[float, np.ndarray]:
    try:
        vec = _project_out(vec, Q)
    except RankDeficiencyError as exc:
        raise RankDeficiencyError(f"rank_one_dpd: {side} update collapsed ({exc})") from exc
    norm = float(np.linalg.norm(vec))
    return norm, vec / norm


def _initial_state(X: np.ndarray, start: SvdTriple, Qu: np.ndarray, Qv: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    _, u = _normalized(np.asarray(start.u, dtype = np.float64), Qu, 'left start')
    _, v = _normalized(np.asarray(start.v, dtype = np.float64), Qv, 'right start')
    lam = float(u @ X @ v)
    if lam < 0.0:
        v, lam = -v, -lam
    if lam == 0.0:
        lam = float(np.linalg.norm(X @ v)) or 1.0
    return lam, u, v


def _guarded_sigma2(X: np.ndarray, a: np.ndarray, b: np.ndarray, previous: float, candidate: float,
                    alpha: float) -> Tuple[float, float]:
    """Largest log-space step from `previous` toward `candidate` that does not raise the objective."""
    base = mdpde_objective(X, a, b, previous, alpha)
    objective = mdpde_objective(X, a, b, candidate, alpha)
    if objective <= base:
        return candidate, objective
    ratio = candidate / previous
    for k in range(1, GUARD_STEPS + 1):
        trial = previous * ratio ** (0.5 ** k)
        objective = mdpde_objective(X, a, b, trial, alpha)
        if objective <= base:
            _logger.debug("sigma2 step backtracked %d time(s): %.6g -> %.6g", k, previous, trial)
            return trial, objective
    _logger.debug("sigma2 step rejected; keeping %.6g", previous)
    return previous, base


def _fit(X: np.ndarray, config: RSvdConfig, label: str, start: SvdTriple,
         Qu: np.ndarray, Qv: np.ndarray) -> Tuple[RankOneResult, int]:
    alpha = config.alpha
    lam, u, v = _initial_state(X, start, Qu, Qv)
    residual = X - lam * np.outer(u, v)
    sigma2 = max(float(np.mean(residual * residual)), config.sigma2_floor)
    objective = fit_objective(X, lam * u, v, sigma2, alpha)
    trace = [IterationRecord(0, lam, sigma2, objective, float('nan'))]
    best = (objective, lam, u, v, sigma2)
    converged = False
    breakdowns = 0
    iteration = 0

    for iteration in range(1, config.max_iter + 1):
        c = update_left(X, lam * u, v, sigma2, alpha)
        lam_c, u_next = _normalized(c, Qu, 'left')
        d = update_right(X, u_next, lam_c * v, sigma2, alpha)
        lam_next, v_next = _normalized(d, Qv, 'right')
        a_next = lam_next * u_next

        guarded = alpha > 0.0 and config.descent_guard
        scale_step = update_sigma2 if guarded else solve_sigma2
        step = scale_step(X, a_next, v_next, sigma2, alpha, config.sigma2_floor, config.sigma2_correction)
        breakdowns += int(step.breakdown)
        if guarded and step.sigma2 != sigma2:
            sigma2_next, objective = _guarded_sigma2(X, a_next, v_next, sigma2, step.sigma2, alpha)
        else:
            sigma2_next = step.sigma2
            objective = fit_objective(X, a_next, v_next, sigma2_next, alpha)

        change = max(abs(lam_next - lam) / lam,
                     float(np.max(np.abs(u_next - u))),
                     float(np.max(np.abs(v_next - v))),
                     abs(sigma2_next - sigma2) / sigma2)
        lam, u, v, sigma2 = lam_next, u_next, v_next, sigma2_next
        trace.append(IterationRecord(iteration, lam, sigma2, objective, change))
        _logger.debug("[%s] iter %d: lambda=%.10g sigma2=%.6g objective=%.10g change=%.3e",
                      label, iteration, lam, sigma2, objective, change)
        if objective < best[0]:
            best = (objective, lam, u, v, sigma2)
        if change < config.tol:
            converged = True
            break

    if not converged:
        objective, lam, u, v, sigma2 = best
    result = RankOneResult(
        triple = SvdTriple(lam = lam, u = u, v = v).canonical(),
        sigma2 = sigma2,
        trace = trace,
        converged = converged,
        iterations = iteration,
        objective = objective,
        start = label,
    )
    return result, breakdowns
