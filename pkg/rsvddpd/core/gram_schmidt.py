"""Gram-Schmidt projection used between fixed-point steps of deflated components."""
from __future__ import annotations
from typing import Optional, Sequence

import numpy as np

from ..errors import ContractError, RankDeficiencyError

ORTHONORMAL_TOL = 1e-6
DEFICIENCY_RATIO = 1e-12


def as_basis(basis: Optional[Sequence[np.ndarray]], length: int, *, check: bool = True) -> np.ndarray:
    """Stack basis vectors as columns of a (length x k) array, k possibly 0."""
    if basis is None or len(basis) == 0:
        return np.zeros((length, 0))
    Q = np.column_stack([np.asarray(q, dtype = np.float64) for q in basis])
    if Q.shape[0] != length:
        raise ContractError(f"basis vectors must have length {length}, got {Q.shape[0]}")
    if check:
        gram = Q.T @ Q
        err = float(np.max(np.abs(gram - np.eye(Q.shape[1]))))
        if err > ORTHONORMAL_TOL:
            raise ContractError(f"basis must be orthonormal within {ORTHONORMAL_TOL}, deviation {err:.3e}")
    return Q


def orthogonalize_against(vec: np.ndarray, basis: Sequence[np.ndarray]) -> np.ndarray:
    """Remove from `vec` its projection onto every basis vector.

    Two classical Gram-Schmidt passes keep the result orthogonal to the basis to
    about machine precision relative to ‖vec‖.

    Raises:
        RankDeficiencyError: if the remainder is below 1e-12·‖vec‖ (vec lies in
            the span of the basis) or vec is zero.
        ContractError: if the basis is not orthonormal.

    Example:
        >>> orthogonalize_against(np.array([1.0, 1.0, 0.0]), [np.array([1.0, 0.0, 0.0])])
        array([0., 1., 0.])
    """
    v = np.asarray(vec, dtype = np.float64)
    Q = as_basis(basis, v.shape[0])
    return _project_out(v, Q)


def _project_out(v: np.ndarray, Q: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise RankDeficiencyError("orthogonalize_against: vector is zero")
    if Q.shape[1] == 0:
        return v.copy()
    out = v - Q @ (Q.T @ v)
    out = out - Q @ (Q.T @ out)
    if float(np.linalg.norm(out)) < DEFICIENCY_RATIO * norm:
        raise RankDeficiencyError("orthogonalize_against: vector lies in the span of the basis")
    return out
