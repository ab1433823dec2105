"""Domain types shared by the estimator, selection and video layers."""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractError, FormatError

# A DataMatrix is a finite, read-only 2-D float64 ndarray (rows = pixels, columns = frames).
DataMatrix = np.ndarray


def as_data_matrix(values: Any, *, min_rows: int = 1, min_cols: int = 1) -> DataMatrix:
    """Validate `values` and return an immutable float64 copy.

    Raises:
        FormatError: if the input is not 2-D or holds NaN/Inf.
        ContractError: if it is smaller than `min_rows` x `min_cols`.
    """
    try:
        arr = np.array(values, dtype = np.float64, copy = True)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"data matrix must be numeric: {exc}") from exc
    if arr.ndim != 2:
        raise FormatError(f"data matrix must be 2-D, got {arr.ndim}-D with shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FormatError("data matrix contains NaN or Inf entries")
    if arr.shape[0] < min_rows or arr.shape[1] < min_cols:
        raise ContractError(f"data matrix must be at least {min_rows}x{min_cols}, got {arr.shape[0]}x{arr.shape[1]}")
    arr.flags.writeable = False
    return arr


def apply_sign_convention(u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Flip (u, v) jointly so the largest-magnitude entry of u is nonnegative.

    Ties go to the lowest index (np.argmax returns the first maximum).
    """
    idx = int(np.argmax(np.abs(u)))
    if u[idx] < 0:
        return -u, -v
    return u, v


@dataclass(frozen = True)
class SvdTriple:
    """One singular value with its unit left/right singular vectors."""
    lam: float
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def from_factors(cls, a: np.ndarray, b: np.ndarray) -> SvdTriple:
        """Normalize a rank-one factor pair a·bᵀ into canonical (λ, u, v)."""
        norm_a = float(np.linalg.norm(a))
        norm_b = float(np.linalg.norm(b))
        if norm_a == 0.0 or norm_b == 0.0:
            raise ContractError("SvdTriple.from_factors: factors must be nonzero")
        u, v = apply_sign_convention(a / norm_a, b / norm_b)
        return cls(lam = norm_a * norm_b, u = u, v = v)

    def canonical(self) -> SvdTriple:
        u, v = apply_sign_convention(self.u, self.v)
        return SvdTriple(lam = self.lam, u = u, v = v)

    def outer(self) -> np.ndarray:
        """λ·u·vᵀ."""
        return self.lam * np.outer(self.u, self.v)


class IterationRecord(NamedTuple):
    """One row of a rank-one fit's iteration log."""
    iteration: int
    lam: float
    sigma2: float
    objective: float
    change: float


@dataclass
class RankOneResult:
    """Outcome of `rank_one_dpd`."""
    triple: SvdTriple
    sigma2: float
    trace: List[IterationRecord]
    converged: bool
    iterations: int
    objective: float = float('nan')
    start: str = 'power'


@dataclass
class RSvdModel:
    """An ordered list of robust singular triples plus the final noise scale.

    Triples are kept in extraction order; lambdas are not re-sorted.
    """
    triples: List[SvdTriple]
    sigma2: float
    iterations: List[int]
    converged: List[bool]
    alpha: float
    config: Dict[str, Any] = field(default_factory = dict)
    sigma2s: List[float] = field(default_factory = list)
    truncated: bool = False
    traces: List[List[IterationRecord]] = field(default_factory = list)

    @property
    def rank(self) -> int:
        return len(self.triples)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([t.lam for t in self.triples], dtype = np.float64)

    @property
    def U(self) -> np.ndarray:
        """n x rank matrix of left vectors."""
        return np.column_stack([t.u for t in self.triples])

    @property
    def V(self) -> np.ndarray:
        """p x rank matrix of right vectors."""
        return np.column_stack([t.v for t in self.triples])

    @property
    def all_converged(self) -> bool:
        return all(self.converged)

    def to_dict(self, include_trace: bool = False) -> Dict[str, Any]:
        """JSON-ready document; keys are stable (see docs/api/model-json.md)."""
        result: Dict[str, Any] = {
            'lambda': [float(t.lam) for t in self.triples],
            'u': [[float(x) for x in t.u] for t in self.triples],
            'v': [[float(x) for x in t.v] for t in self.triples],
            'sigma2': float(self.sigma2),
            'alpha': float(self.alpha),
            'rank': self.rank,
            'converged': [bool(c) for c in self.converged],
            'iterations': [int(i) for i in self.iterations],
            'truncated': bool(self.truncated),
            'config': dict(self.config),
        }
        if include_trace:
            result['trace'] = [[_record_dict(rec) for rec in trace] for trace in self.traces]
        return result

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> RSvdModel:
        try:
            triples = [SvdTriple(lam = float(lam), u = np.asarray(u, dtype = np.float64), v = np.asarray(v, dtype = np.float64))
                       for lam, u, v in zip(doc['lambda'], doc['u'], doc['v'])]
            return cls(
                triples = triples,
                sigma2 = float(doc['sigma2']),
                iterations = [int(i) for i in doc.get('iterations', [])],
                converged = [bool(c) for c in doc.get('converged', [])],
                alpha = float(doc['alpha']),
                config = dict(doc.get('config', {})),
                truncated = bool(doc.get('truncated', False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"invalid model document: {exc}") from exc


def check_vector(name: str, vec: Sequence[float], length: int) -> np.ndarray:
    """Coerce to a float64 vector of the expected length."""
    arr = np.asarray(vec, dtype = np.float64)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise ContractError(f"{name} must be a vector of length {length}, got shape {arr.shape}")
    return arr


def _record_dict(record: IterationRecord) -> Dict[str, Any]:
    # NaN is not valid JSON; the starting record has no change
    doc = record._asdict()
    return {key: (None if isinstance(value, float) and value != value else value) for key, value in doc.items()}
