"""Empirical bias and RMSE of the first robust singular value as n grows.

Each replication draws L = U·diag(3, 2, 1)·Vᵀ with orthonormal n x 3 factors
from a seeded QR of Gaussian matrices, adds i.i.d. N(0, (noise_scale/n)²)
noise and fits a rank-3 model. The true first singular value is 3.

L is not rescaled with n: its singular values stay (3, 2, 1), so entries are
O(1/n), and the noise sd shrinks as 1/n to keep the signal-to-noise ratio of
an O(1) matrix with unit noise.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..config import RSvdConfig
from ..core.decompose import rsvd_dpd
from ..errors import ContractError
from ..parallel import ordered_map

_logger = logging.getLogger(__name__)

TRUE_SINGULAR_VALUES = (3.0, 2.0, 1.0)
MIN_SIZE = 10
MIN_REPLICATIONS = 30


@dataclass
class ConsistencyReport:
    """Bias and RMSE of λ̂₁ per matrix size."""
    sizes: List[int]
    bias: List[float]
    rmse: List[float]
    replications: int
    alpha: float
    seed: int
    noise_scale: float = 1.0
    true_lambda: float = TRUE_SINGULAR_VALUES[0]
    estimates: List[List[float]] = field(default_factory = list, repr = False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sizes': list(self.sizes),
            'bias': list(self.bias),
            'rmse': list(self.rmse),
            'replications': self.replications,
            'alpha': self.alpha,
            'seed': self.seed,
            'noise_scale': self.noise_scale,
            'true_lambda': self.true_lambda,
        }


def low_rank_instance(n: int, rng: np.random.Generator, noise_scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """One (L, X) pair of the experiment, X = L + noise."""
    U, _ = scipy.linalg.qr(rng.standard_normal((n, 3)), mode = 'economic')
    V, _ = scipy.linalg.qr(rng.standard_normal((n, 3)), mode = 'economic')
    L = (U * np.array(TRUE_SINGULAR_VALUES)) @ V.T
    noise = rng.normal(0.0, noise_scale / n, (n, n)) if noise_scale > 0 else np.zeros((n, n))
    return L, L + noise


def consistency_experiment(sizes: Sequence[int], replications: int = 50, seed: int = 0, alpha: float = 0.5,
                           noise_scale: float = 1.0, config: Optional[RSvdConfig] = None,
                           workers: Optional[int] = None) -> ConsistencyReport:
    """Run every (size, replication) cell and summarize λ̂₁ per size.

    Cell seeds come from ``SeedSequence(seed).spawn``, one child per size and
    one grandchild per replication, so reports do not depend on worker count.

    Raises:
        ContractError: if a size is below 10 or replications below 30.
    """
    sizes = [int(n) for n in sizes]
    if not sizes or min(sizes) < MIN_SIZE:
        raise ContractError(f"sizes must be at least {MIN_SIZE}, got {sizes}")
    if replications < MIN_REPLICATIONS:
        raise ContractError(f"replications must be at least {MIN_REPLICATIONS}, got {replications}")
    settings = (config or RSvdConfig()).with_overrides(alpha = alpha, rank = 3)
    cells = []
    for n, child in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        cells.extend((n, grandchild) for grandchild in child.spawn(replications))

    def run(cell) -> float:
        n, seed_seq = cell
        _, X = low_rank_instance(n, np.random.default_rng(seed_seq), noise_scale)
        return float(rsvd_dpd(X, settings).lambdas[0])

    results = ordered_map(run, cells, workers)
    bias: List[float] = []
    rmse: List[float] = []
    estimates: List[List[float]] = []
    for index, n in enumerate(sizes):
        values = np.array(results[index * replications:(index + 1) * replications])
        errors = values - TRUE_SINGULAR_VALUES[0]
        bias.append(float(np.mean(errors)))
        rmse.append(math.sqrt(float(np.mean(errors * errors))))
        estimates.append(values.tolist())
        _logger.info("consistency n=%d: bias=%.3e rmse=%.3e", n, bias[-1], rmse[-1])
    return ConsistencyReport(sizes = sizes, bias = bias, rmse = rmse, replications = replications, alpha = alpha,
                             seed = seed, noise_scale = noise_scale, estimates = estimates)
