"""Wall-clock cost of robust fits on seeded matrices.

Every fit runs with tol = 0 so it performs exactly `iterations` sweeps per
component, which makes per-iteration times comparable across sizes.
"""
from __future__ import annotations
import logging
import math
import time
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from ..config import RSvdConfig
from ..core.decompose import rsvd_dpd
from ..errors import ContractError, NonConvergenceWarning

_logger = logging.getLogger(__name__)

MIN_RUNS = 5
Size = Union[int, Tuple[int, int]]


@dataclass
class TimingRow:
    n_rows: int
    n_cols: int
    runs: int
    iterations: int
    mean_seconds: float
    sd_seconds: float

    @property
    def entries(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def seconds_per_frame(self) -> float:
        return self.mean_seconds / self.n_cols

    @property
    def seconds_per_iteration(self) -> float:
        return self.mean_seconds / self.iterations

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_rows': self.n_rows,
            'n_cols': self.n_cols,
            'entries': self.entries,
            'runs': self.runs,
            'iterations': self.iterations,
            'mean_seconds': self.mean_seconds,
            'sd_seconds': self.sd_seconds,
            'seconds_per_frame': self.seconds_per_frame,
            'seconds_per_iteration': self.seconds_per_iteration,
        }


@dataclass
class TimingReport:
    alpha: float
    rank: int
    rows: List[TimingRow]

    def to_dict(self) -> Dict[str, Any]:
        return {'alpha': self.alpha, 'rank': self.rank, 'rows': [row.to_dict() for row in self.rows]}


def _dimensions(size: Size) -> Tuple[int, int]:
    if isinstance(size, int):
        return size, size
    n_rows, n_cols = size
    return int(n_rows), int(n_cols)


def benchmark_matrix(n_rows: int, n_cols: int, rank: int, seed: int = 0) -> np.ndarray:
    """Seeded low-rank matrix with 1% Gaussian noise."""
    rng = np.random.default_rng(seed)
    low_rank = rng.standard_normal((n_rows, rank)) @ rng.standard_normal((rank, n_cols))
    return low_rank + 0.01 * rng.standard_normal((n_rows, n_cols))


def timing_benchmark(sizes: Sequence[Size], alpha: float = 0.5, rank: int = 1, runs: int = MIN_RUNS,
                     iterations: int = 20, seed: int = 0) -> TimingReport:
    """Time `runs` fits per size and report mean and sd of the wall-clock seconds.

    Sizes are n (square) or (n_rows, n_cols) pairs. Fits use the power start
    only, so every run does the same work.

    Raises:
        ContractError: if runs < 5 or iterations < 1.
    """
    if runs < MIN_RUNS:
        raise ContractError(f"runs must be at least {MIN_RUNS}, got {runs}")
    if iterations < 1:
        raise ContractError(f"iterations must be positive, got {iterations}")
    config = RSvdConfig(alpha = alpha, rank = rank, tol = 0.0, max_iter = iterations, init = 'power')
    rows = []
    for size in sizes:
        n_rows, n_cols = _dimensions(size)
        X = benchmark_matrix(n_rows, n_cols, rank, seed)
        samples = []
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', NonConvergenceWarning)
            for _ in range(runs):
                start = time.perf_counter()
                rsvd_dpd(X, config)
                samples.append(time.perf_counter() - start)
        mean = float(np.mean(samples))
        sd = float(np.std(samples, ddof = 1)) if len(samples) > 1 else math.nan
        rows.append(TimingRow(n_rows, n_cols, runs, iterations * rank, mean, sd))
        _logger.info("timing %dx%d: %.4g s (sd %.2g) over %d runs", n_rows, n_cols, mean, sd, runs)
    return TimingReport(alpha = alpha, rank = rank, rows = rows)
