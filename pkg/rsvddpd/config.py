"""Configuration objects and environment handling for rsvddpd.

`RSvdConfig` holds the estimator knobs shared by every fit; `RunConfig` is the
CLI's resolved view of its arguments.

Example:
    >>> from rsvddpd.config import RSvdConfig
    >>> config = RSvdConfig(alpha = 0.5, rank = 2)
    >>> config.with_overrides(tol = 1e-8).tol
    1e-08
"""
from __future__ import annotations
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Union

from .errors import ConfigError

_logger = logging.getLogger(__name__)

THREADS_ENV = 'RSVD_THREADS'
LOG_LEVEL_ENV = 'RSVD_LOG_LEVEL'
LOG_FORMAT = '%(asctime)s | %(levelname)s | %(name)s:%(lineno)d | %(message)s'

INIT_MODES = ('auto', 'power', 'sums')
DEFAULT_ALPHA_GRID: tuple = tuple(round(0.1 * k, 1) for k in range(11))


@dataclass(frozen = True)
class RSvdConfig:
    """Estimator settings for `rsvd_dpd` and `rank_one_dpd`.

    Args:
        alpha: Robustness parameter in [0, 1]. 0 is the classical least-squares limit.
        rank: Number of components to extract.
        tol: Convergence tolerance on the changes in the singular value, vectors and noise scale.
        max_iter: Maximum fixed-point iterations per component.
        sigma2_floor: Lower bound on the noise-scale estimate.
        init: 'power' (classical first triple), 'sums' (normalized row/column sums)
            or 'auto' (power for alpha == 0, the lower-objective fit of both starts otherwise).
        power_iter: Iteration cap for the classical power-iteration start.
        power_tol: Tolerance for the classical power-iteration start.
        descent_guard: Take single sigma2 updates, backtracked when they would raise the
            objective, instead of solving the scale fixed point.
        sigma2_correction: 'literal' (single) or 'normalized' (per-cell) scale correction;
            see `rsvddpd.core.updates.update_sigma2`.
    """
    alpha: float = 0.5
    rank: int = 1
    tol: float = 1e-6
    max_iter: int = 100
    sigma2_floor: float = 1e-12
    init: str = 'auto'
    power_iter: int = 1000
    power_tol: float = 1e-12
    descent_guard: bool = False
    sigma2_correction: str = 'literal'

    def __post_init__(self):
        if not isinstance(self.alpha, (int, float)) or isinstance(self.alpha, bool) or not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha!r}")
        if not isinstance(self.rank, int) or isinstance(self.rank, bool) or self.rank < 1:
            raise ConfigError(f"rank must be a positive integer, got {self.rank!r}")
        if not self.tol >= 0.0 or not math.isfinite(self.tol):
            raise ConfigError(f"tol must be a nonnegative finite number, got {self.tol!r}")
        if not isinstance(self.max_iter, int) or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if not self.sigma2_floor > 0.0:
            raise ConfigError(f"sigma2_floor must be positive, got {self.sigma2_floor!r}")
        if self.init not in INIT_MODES:
            raise ConfigError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        if not isinstance(self.power_iter, int) or self.power_iter < 1:
            raise ConfigError(f"power_iter must be a positive integer, got {self.power_iter!r}")
        if self.sigma2_correction not in ('normalized', 'literal'):
            raise ConfigError(f"sigma2_correction must be 'normalized' or 'literal', got {self.sigma2_correction!r}")

    def with_overrides(self, **kwargs: Any) -> RSvdConfig:
        """Return a copy with the given fields replaced (validated again)."""
        return replace(self, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


AlphaSetting = Union[float, str]
RankSetting = Union[int, str]


@dataclass
class RunConfig:
    """Resolved command-line settings for one CLI invocation.

    `alpha` is a float or 'auto' (select from `grid`); `rank` is an int or 'auto'
    (select from `epsilon`).
    """
    command: str
    inputs: List[str] = field(default_factory = list)
    output: Optional[str] = None
    alpha: AlphaSetting = 0.5
    rank: RankSetting = 'auto'
    epsilon: float = 0.1
    k_sigma: float = 3.0
    batch: int = 120
    tol: float = 1e-6
    max_iter: int = 100
    seed: int = 0
    grid: Sequence[float] = DEFAULT_ALPHA_GRID
    workers: Optional[int] = None
    format: Optional[str] = None
    sweep: Optional[Sequence[float]] = None
    trace: bool = False

    def validate(self) -> RunConfig:
        """Check cross-field consistency. Returns self for chaining."""
        if self.alpha == 'auto':
            if not self.grid or any(not 0.0 <= g <= 1.0 for g in self.grid):
                raise ConfigError(f"alpha grid must be a nonempty subset of [0, 1], got {list(self.grid)}")
            if 1.0 not in [float(g) for g in self.grid]:
                raise ConfigError("alpha grid must contain 1.0 (the reference fit)")
        elif not isinstance(self.alpha, (int, float)) or not 0.0 <= float(self.alpha) <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1] or 'auto', got {self.alpha!r}")
        if self.rank == 'auto':
            if not 0.0 < self.epsilon < 1.0:
                raise ConfigError(f"epsilon must be in (0, 1) when rank is 'auto', got {self.epsilon}")
        elif not isinstance(self.rank, int) or self.rank < 1:
            raise ConfigError(f"rank must be a positive integer or 'auto', got {self.rank!r}")
        if self.k_sigma <= 0:
            raise ConfigError(f"k_sigma must be positive, got {self.k_sigma}")
        if self.batch < 2:
            raise ConfigError(f"batch must be at least 2 frames, got {self.batch}")
        return self

    def estimator(self, alpha: Optional[float] = None, rank: Optional[int] = None) -> RSvdConfig:
        """Build the `RSvdConfig` for a fit, filling in resolved alpha/rank."""
        resolved_alpha = alpha if alpha is not None else self.alpha
        resolved_rank = rank if rank is not None else self.rank
        if resolved_alpha == 'auto' or resolved_rank == 'auto':
            raise ConfigError("alpha and rank must be resolved before building an estimator config")
        return RSvdConfig(alpha = float(resolved_alpha), rank = int(resolved_rank), tol = self.tol, max_iter = self.max_iter)


def resolve_workers(requested: Optional[int] = None) -> int:
    """Number of worker threads: `requested` capped by RSVD_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV)
    cap: Optional[int] = None
    if raw:
        try:
            cap = int(raw)
            if cap < 1:
                raise ValueError(raw)
        except ValueError:
            _logger.warning("ignoring invalid %s=%r (expected a positive integer)", THREADS_ENV, raw)
            cap = 1
    if requested is None:
        return cap if cap is not None else 1
    if requested < 1:
        raise ConfigError(f"workers must be a positive integer, got {requested}")
    return min(requested, cap) if cap is not None else requested


def configure_logging(level: Optional[str] = None) -> None:
    """Install a single stderr handler on the package logger. CLI use only."""
    name = (level or os.environ.get(LOG_LEVEL_ENV) or 'WARNING').upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level {name!r}")
    logger = logging.getLogger('rsvddpd')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(numeric)
