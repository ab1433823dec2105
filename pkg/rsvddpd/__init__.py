"""rsvddpd: robust singular value decomposition with the density power divergence.

Rank-one fits by alternating weighted least squares, deflation with
Gram-Schmidt orthogonalization, alpha and rank selection, and a video
background/foreground pipeline built on top.

Example:
    >>> import numpy as np
    >>> from rsvddpd import RSvdConfig, rsvd_dpd
    >>> X = np.ones((10, 10))
    >>> X[0, 0] = 101.0
    >>> model = rsvd_dpd(X, RSvdConfig(alpha = 0.75, rank = 1))
    >>> round(float(model.lambdas[0]))
    10
"""
__version__ = "0.1.0"

# Estimator core
from .config import DEFAULT_ALPHA_GRID, RSvdConfig, RunConfig
from .core import RSvdModel, SvdTriple, classical_svd, rank_one_dpd, reconstruct, rsvd_dpd
from .errors import (
    ContractError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    FormatError,
    RankDeficiencyError,
    RsvdError,
    RsvdWarning,
)

# Selection, I/O and the video layer
from .matrix_io import read_matrix, read_model, write_matrix, write_model
from .select import AlphaSelection, RankSelection, select_alpha, select_rank
from . import eval, video

__all__ = [
    'AlphaSelection',
    'ContractError',
    'ConvergenceError',
    'DEFAULT_ALPHA_GRID',
    'DegenerateInputError',
    'DomainError',
    'FormatError',
    'RSvdConfig',
    'RSvdModel',
    'RankDeficiencyError',
    'RankSelection',
    'RsvdError',
    'RsvdWarning',
    'RunConfig',
    'SvdTriple',
    'classical_svd',
    'rank_one_dpd',
    'read_matrix',
    'read_model',
    'reconstruct',
    'rsvd_dpd',
    'select_alpha',
    'select_rank',
    'video',
    'write_matrix',
    'write_model',
]
