"""Robust SVD estimator: weights, fixed-point updates, rank-one fit and deflation."""
from .decompose import classical_svd, iter_classical_triples, reconstruct, rsvd_dpd
from .gram_schmidt import orthogonalize_against
from .rank_one import power_iteration, rank_one_dpd, sums_start
from .types import (
    DataMatrix,
    IterationRecord,
    RankOneResult,
    RSvdModel,
    SvdTriple,
    apply_sign_convention,
    as_data_matrix,
)
from .updates import Sigma2Step, scale_correction, solve_sigma2, update_left, update_right, update_sigma2
from .weights import dpd_weight, fit_objective, least_squares_objective, mdpde_objective, profile_objective

__all__ = [
    'DataMatrix',
    'IterationRecord',
    'RankOneResult',
    'RSvdModel',
    'Sigma2Step',
    'SvdTriple',
    'apply_sign_convention',
    'as_data_matrix',
    'classical_svd',
    'dpd_weight',
    'fit_objective',
    'iter_classical_triples',
    'least_squares_objective',
    'mdpde_objective',
    'orthogonalize_against',
    'power_iteration',
    'profile_objective',
    'rank_one_dpd',
    'reconstruct',
    'rsvd_dpd',
    'scale_correction',
    'solve_sigma2',
    'sums_start',
    'update_left',
    'update_right',
    'update_sigma2',
]
