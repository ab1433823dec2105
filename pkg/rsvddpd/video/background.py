"""Background modelling and foreground extraction for frame sequences."""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import DEFAULT_ALPHA_GRID, RSvdConfig
from ..core.decompose import reconstruct, rsvd_dpd
from ..core.types import DataMatrix, RSvdModel
from ..errors import ContractError
from ..parallel import ordered_map
from ..select import AlphaSelection, select_alpha, select_rank
from .frames import FrameSequence, matricize, rasters, split_batches

_logger = logging.getLogger(__name__)

DEFAULT_K_SIGMA = 3.0
DEFAULT_BATCH = 120


@dataclass
class BackgroundModel:
    """A fitted model and its hw x p background reconstruction (unclamped).

    `selection` is set when alpha was chosen by `select_alpha`.
    """
    model: RSvdModel
    height: int
    width: int
    count: int
    background: DataMatrix
    selection: Optional[AlphaSelection] = None

    def frames(self) -> np.ndarray:
        """Background as (p, h, w) rasters, values as reconstructed."""
        return rasters(self.background, self.height, self.width)


@dataclass
class ForegroundMask:
    """Boolean foreground rasters of shape (p, h, w); True marks foreground."""
    height: int
    width: int
    bits: np.ndarray = field(repr = False)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype = bool)
        if bits.ndim != 3 or bits.shape[1:] != (self.height, self.width):
            raise ContractError(f"mask bits must have shape (p, {self.height}, {self.width}), got {bits.shape}")
        self.bits = bits

    @property
    def count(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.bits.shape


def model_background(seq: FrameSequence, alpha: Union[float, str] = 0.5, rank: Optional[int] = None,
                     epsilon: float = 0.1, config: Optional[RSvdConfig] = None,
                     grid: Sequence[float] = DEFAULT_ALPHA_GRID, workers: Optional[int] = None) -> BackgroundModel:
    """Fit the low-rank background of a sequence.

    Args:
        seq: Frames to model (at least 2).
        alpha: Robustness parameter, or 'auto' to run `select_alpha` over `grid`.
        rank: Number of components; chosen by `select_rank(X, epsilon)` when None.
        epsilon: Unexplained share allowed when choosing the rank.
        config: Base estimator settings; alpha and rank override it.
        grid: Candidate alphas when alpha is 'auto'.
        workers: Worker threads for the alpha grid.

    Returns:
        BackgroundModel whose background is exactly `reconstruct(model)`.
    """
    X = matricize(seq)
    if rank is None:
        rank = select_rank(X, epsilon).chosen_rank
    selection = None
    if alpha == 'auto':
        selection = select_alpha(X, rank, grid, config = config, workers = workers)
        model = selection.chosen_model
    else:
        settings = (config or RSvdConfig()).with_overrides(alpha = float(alpha), rank = rank)
        model = rsvd_dpd(X, settings)
    _logger.info("background model: %d frames of %dx%d, alpha=%g, rank=%d, sigma2=%.4g",
                 seq.count, seq.height, seq.width, model.alpha, model.rank, model.sigma2)
    return BackgroundModel(model = model, height = seq.height, width = seq.width, count = seq.count,
                           background = reconstruct(model), selection = selection)


def extract_foreground(seq: FrameSequence, bg: BackgroundModel,
                       k_sigma: float = DEFAULT_K_SIGMA) -> Tuple[np.ndarray, ForegroundMask]:
    """Residuals X - background and the mask |residual| > k_sigma·σ.

    Returns:
        (residuals, ForegroundMask) with residuals of shape hw x p.

    Raises:
        ContractError: if the sequence and model dimensions differ or k_sigma <= 0.
    """
    if k_sigma <= 0:
        raise ContractError(f"k_sigma must be positive, got {k_sigma}")
    if (seq.height, seq.width, seq.count) != (bg.height, bg.width, bg.count):
        raise ContractError(f"sequence is {seq.count}x{seq.height}x{seq.width} frames but the background model "
                            f"is {bg.count}x{bg.height}x{bg.width}")
    residuals = matricize(seq) - bg.background
    threshold = k_sigma * float(np.sqrt(bg.model.sigma2))
    bits = rasters(np.abs(residuals) > threshold, seq.height, seq.width)
    return residuals, ForegroundMask(height = seq.height, width = seq.width, bits = bits)


class BatchResult(NamedTuple):
    """One batch of the background pipeline."""
    index: int
    sequence: FrameSequence
    background: BackgroundModel
    residuals: np.ndarray
    mask: ForegroundMask


def process_sequence(seq: FrameSequence, alpha: Union[float, str] = 0.5, rank: Optional[int] = None,
                     epsilon: float = 0.1, k_sigma: float = DEFAULT_K_SIGMA, batch: int = DEFAULT_BATCH,
                     config: Optional[RSvdConfig] = None, workers: Optional[int] = None,
                     grid: Sequence[float] = DEFAULT_ALPHA_GRID) -> List[BatchResult]:
    """Model consecutive batches independently and extract their foregrounds.

    Batches run through `ordered_map`; results come back in frame order. With
    alpha = 'auto' every batch selects its own alpha.
    """
    def run(item) -> BatchResult:
        index, part = item
        background = model_background(part, alpha, rank, epsilon, config, grid)
        residuals, mask = extract_foreground(part, background, k_sigma)
        return BatchResult(index, part, background, residuals, mask)

    batches = split_batches(seq, batch)
    _logger.info("processing %d frame(s) in %d batch(es) of up to %d", seq.count, len(batches), batch)
    return ordered_map(run, list(enumerate(batches)), workers)


def stitch_masks(results: List[BatchResult]) -> ForegroundMask:
    first = results[0].mask
    return ForegroundMask(height = first.height, width = first.width,
                          bits = np.concatenate([result.mask.bits for result in results]))
