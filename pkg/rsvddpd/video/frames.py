"""Frame sequences and their matrix form.

A `FrameSequence` stores p grayscale rasters as a (p, h, w) float64 array.
`matricize` turns it into the hw x p data matrix whose column i is frame i in
row-major raster order; `devectorize` is its inverse.
"""
from __future__ import annotations
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.types import DataMatrix, as_data_matrix
from ..errors import ContractError, FormatError
from ..parallel import ordered_map
from .pnm import read_pnm, write_mask, write_pgm

_logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

FRAME_SUFFIXES = ('.pgm', '.ppm', '.pnm')
# intensities may sit this far outside [0, 1] from floating-point round-off
RANGE_SLACK = 1e-9


@dataclass(frozen = True)
class FrameSequence:
    """Ordered grayscale frames sharing one height and width, intensities in [0, 1].

    Args:
        height: Rows per frame.
        width: Columns per frame.
        frames: Array of shape (p, height, width).
        names: Optional source file names, one per frame.
    """
    height: int
    width: int
    frames: np.ndarray
    names: Tuple[str, ...] = field(default = ())

    def __post_init__(self):
        frames = np.array(self.frames, dtype = np.float64)
        if frames.ndim != 3 or frames.shape[1:] != (self.height, self.width):
            raise FormatError(f"frames must have shape (p, {self.height}, {self.width}), got {frames.shape}")
        if self.height < 1 or self.width < 1:
            raise FormatError(f"frame dimensions must be positive, got {self.height}x{self.width}")
        if not np.all(np.isfinite(frames)):
            raise FormatError("frames contain NaN or Inf")
        if frames.size and (frames.min() < -RANGE_SLACK or frames.max() > 1.0 + RANGE_SLACK):
            raise FormatError(f"intensities must lie in [0, 1], got range [{frames.min():.6g}, {frames.max():.6g}]")
        if self.names and len(self.names) != frames.shape[0]:
            raise FormatError(f"expected {frames.shape[0]} frame names, got {len(self.names)}")
        frames.flags.writeable = False
        object.__setattr__(self, 'frames', frames)
        object.__setattr__(self, 'names', tuple(self.names))

    @classmethod
    def from_frames(cls, rasters: Sequence[np.ndarray], names: Sequence[str] = ()) -> FrameSequence:
        """Stack individual 2-D rasters.

        Raises:
            FormatError: if the list is empty or the rasters differ in size.
        """
        if len(rasters) == 0:
            raise FormatError("a frame sequence needs at least one frame")
        shapes = {np.shape(raster) for raster in rasters}
        if len(shapes) != 1:
            raise FormatError(f"inconsistent frame dimensions: {sorted(shapes)}")
        shape = shapes.pop()
        if len(shape) != 2:
            raise FormatError(f"frames must be 2-D rasters, got shape {shape}")
        return cls(height = shape[0], width = shape[1], frames = np.stack(rasters), names = tuple(names))

    @property
    def count(self) -> int:
        return self.frames.shape[0]

    def __len__(self) -> int:
        return self.count

    def slice(self, start: int, stop: int) -> FrameSequence:
        names = self.names[start:stop] if self.names else ()
        return FrameSequence(height = self.height, width = self.width, frames = self.frames[start:stop], names = names)

    def scaled(self, factor: float) -> FrameSequence:
        return FrameSequence(height = self.height, width = self.width, frames = self.frames * factor, names = self.names)


def matricize(seq: FrameSequence) -> DataMatrix:
    """hw x p matrix with frame i, flattened row-major, as column i.

    Raises:
        ContractError: if the sequence has fewer than 2 frames.

    Example:
        >>> seq = FrameSequence.from_frames([np.array([[0.1, 0.2], [0.3, 0.4]]), np.array([[0.5, 0.6], [0.7, 0.8]])])
        >>> matricize(seq)[:, 1].tolist()
        [0.5, 0.6, 0.7, 0.8]
    """
    if seq.count < 2:
        raise ContractError(f"matricize needs at least 2 frames, got {seq.count}")
    return as_data_matrix(seq.frames.reshape(seq.count, seq.height * seq.width).T)


def rasters(X: np.ndarray, height: int, width: int) -> np.ndarray:
    """(p, height, width) view of the columns of an hw x p matrix, values untouched."""
    X = np.asarray(X, dtype = np.float64)
    if X.ndim != 2 or X.shape[0] != height * width:
        raise ContractError(f"matrix with {height * width} rows expected for {height}x{width} frames, got shape {X.shape}")
    return X.T.reshape(X.shape[1], height, width)


def devectorize(X: np.ndarray, height: int, width: int, names: Sequence[str] = ()) -> FrameSequence:
    """Inverse of `matricize`.

    Raises:
        ContractError: if the row count is not height * width.
        FormatError: if a value lies outside [0, 1].
    """
    return FrameSequence(height = height, width = width, frames = rasters(X, height, width), names = tuple(names))


def list_frame_files(directory: PathLike) -> List[Path]:
    """PNM files of a directory in lexicographic file-name order."""
    root = Path(directory)
    if not root.is_dir():
        raise FormatError(f"not a frame directory: {root}")
    files = sorted((path for path in root.iterdir() if path.suffix.lower() in FRAME_SUFFIXES), key = lambda path: path.name)
    if not files:
        raise FormatError(f"no PGM/PPM frames found in {root}")
    return files


def read_frame_dir(directory: PathLike) -> FrameSequence:
    """Load every frame of a directory.

    Raises:
        FormatError: on unreadable frames or frames of differing size.
    """
    files = list_frame_files(directory)
    images = [read_pnm(path) for path in files]
    shapes = {raster.shape for raster in images}
    if len(shapes) != 1:
        detail = ', '.join(f"{path.name}={raster.shape[1]}x{raster.shape[0]}" for path, raster in zip(files, images))
        raise FormatError(f"inconsistent frame sizes in {directory}: {detail}")
    _logger.info("read %d frames of %dx%d from %s", len(files), images[0].shape[1], images[0].shape[0], directory)
    return FrameSequence.from_frames(images, names = [path.name for path in files])


def frame_names(count: int, prefix: str = 'frame', start: int = 0) -> List[str]:
    """Zero-padded names that sort lexicographically in frame order."""
    width = max(6, len(str(start + count)))
    return [f"{prefix}_{index:0{width}d}.pgm" for index in range(start, start + count)]


def write_frame_dir(directory: PathLike, frames: np.ndarray, names: Optional[Sequence[str]] = None, *,
                    mask: bool = False, workers: Optional[int] = None) -> List[Path]:
    """Write (p, h, w) rasters as PGM files, clamped and quantized; boolean masks as {0, 255}."""
    root = Path(directory)
    root.mkdir(parents = True, exist_ok = True)
    frames = np.asarray(frames)
    names = list(names) if names else frame_names(frames.shape[0])
    if len(names) != frames.shape[0]:
        raise ContractError(f"expected {frames.shape[0]} names, got {len(names)}")
    writer = write_mask if mask else write_pgm
    return ordered_map(lambda item: writer(root / item[0], item[1]), list(zip(names, frames)), workers)


def split_batches(seq: FrameSequence, batch: int) -> List[FrameSequence]:
    """Consecutive batches of `batch` frames.

    A trailing batch of a single frame is merged into the previous one, since a
    fit needs at least two frames.
    """
    if batch < 2:
        raise ContractError(f"batch size must be at least 2, got {batch}")
    bounds = list(range(0, seq.count, batch)) + [seq.count]
    if len(bounds) > 2 and bounds[-1] - bounds[-2] == 1:
        del bounds[-2]
    return [seq.slice(start, stop) for start, stop in zip(bounds[:-1], bounds[1:])]
