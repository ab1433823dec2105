"""Seeded synthetic videos: low-rank background, a moving square, camera tampering.

The background of frame t is ``T1 * (1 + illumination * sin(2πt/p)) + Σ_k Tk * cos(2πkt/p)``
with a texture T1 drawn from [0.25, 0.75] and small zero-mean textures Tk for
k = 2..rank. The square is drawn with wraparound at the frame edges. Tampering
is applied to the composite frames and never enters the ground-truth mask.

Example:
    >>> video = generate_synthetic(SynthSpec(height = 16, width = 16, frames = 8, object_size = 3))
    >>> video.sequence.count, int(video.truth.bits[0].sum())
    (8, 9)
"""
from __future__ import annotations
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np
from scipy import ndimage

from ..errors import ConfigError
from ..video.background import ForegroundMask
from ..video.frames import FrameSequence

_logger = logging.getLogger(__name__)

CONTAMINATIONS = ('salt_pepper', 'cover', 'defocus_blur', 'gaussian_noise', 'moved')
COVER_INTENSITY = 0.05


@dataclass(frozen = True)
class SynthSpec:
    """Parameters of a synthetic video.

    Args:
        height, width, frames: Video dimensions.
        background_rank: Rank of the clean background.
        illumination: Relative amplitude of the global brightness oscillation.
        object_size: Side of the moving square in pixels; 0 for no object.
        object_start: (row, col) of the square's top-left corner in frame 1.
        velocity: (rows, cols) advanced per frame.
        object_intensity: Intensity of the square.
        contamination: One of CONTAMINATIONS, or None.
        contamination_frames: 1-based frame numbers to tamper with.
        density: Share of pixels hit by salt-and-pepper noise.
        cover_fraction: Share of the frame area covered by the 'cover' block.
        blur_size: Box-filter width of 'defocus_blur'.
        noise_sd: Standard deviation of 'gaussian_noise'.
        shift: (rows, cols) displacement of 'moved' frames.
        quantize: Round frames to 8-bit levels, as a PGM round trip would.
        seed: Seed of every random draw.
    """
    height: int = 64
    width: int = 64
    frames: int = 40
    background_rank: int = 1
    illumination: float = 0.0
    object_size: int = 0
    object_start: Tuple[int, int] = (0, 0)
    velocity: Tuple[int, int] = (1, 0)
    object_intensity: float = 0.9
    contamination: Optional[str] = None
    contamination_frames: Tuple[int, ...] = field(default = ())
    density: float = 0.05
    cover_fraction: float = 0.25
    blur_size: int = 5
    noise_sd: float = 0.1
    shift: Tuple[int, int] = (3, 3)
    quantize: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.height < 2 or self.width < 2 or self.frames < 2:
            raise ConfigError(f"video must be at least 2x2 with 2 frames, got {self.height}x{self.width}x{self.frames}")
        if self.background_rank < 1 or self.background_rank > min(self.frames, self.height * self.width):
            raise ConfigError(f"background_rank must be in [1, {min(self.frames, self.height * self.width)}], "
                              f"got {self.background_rank}")
        if not 0.0 <= self.illumination <= 0.3:
            raise ConfigError(f"illumination must be in [0, 0.3], got {self.illumination}")
        if self.object_size < 0 or self.object_size > min(self.height, self.width):
            raise ConfigError(f"object of size {self.object_size} does not fit a {self.height}x{self.width} frame")
        if not 0.0 <= self.object_intensity <= 1.0:
            raise ConfigError(f"object_intensity must be in [0, 1], got {self.object_intensity}")
        if self.contamination is not None and self.contamination not in CONTAMINATIONS:
            raise ConfigError(f"contamination must be one of {CONTAMINATIONS}, got {self.contamination!r}")
        bad = [t for t in self.contamination_frames if not 1 <= t <= self.frames]
        if bad:
            raise ConfigError(f"contamination frames must lie in [1, {self.frames}], got {bad}")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigError(f"density must be in [0, 1], got {self.density}")
        if not 0.0 < self.cover_fraction <= 1.0:
            raise ConfigError(f"cover_fraction must be in (0, 1], got {self.cover_fraction}")
        if self.blur_size < 1:
            raise ConfigError(f"blur_size must be positive, got {self.blur_size}")
        if self.noise_sd < 0:
            raise ConfigError(f"noise_sd must be nonnegative, got {self.noise_sd}")
        object.__setattr__(self, 'object_start', tuple(self.object_start))
        object.__setattr__(self, 'velocity', tuple(self.velocity))
        object.__setattr__(self, 'shift', tuple(self.shift))
        object.__setattr__(self, 'contamination_frames', tuple(sorted(set(self.contamination_frames))))

    def to_dict(self) -> Dict[str, Any]:
        doc = asdict(self)
        for key in ('object_start', 'velocity', 'shift', 'contamination_frames'):
            doc[key] = list(doc[key])
        return doc

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> SynthSpec:
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(f"invalid synthetic spec: {exc}") from exc


class SyntheticVideo(NamedTuple):
    """Generated frames, the object's ground-truth mask and the clean background (p, h, w)."""
    sequence: FrameSequence
    truth: ForegroundMask
    background: np.ndarray


def _background(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(spec.frames)
    shape = (spec.height, spec.width)
    textures = [rng.uniform(0.25, 0.75, shape)]
    textures += [rng.uniform(-0.05, 0.05, shape) for _ in range(spec.background_rank - 1)]
    coefficients = [1.0 + spec.illumination * np.sin(2.0 * np.pi * t / spec.frames)]
    coefficients += [np.cos(2.0 * np.pi * k * t / spec.frames) for k in range(2, spec.background_rank + 1)]
    background = sum(c[:, None, None] * texture[None] for c, texture in zip(coefficients, textures))
    return np.clip(background, 0.0, 1.0)


def _object_mask(spec: SynthSpec) -> np.ndarray:
    bits = np.zeros((spec.frames, spec.height, spec.width), dtype = bool)
    if spec.object_size == 0:
        return bits
    offsets = np.arange(spec.object_size)
    for t in range(spec.frames):
        rows = (spec.object_start[0] + t * spec.velocity[0] + offsets) % spec.height
        cols = (spec.object_start[1] + t * spec.velocity[1] + offsets) % spec.width
        bits[t][np.ix_(rows, cols)] = True
    return bits


def _tamper(frame: np.ndarray, spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    kind = spec.contamination
    if kind == 'salt_pepper':
        hit = rng.random(frame.shape) < spec.density
        salt = (rng.random(frame.shape) < 0.5).astype(np.float64)
        return np.where(hit, salt, frame)
    if kind == 'cover':
        rows = max(1, int(round(np.sqrt(spec.cover_fraction) * spec.height)))
        cols = max(1, int(round(np.sqrt(spec.cover_fraction) * spec.width)))
        top = int(rng.integers(0, spec.height - rows + 1))
        left = int(rng.integers(0, spec.width - cols + 1))
        out = frame.copy()
        out[top:top + rows, left:left + cols] = COVER_INTENSITY
        return out
    if kind == 'defocus_blur':
        return ndimage.uniform_filter(frame, size = spec.blur_size, mode = 'nearest')
    if kind == 'gaussian_noise':
        return np.clip(frame + rng.normal(0.0, spec.noise_sd, frame.shape), 0.0, 1.0)
    if kind == 'moved':
        return np.roll(frame, spec.shift, axis = (0, 1))
    return frame


def generate_synthetic(spec: SynthSpec) -> SyntheticVideo:
    """Build the video described by `spec`; a pure function of the spec."""
    rng = np.random.default_rng(spec.seed)
    background = _background(spec, rng)
    truth = _object_mask(spec)
    frames = np.where(truth, spec.object_intensity, background)
    if spec.contamination is not None:
        for number in spec.contamination_frames:
            frames[number - 1] = _tamper(frames[number - 1], spec, rng)
    if spec.quantize:
        frames = np.rint(frames * 255.0) / 255.0
    _logger.debug("synthetic video %dx%dx%d, contamination=%s on %s", spec.height, spec.width, spec.frames,
                  spec.contamination, list(spec.contamination_frames))
    sequence = FrameSequence(height = spec.height, width = spec.width, frames = frames)
    mask = ForegroundMask(height = spec.height, width = spec.width, bits = truth)
    return SyntheticVideo(sequence, mask, background)
