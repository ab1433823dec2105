"""Binary PGM (P5) and PPM (P6) frames.

Rasters are float64 arrays of shape (height, width) with intensities in
[0, 1]. Reading divides the 8-bit samples by maxval; color frames are reduced
to luma with the Rec. 601 weights. Writing always produces P5 with maxval 255,
quantized as round(255 * clip(x, 0, 1)).

Example:
    >>> raster = np.array([[0.0, 0.5], [1.0, 0.25]])
    >>> encode_pgm(raster)[:11]
    b'P5\\n2 2\\n255\\n'
"""
from __future__ import annotations
import os
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from ..errors import FormatError
from ..matrix_io import atomic_write

PathLike = Union[str, os.PathLike]

LUMA_601 = np.array([0.299, 0.587, 0.114])
_CHANNELS = {b'P5': 1, b'P6': 3}
_WHITESPACE = b' \t\n\r\v\f'


def _header_tokens(data: bytes, count: int) -> Tuple[list, int]:
    """Read `count` whitespace-separated header tokens, skipping '#' comments.

    Returns the tokens and the offset just past the single whitespace byte that
    ends the last one.
    """
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos >= len(data):
            raise FormatError("truncated PNM header")
        if data[pos] == ord('#'):
            end = data.find(b'\n', pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != ord('#'):
            pos += 1
        tokens.append(data[start:pos])
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("PNM header must end with a single whitespace byte")
    return tokens, pos + 1


def decode_pnm(data: bytes, source: str = '<bytes>') -> np.ndarray:
    """Decode a binary P5/P6 image into a grayscale raster in [0, 1].

    Raises:
        FormatError: for other magics, maxval outside 1..255, bad dimensions
            or a payload of the wrong length.
    """
    if data[:2] not in _CHANNELS:
        raise FormatError(f"{source}: unsupported magic {data[:2]!r} (expected P5 or P6)")
    channels = _CHANNELS[data[:2]]
    try:
        tokens, offset = _header_tokens(data[2:], 3)
        width, height, maxval = (int(token) for token in tokens)
    except ValueError as exc:
        raise FormatError(f"{source}: malformed PNM header ({exc})") from exc
    except FormatError as exc:
        raise FormatError(f"{source}: {exc}") from exc
    if width < 1 or height < 1:
        raise FormatError(f"{source}: image dimensions must be positive, got {width}x{height}")
    if not 1 <= maxval <= 255:
        raise FormatError(f"{source}: only 8-bit samples are supported, got maxval {maxval}")
    payload = data[2 + offset:]
    expected = width * height * channels
    if len(payload) != expected:
        raise FormatError(f"{source}: expected {expected} sample bytes, got {len(payload)}")
    samples = np.frombuffer(payload, dtype = np.uint8).astype(np.float64)
    if np.any(samples > maxval):
        raise FormatError(f"{source}: sample exceeds maxval {maxval}")
    samples /= maxval
    if channels == 3:
        return samples.reshape(height, width, 3) @ LUMA_601
    return samples.reshape(height, width)


def read_pnm(path: PathLike) -> np.ndarray:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return decode_pnm(data, str(path))


def quantize(raster: np.ndarray) -> np.ndarray:
    """round(255 * clip(x, 0, 1)) as uint8."""
    return np.rint(255.0 * np.clip(raster, 0.0, 1.0)).astype(np.uint8)


def encode_pgm(raster: np.ndarray) -> bytes:
    raster = np.asarray(raster, dtype = np.float64)
    if raster.ndim != 2:
        raise FormatError(f"a PGM raster must be 2-D, got shape {raster.shape}")
    height, width = raster.shape
    return f"P5\n{width} {height}\n255\n".encode('ascii') + quantize(raster).tobytes()


def write_pgm(path: PathLike, raster: np.ndarray) -> Path:
    return atomic_write(path, encode_pgm(raster))


def write_mask(path: PathLike, bits: np.ndarray) -> Path:
    """Write a boolean raster as a {0, 255} PGM."""
    return write_pgm(path, np.asarray(bits, dtype = bool).astype(np.float64))


def read_mask(path: PathLike) -> np.ndarray:
    """Read a mask PGM; pixels above half intensity are foreground."""
    return read_pnm(path) > 0.5
