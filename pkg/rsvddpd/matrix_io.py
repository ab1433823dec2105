"""Matrix and model file formats.

- CSV: one matrix row per line, comma separated, '.' decimal point, no header.
- RSVD binary: magic ``b'RSVD'``, u32 n_rows, u32 n_cols, then n_rows*n_cols
  float64 values in row-major order, all little-endian.
- Model JSON: `RSvdModel.to_dict()` written UTF-8 with sorted keys.

Every writer goes through `atomic_write`, which writes a temporary file in the
target directory and renames it into place.
"""
from __future__ import annotations
import json
import logging
import os
import struct
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .core.types import DataMatrix, RSvdModel, as_data_matrix
from .errors import ConfigError, FormatError

_logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

MAGIC = b'RSVD'
HEADER = struct.Struct('<4sII')
FORMAT_CSV = 'csv'
FORMAT_BINARY = 'binary'
FORMATS = (FORMAT_CSV, FORMAT_BINARY)
_BINARY_SUFFIXES = ('.bin', '.rsvd')


def atomic_write(path: PathLike, data: Union[bytes, str]) -> Path:
    """Write `data` to `path` via a same-directory temporary file and rename."""
    target = Path(path)
    target.parent.mkdir(parents = True, exist_ok = True)
    payload = data.encode('utf-8') if isinstance(data, str) else data
    fd, tmp_name = tempfile.mkstemp(prefix = f".{target.name}.", suffix = '.tmp', dir = target.parent)
    try:
        with os.fdopen(fd, 'wb') as handle:
            handle.write(payload)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def detect_format(path: PathLike, declared: Optional[str] = None) -> str:
    """Resolve the matrix format from an explicit flag, the file suffix or the magic bytes."""
    if declared is not None:
        if declared not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {declared!r}")
        return declared
    target = Path(path)
    if target.suffix.lower() in _BINARY_SUFFIXES:
        return FORMAT_BINARY
    if target.suffix.lower() == '.csv':
        return FORMAT_CSV
    try:
        with open(target, 'rb') as handle:
            head = handle.read(len(MAGIC))
    except OSError as exc:
        raise FormatError(f"cannot read {target}: {exc}") from exc
    return FORMAT_BINARY if head == MAGIC else FORMAT_CSV


def read_csv(path: PathLike) -> DataMatrix:
    """Read a headerless CSV matrix.

    Raises:
        FormatError: if the file is missing, ragged, non-numeric or non-finite.
    """
    try:
        values = np.loadtxt(path, delimiter = ',', dtype = np.float64, ndmin = 2)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise FormatError(f"malformed CSV matrix in {path}: {exc}") from exc
    if values.size == 0:
        raise FormatError(f"empty CSV matrix in {path}")
    return as_data_matrix(values)


def write_csv(path: PathLike, X: np.ndarray) -> Path:
    """Write X as CSV with round-trip precision."""
    rows = [','.join(repr(float(x)) for x in row) for row in np.asarray(X, dtype = np.float64)]
    return atomic_write(path, '\n'.join(rows) + '\n')


def read_binary(path: PathLike) -> DataMatrix:
    """Read an RSVD binary matrix.

    Raises:
        FormatError: on a bad magic, a truncated payload or trailing bytes.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if len(raw) < HEADER.size:
        raise FormatError(f"{path}: file too short for an RSVD header ({len(raw)} bytes)")
    magic, n_rows, n_cols = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    expected = HEADER.size + 8 * n_rows * n_cols
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for a {n_rows}x{n_cols} matrix, got {len(raw)}")
    values = np.frombuffer(raw, dtype = '<f8', offset = HEADER.size).reshape(n_rows, n_cols)
    return as_data_matrix(values)


def write_binary(path: PathLike, X: np.ndarray) -> Path:
    X = np.asarray(X, dtype = np.float64)
    if X.ndim != 2:
        raise FormatError(f"binary matrices must be 2-D, got shape {X.shape}")
    payload = HEADER.pack(MAGIC, X.shape[0], X.shape[1]) + np.ascontiguousarray(X, dtype = '<f8').tobytes()
    return atomic_write(path, payload)


def read_matrix(path: PathLike, fmt: Optional[str] = None) -> DataMatrix:
    """Read a matrix in either supported format."""
    if not Path(path).exists():
        raise FormatError(f"no such file: {path}")
    resolved = detect_format(path, fmt)
    _logger.debug("reading %s matrix from %s", resolved, path)
    return read_binary(path) if resolved == FORMAT_BINARY else read_csv(path)


def write_matrix(path: PathLike, X: np.ndarray, fmt: Optional[str] = None) -> Path:
    target = Path(path)
    resolved = fmt or (FORMAT_BINARY if target.suffix.lower() in _BINARY_SUFFIXES else FORMAT_CSV)
    if resolved not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {resolved!r}")
    return write_binary(target, X) if resolved == FORMAT_BINARY else write_csv(target, X)


def dumps_json(doc: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, indent = 2, sort_keys = True, ensure_ascii = False, allow_nan = False) + '\n'


def write_json(path: PathLike, doc: Dict[str, Any]) -> Path:
    return atomic_write(path, dumps_json(doc))


def read_json(path: PathLike) -> Dict[str, Any]:
    try:
        with open(path, encoding = 'utf-8') as handle:
            return json.load(handle)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def write_model(path: PathLike, model: RSvdModel, include_trace: bool = False, **extra: Any) -> Path:
    """Write a model document; `extra` keys (e.g. alpha selection) are merged in."""
    doc = model.to_dict(include_trace = include_trace)
    doc.update(extra)
    return write_json(path, doc)


def read_model(path: PathLike) -> RSvdModel:
    return RSvdModel.from_dict(read_json(path))
