"""Precision, recall and F1 of foreground masks against ground truth.

Conventions for empty masks:

- precision is 1 when prediction and truth are both empty, 0 when only the
  prediction is empty
- recall is 1 when both are empty, 0 when only the truth is empty
- F1 is 0 whenever precision + recall is 0
"""
from __future__ import annotations
import csv
import io
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from ..errors import ContractError
from ..matrix_io import atomic_write
from ..video.background import ForegroundMask
from ..video.frames import rasters

_logger = logging.getLogger(__name__)

MaskLike = Union[ForegroundMask, np.ndarray]


class Score(NamedTuple):
    precision: float
    recall: float
    f1: float


def score_counts(tp: int, fp: int, fn: int) -> Score:
    """Precision, recall and F1 from confusion counts.

    Example:
        >>> score_counts(1, 1, 0)
        Score(precision=0.5, recall=1.0, f1=0.6666666666666666)
    """
    predicted = tp + fp
    actual = tp + fn
    if predicted == 0:
        precision = 1.0 if actual == 0 else 0.0
    else:
        precision = tp / predicted
    if actual == 0:
        recall = 1.0 if predicted == 0 else 0.0
    else:
        recall = tp / actual
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Score(precision, recall, f1)


@dataclass
class MaskMetrics:
    """Per-frame scores and the score of all pixels pooled."""
    per_frame: List[Score]
    aggregate: Score
    tp: int = 0
    fp: int = 0
    fn: int = 0
    names: List[str] = field(default_factory = list)

    def to_dict(self) -> Dict[str, Any]:
        frames = self.names or [str(index) for index in range(len(self.per_frame))]
        return {
            'aggregate': self.aggregate._asdict(),
            'counts': {'tp': self.tp, 'fp': self.fp, 'fn': self.fn},
            'per_frame': [dict(frame = name, **score._asdict()) for name, score in zip(frames, self.per_frame)],
        }


def _bits(mask: MaskLike) -> np.ndarray:
    bits = mask.bits if isinstance(mask, ForegroundMask) else np.asarray(mask, dtype = bool)
    if bits.ndim == 2:
        bits = bits[np.newaxis]
    if bits.ndim != 3:
        raise ContractError(f"masks must be (p, h, w) boolean arrays, got shape {bits.shape}")
    return bits


def evaluate_mask(pred: MaskLike, truth: MaskLike, names: Optional[Sequence[str]] = None) -> MaskMetrics:
    """Score a predicted mask against the truth, frame by frame and pooled.

    Raises:
        ContractError: if the shapes differ.
    """
    pred_bits = _bits(pred)
    truth_bits = _bits(truth)
    if pred_bits.shape != truth_bits.shape:
        raise ContractError(f"mask dimensions differ: prediction {pred_bits.shape}, truth {truth_bits.shape}")
    axes = (1, 2)
    tp = np.sum(pred_bits & truth_bits, axis = axes)
    fp = np.sum(pred_bits & ~truth_bits, axis = axes)
    fn = np.sum(~pred_bits & truth_bits, axis = axes)
    per_frame = [score_counts(int(t), int(f), int(m)) for t, f, m in zip(tp, fp, fn)]
    metrics = MaskMetrics(
        per_frame = per_frame,
        aggregate = score_counts(int(tp.sum()), int(fp.sum()), int(fn.sum())),
        tp = int(tp.sum()),
        fp = int(fp.sum()),
        fn = int(fn.sum()),
        names = list(names) if names else [],
    )
    _logger.debug("evaluate_mask: %d frame(s), pooled %s", len(per_frame), metrics.aggregate)
    return metrics


@dataclass
class ThresholdSweep:
    """Pooled scores of the k·σ rule over a list of k values."""
    k_values: List[float]
    scores: List[Score]
    best_k: float
    best: Score

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k_values': list(self.k_values),
            'f1': [score.f1 for score in self.scores],
            'best_k': self.best_k,
            'best': self.best._asdict(),
        }


def sweep_threshold(residuals: np.ndarray, sigma2: float, truth: MaskLike, k_values: Sequence[float]) -> ThresholdSweep:
    """Evaluate |residual| > k·√sigma2 for every k and keep the best pooled F1.

    `residuals` is hw x p. Ties go to the first k listed.
    """
    if not k_values:
        raise ContractError("k_values must not be empty")
    if any(k <= 0 for k in k_values):
        raise ContractError(f"k values must be positive, got {list(k_values)}")
    truth_bits = _bits(truth)
    _, height, width = truth_bits.shape
    magnitude = rasters(np.abs(residuals), height, width)
    sigma = float(np.sqrt(sigma2))
    scores = [evaluate_mask(magnitude > k * sigma, truth_bits).aggregate for k in k_values]
    best_index = max(range(len(scores)), key = lambda index: (scores[index].f1, -index))
    return ThresholdSweep(k_values = [float(k) for k in k_values], scores = scores,
                          best_k = float(k_values[best_index]), best = scores[best_index])


def metrics_csv(metrics: MaskMetrics) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator = '\n')
    writer.writerow(['frame', 'precision', 'recall', 'f1'])
    frames = metrics.names or [str(index) for index in range(len(metrics.per_frame))]
    for name, score in zip(frames, metrics.per_frame):
        writer.writerow([name, repr(score.precision), repr(score.recall), repr(score.f1)])
    return buffer.getvalue()


def write_metrics_csv(metrics: MaskMetrics, path: Union[str, os.PathLike]) -> Path:
    """Per-frame metrics as CSV with columns frame, precision, recall, f1."""
    return atomic_write(path, metrics_csv(metrics))
