"""Mask metrics, synthetic videos, the consistency study and timing."""
from .consistency import ConsistencyReport, consistency_experiment, low_rank_instance
from .metrics import MaskMetrics, Score, ThresholdSweep, evaluate_mask, score_counts, sweep_threshold, write_metrics_csv
from .synthetic import CONTAMINATIONS, SynthSpec, SyntheticVideo, generate_synthetic
from .timing import TimingReport, TimingRow, benchmark_matrix, timing_benchmark

__all__ = [
    'CONTAMINATIONS',
    'ConsistencyReport',
    'MaskMetrics',
    'Score',
    'SynthSpec',
    'SyntheticVideo',
    'ThresholdSweep',
    'TimingReport',
    'TimingRow',
    'benchmark_matrix',
    'consistency_experiment',
    'evaluate_mask',
    'generate_synthetic',
    'low_rank_instance',
    'score_counts',
    'sweep_threshold',
    'timing_benchmark',
    'write_metrics_csv',
]
