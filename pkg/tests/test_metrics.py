"""Tests for mask metrics and the threshold sweep."""
import numpy as np
import pytest

from rsvddpd.errors import ContractError
from rsvddpd.eval.metrics import Score, evaluate_mask, metrics_csv, score_counts, sweep_threshold, write_metrics_csv
from rsvddpd.video.background import ForegroundMask


class TestScoreCounts:
    def test_regular(self):
        score = score_counts(6, 2, 4)
        assert (score.precision, score.recall) == (0.75, 0.6)
        assert score.f1 == pytest.approx(2 * 0.75 * 0.6 / 1.35)

    def test_both_empty(self):
        assert score_counts(0, 0, 0) == Score(1.0, 1.0, 1.0)

    def test_empty_prediction(self):
        assert score_counts(0, 0, 5) == Score(0.0, 0.0, 0.0)

    def test_empty_truth(self):
        assert score_counts(0, 3, 0) == Score(0.0, 0.0, 0.0)


class TestEvaluateMask:
    def test_identical_masks(self):
        bits = np.random.default_rng(0).random((3, 4, 4)) > 0.5
        metrics = evaluate_mask(bits, bits)
        assert metrics.aggregate == Score(1.0, 1.0, 1.0)
        assert all(score.f1 == 1.0 for score in metrics.per_frame)

    def test_disjoint_masks(self):
        pred = np.zeros((2, 2, 2), dtype = bool)
        truth = np.zeros((2, 2, 2), dtype = bool)
        pred[:, 0, 0] = True
        truth[:, 1, 1] = True
        assert evaluate_mask(pred, truth).aggregate.f1 == 0.0

    def test_pooled_counts(self):
        pred = np.array([[[True, True]], [[False, False]]])
        truth = np.array([[[True, False]], [[False, True]]])
        metrics = evaluate_mask(pred, truth, names = ['a', 'b'])
        assert (metrics.tp, metrics.fp, metrics.fn) == (1, 1, 1)
        assert metrics.per_frame[0][:2] == (0.5, 1.0)
        assert metrics.per_frame[0].f1 == pytest.approx(2.0 / 3.0)
        assert metrics.per_frame[1] == Score(0.0, 0.0, 0.0)
        assert metrics.aggregate.f1 == pytest.approx(0.5)

    def test_accepts_foreground_masks(self):
        bits = np.ones((2, 3, 3), dtype = bool)
        mask = ForegroundMask(height = 3, width = 3, bits = bits)
        assert evaluate_mask(mask, bits).aggregate.f1 == 1.0

    def test_shape_mismatch(self):
        with pytest.raises(ContractError, match = 'differ'):
            evaluate_mask(np.zeros((1, 2, 2)), np.zeros((1, 3, 2)))

    def test_document(self):
        doc = evaluate_mask(np.ones((1, 1, 2), dtype = bool), np.ones((1, 1, 2), dtype = bool), names = ['f']).to_dict()
        assert doc['counts'] == {'tp': 2, 'fp': 0, 'fn': 0}
        assert doc['per_frame'] == [{'frame': 'f', 'precision': 1.0, 'recall': 1.0, 'f1': 1.0}]


class TestSweepThreshold:
    def test_best_k(self):
        residuals = np.array([[0.5, 0.0], [3.0, 0.1], [5.0, 0.0], [0.2, 1.5]])
        truth = np.zeros((2, 2, 2), dtype = bool)
        truth[0, 1, 0] = True
        truth[0, 0, 1] = True
        sweep = sweep_threshold(residuals, 1.0, truth, [1.0, 2.0, 4.0])
        assert sweep.best_k == 2.0
        assert sweep.best == Score(1.0, 1.0, 1.0)
        assert sweep.scores[0].f1 == pytest.approx(0.8)
        assert len(sweep.scores) == 3

    def test_ties_go_to_first_k(self):
        residuals = np.array([[10.0, 0.0], [0.0, 0.0]])
        truth = np.zeros((2, 2, 1), dtype = bool)
        truth[0, 0, 0] = True
        sweep = sweep_threshold(residuals, 1.0, truth, [3.0, 1.0])
        assert sweep.best_k == 3.0

    def test_rejects_bad_k(self):
        with pytest.raises(ContractError):
            sweep_threshold(np.zeros((4, 1)), 1.0, np.zeros((1, 2, 2), dtype = bool), [0.0])
        with pytest.raises(ContractError):
            sweep_threshold(np.zeros((4, 1)), 1.0, np.zeros((1, 2, 2), dtype = bool), [])


class TestMetricsCsv:
    def test_columns(self, tmp_path):
        metrics = evaluate_mask(np.ones((2, 1, 1), dtype = bool), np.array([[[True]], [[False]]]), names = ['a', 'b'])
        assert metrics_csv(metrics) == 'frame,precision,recall,f1\na,1.0,1.0,1.0\nb,0.0,0.0,0.0\n'
        path = write_metrics_csv(metrics, tmp_path / 'metrics.csv')
        assert path.read_text() == metrics_csv(metrics)
