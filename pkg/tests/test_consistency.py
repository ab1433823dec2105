"""Tests for the consistency study."""
import numpy as np
import pytest

from rsvddpd.errors import ContractError
from rsvddpd.eval.consistency import TRUE_SINGULAR_VALUES, consistency_experiment, low_rank_instance


class TestLowRankInstance:
    def test_singular_values(self):
        L, X = low_rank_instance(12, np.random.default_rng(0))
        singular = np.linalg.svd(L, compute_uv = False)
        np.testing.assert_allclose(singular[:3], TRUE_SINGULAR_VALUES, atol = 1e-12)
        assert singular[3] < 1e-12
        assert not np.array_equal(L, X)

    def test_noiseless(self):
        L, X = low_rank_instance(10, np.random.default_rng(1), noise_scale = 0.0)
        np.testing.assert_array_equal(L, X)


class TestConsistencyExperiment:
    @pytest.mark.parametrize('kwargs, match', [
        ({'sizes': [5, 20]}, 'sizes'),
        ({'sizes': []}, 'sizes'),
        ({'sizes': [20], 'replications': 10}, 'replications'),
    ])
    def test_contract(self, kwargs, match):
        with pytest.raises(ContractError, match = match):
            consistency_experiment(**kwargs)

    def test_noiseless_classical_fit_is_exact(self):
        report = consistency_experiment([10, 12], replications = 30, alpha = 0.0, noise_scale = 0.0)
        assert report.sizes == [10, 12]
        assert max(abs(value) for value in report.bias) < 1e-6
        assert max(report.rmse) < 1e-6

    def test_rmse_bounds_bias(self):
        report = consistency_experiment([10], replications = 30, seed = 3)
        assert report.rmse[0] >= abs(report.bias[0])
        assert len(report.estimates[0]) == 30

    def test_workers_do_not_change_report(self):
        serial = consistency_experiment([10], replications = 30, seed = 4, workers = 1)
        threaded = consistency_experiment([10], replications = 30, seed = 4, workers = 4)
        assert serial.to_dict() == threaded.to_dict()

    def test_document(self):
        doc = consistency_experiment([10], replications = 30, alpha = 0.25).to_dict()
        assert doc['alpha'] == 0.25
        assert doc['true_lambda'] == 3.0
        assert 'estimates' not in doc

    @pytest.mark.slow
    def test_rmse_decreases_with_size(self):
        report = consistency_experiment([50, 100, 200, 400], replications = 50, workers = 4)
        assert all(later < earlier for earlier, later in zip(report.rmse, report.rmse[1:]))
