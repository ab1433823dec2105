"""Tests for the command-line interface."""
import json

import numpy as np
import pytest

from rsvddpd import RSvdConfig
from rsvddpd.cli import build_parser, main
from rsvddpd.matrix_io import write_binary, write_csv
from rsvddpd.select import select_alpha
from rsvddpd.video.frames import frame_names, write_frame_dir


@pytest.fixture(autouse = True)
def _single_thread(monkeypatch):
    monkeypatch.delenv('RSVD_THREADS', raising = False)
    monkeypatch.delenv('RSVD_LOG_LEVEL', raising = False)


def _static_dir(path, count = 8):
    texture = np.round(np.random.default_rng(0).uniform(0.2, 0.8, (6, 5)) * 255.0) / 255.0
    frames = np.repeat(texture[None], count, axis = 0)
    write_frame_dir(path, frames)
    return frames


def _contaminated(seed = 0):
    rng = np.random.default_rng(seed)
    X = np.outer(rng.uniform(1.0, 2.0, 20), rng.uniform(1.0, 2.0, 15)) + 0.1 * rng.standard_normal((20, 15))
    X[rng.random((20, 15)) < 0.1] += 20.0
    return X


class TestParser:
    def test_unknown_flag_is_a_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(['decompose', 'm.csv', '--bogus'])
        assert exc.value.code == 4

    def test_alpha_out_of_range(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(['decompose', 'm.csv', '--alpha', '1.5'])
        assert exc.value.code == 4
        assert 'alpha must be in [0, 1]' in capsys.readouterr().err

    def test_command_required(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 4

    def test_sizes(self):
        args = build_parser().parse_args(['bench', '--sizes', '30', '20x10'])
        assert args.sizes == [(30, 30), (20, 10)]


class TestDecompose:
    def test_diagonal_matrix(self, tmp_path):
        write_csv(tmp_path / 'm.csv', np.diag([3.0, 2.0, 1.0]))
        code = main(['decompose', str(tmp_path / 'm.csv'), '--rank', '3', '--alpha', '0', '-o', str(tmp_path / 'model.json')])
        doc = json.loads((tmp_path / 'model.json').read_text())
        assert code == 0
        assert doc['lambda'] == pytest.approx([3.0, 2.0, 1.0], abs = 1e-6)
        assert doc['converged'] == [True, True, True]

    def test_binary_input_to_stdout(self, tmp_path, capsys):
        write_binary(tmp_path / 'm.bin', np.outer([1.0, 2.0, 3.0], [2.0, 1.0]))
        assert main(['decompose', str(tmp_path / 'm.bin'), '--rank', '1', '--alpha', '0.5']) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc['lambda'][0] == pytest.approx(np.sqrt(14.0 * 5.0), rel = 1e-6)

    def test_auto_rank_is_recorded(self, tmp_path, capsys):
        write_csv(tmp_path / 'm.csv', np.diag([10.0, 1.0, 0.1]))
        assert main(['decompose', str(tmp_path / 'm.csv'), '--alpha', '0']) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc['rank'] == 1
        assert doc['rank_selection']['chosen_rank'] == 1

    def test_auto_alpha_matches_library(self, tmp_path):
        X = _contaminated()
        write_csv(tmp_path / 'm.csv', X)
        code = main(['decompose', str(tmp_path / 'm.csv'), '--alpha', 'auto', '--rank', '1', '--max-iter', '500',
                     '-o', str(tmp_path / 'model.json')])
        selection = select_alpha(X, 1, config = RSvdConfig(max_iter = 500))
        doc = json.loads((tmp_path / 'model.json').read_text())
        assert doc['alpha'] == selection.chosen
        assert doc['alpha_selection']['chosen_alpha'] == selection.chosen
        assert code == (0 if selection.chosen_model.all_converged else 3)

    def test_non_convergence_still_writes_the_model(self, tmp_path):
        write_csv(tmp_path / 'm.csv', _contaminated())
        code = main(['decompose', str(tmp_path / 'm.csv'), '--rank', '1', '--alpha', '0.5', '--max-iter', '1',
                     '-o', str(tmp_path / 'model.json')])
        doc = json.loads((tmp_path / 'model.json').read_text())
        assert code == 3
        assert doc['converged'] == [False]
        assert len(doc['lambda']) == 1

    def test_missing_file(self, tmp_path, capsys):
        assert main(['decompose', str(tmp_path / 'absent.csv')]) == 2
        assert 'rsvddpd: error:' in capsys.readouterr().err

    def test_malformed_csv(self, tmp_path):
        (tmp_path / 'm.csv').write_text('1,2\n3\n')
        assert main(['decompose', str(tmp_path / 'm.csv')]) == 2

    def test_output_is_deterministic(self, tmp_path):
        write_csv(tmp_path / 'm.csv', _contaminated(1))
        for name in ('a.json', 'b.json'):
            main(['decompose', str(tmp_path / 'm.csv'), '--rank', '2', '--max-iter', '500', '-o', str(tmp_path / name)])
        assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()


class TestBackground:
    def test_static_video(self, tmp_path):
        _static_dir(tmp_path / 'in')
        assert main(['background', str(tmp_path / 'in'), '-o', str(tmp_path / 'out')]) == 0
        for name in frame_names(8):
            assert (tmp_path / 'out' / 'background' / name).read_bytes() == (tmp_path / 'in' / name).read_bytes()
            assert (tmp_path / 'out' / 'mask' / name).read_bytes().endswith(bytes(30))
        model = json.loads((tmp_path / 'out' / 'model_000.json').read_text())
        assert model['frames'] == frame_names(8)
        assert model['k_sigma'] == 3.0

    def test_batches(self, tmp_path):
        _static_dir(tmp_path / 'in')
        assert main(['background', str(tmp_path / 'in'), '-o', str(tmp_path / 'out'), '--batch', '4', '--rank', '1']) == 0
        assert sorted(path.name for path in (tmp_path / 'out').glob('model_*.json')) == ['model_000.json', 'model_001.json']
        second = json.loads((tmp_path / 'out' / 'model_001.json').read_text())
        assert second['frames'] == frame_names(8)[4:]

    def test_output_required(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(['background', str(tmp_path)])
        assert exc.value.code == 4

    def test_empty_directory(self, tmp_path):
        (tmp_path / 'in').mkdir()
        assert main(['background', str(tmp_path / 'in'), '-o', str(tmp_path / 'out')]) == 2


class TestEvaluate:
    def _masks(self, path, bits):
        write_frame_dir(path, bits, mask = True)

    def test_identical_masks(self, tmp_path, capsys):
        bits = np.random.default_rng(0).random((3, 4, 4)) > 0.5
        self._masks(tmp_path / 'pred', bits)
        self._masks(tmp_path / 'truth', bits)
        assert main(['evaluate', str(tmp_path / 'pred'), str(tmp_path / 'truth'), '--csv', str(tmp_path / 'm.csv')]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc['aggregate']['f1'] == 1.0
        assert (tmp_path / 'm.csv').read_text().splitlines()[0] == 'frame,precision,recall,f1'

    def test_disjoint_masks(self, tmp_path):
        pred = np.zeros((2, 3, 3), dtype = bool)
        truth = np.zeros((2, 3, 3), dtype = bool)
        pred[:, 0, 0] = True
        truth[:, 2, 2] = True
        self._masks(tmp_path / 'pred', pred)
        self._masks(tmp_path / 'truth', truth)
        assert main(['evaluate', str(tmp_path / 'pred'), str(tmp_path / 'truth'), '-o', str(tmp_path / 'e.json')]) == 0
        assert json.loads((tmp_path / 'e.json').read_text())['aggregate']['f1'] == 0.0

    def test_frame_lists_must_match(self, tmp_path, capsys):
        self._masks(tmp_path / 'pred', np.zeros((2, 3, 3), dtype = bool))
        self._masks(tmp_path / 'truth', np.zeros((3, 3, 3), dtype = bool))
        assert main(['evaluate', str(tmp_path / 'pred'), str(tmp_path / 'truth')]) == 2
        assert 'frame lists differ' in capsys.readouterr().err

    def test_sweep(self, tmp_path, capsys):
        assert main(['synth', str(tmp_path / 'video'), '--height', '16', '--width', '16', '--frames', '10',
                     '--object-size', '3', '--illumination', '0.1', '--seed', '2']) == 0
        code = main(['evaluate', str(tmp_path / 'video' / 'frames'), str(tmp_path / 'video' / 'truth'),
                     '--sweep', '2', '3', '5', '--rank', '1', '--alpha', '0.75', '--max-iter', '300'])
        doc = json.loads(capsys.readouterr().out)
        assert code in (0, 3)
        assert doc['sweep']['k_values'] == [2.0, 3.0, 5.0]
        assert doc['sweep']['best_k'] in (2.0, 3.0, 5.0)
        assert doc['aggregate']['f1'] == max(doc['sweep']['f1'])


class TestSynth:
    def test_layout(self, tmp_path):
        out = tmp_path / 'video'
        assert main(['synth', str(out), '--height', '8', '--width', '8', '--frames', '4', '--object-size', '2',
                     '--contamination', 'salt_pepper', '--contamination-frames', '2']) == 0
        for sub in ('frames', 'truth', 'background'):
            assert sorted(path.name for path in (out / sub).iterdir()) == frame_names(4)
        spec = json.loads((out / 'spec.json').read_text())
        assert (spec['height'], spec['frames'], spec['contamination_frames']) == (8, 4, [2])

    def test_spec_file_with_override(self, tmp_path):
        (tmp_path / 'spec.json').write_text(json.dumps({'height': 10, 'width': 6, 'frames': 3}))
        assert main(['synth', str(tmp_path / 'video'), '--spec', str(tmp_path / 'spec.json'), '--frames', '5']) == 0
        spec = json.loads((tmp_path / 'video' / 'spec.json').read_text())
        assert (spec['height'], spec['width'], spec['frames']) == (10, 6, 5)

    def test_invalid_spec(self, tmp_path):
        assert main(['synth', str(tmp_path / 'video'), '--illumination', '0.9']) == 4

    def test_deterministic(self, tmp_path):
        for name in ('a', 'b'):
            main(['synth', str(tmp_path / name), '--height', '8', '--width', '8', '--frames', '3', '--seed', '7'])
        for frame in frame_names(3):
            assert (tmp_path / 'a' / 'frames' / frame).read_bytes() == (tmp_path / 'b' / 'frames' / frame).read_bytes()


class TestSelectAlpha:
    def test_report(self, tmp_path, capsys):
        write_csv(tmp_path / 'm.csv', _contaminated(2))
        assert main(['select-alpha', str(tmp_path / 'm.csv'), '--rank', '1', '--grid', '0', '0.5', '1',
                     '--max-iter', '500']) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc['grid'] == [0.0, 0.5, 1.0]
        assert doc['chosen_alpha'] in doc['grid']
        assert doc['chosen_rank'] == 1

    def test_grid_without_reference(self, tmp_path, capsys):
        write_csv(tmp_path / 'm.csv', _contaminated(2))
        assert main(['select-alpha', str(tmp_path / 'm.csv'), '--alpha', 'auto', '--grid', '0', '0.5']) == 4
        assert '1.0' in capsys.readouterr().err


class TestExperiments:
    def test_consistency(self, tmp_path):
        out = tmp_path / 'c.json'
        assert main(['consistency', '--sizes', '10', '--replications', '30', '-o', str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc['sizes'] == [10]
        assert len(doc['rmse']) == 1

    def test_consistency_needs_numeric_alpha(self):
        assert main(['consistency', '--sizes', '10', '--alpha', 'auto']) == 4

    def test_consistency_contract(self):
        assert main(['consistency', '--sizes', '5']) == 4

    def test_bench(self, capsys):
        assert main(['bench', '--sizes', '10', '12x8', '--iterations', '2']) == 0
        doc = json.loads(capsys.readouterr().out)
        assert [(row['n_rows'], row['n_cols']) for row in doc['rows']] == [(10, 10), (12, 8)]

    def test_bench_runs_contract(self):
        assert main(['bench', '--sizes', '10', '--runs', '3']) == 4
