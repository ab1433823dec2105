"""Command-line entry point.

Usage: ``rsvddpd <command> [options]``. Run ``rsvddpd <command> --help`` for
the options of one command.

Commands:
    decompose      Fit a robust SVD to a CSV or binary matrix and write the model JSON.
    background     Model the background of a frame directory, write background,
                   foreground and mask frames plus one model JSON per batch.
    evaluate       Score predicted masks against ground truth, or sweep k_sigma.
    synth          Write a seeded synthetic video with its ground truth.
    select-alpha   Run the alpha grid search and write its report.
    consistency    Bias and RMSE of the first singular value as n grows.
    bench          Wall-clock timing of robust fits.

Exit codes: 0 success, 2 input/format error, 3 numerical failure or
non-convergence (outputs are still written), 4 usage or contract error.
"""
from __future__ import annotations
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .config import DEFAULT_ALPHA_GRID, RSvdConfig, RunConfig, configure_logging, resolve_workers
from .core.decompose import rsvd_dpd
from .core.types import RSvdModel
from .errors import EXIT_CONTRACT, EXIT_FORMAT, EXIT_NUMERICAL, EXIT_OK, ConfigError, FormatError, RsvdError
from .eval.consistency import consistency_experiment
from .eval.metrics import MaskMetrics, evaluate_mask, sweep_threshold, write_metrics_csv
from .eval.synthetic import CONTAMINATIONS, SynthSpec, generate_synthetic
from .eval.timing import timing_benchmark
from .matrix_io import FORMATS, dumps_json, read_json, read_matrix, write_json, write_model
from .select import select_alpha, select_rank
from .video.background import BatchResult, process_sequence, stitch_masks
from .video.frames import frame_names, list_frame_files, rasters, read_frame_dir, write_frame_dir
from .video.pnm import read_mask

_logger = logging.getLogger(__name__)

PROG = 'rsvddpd'


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the contract-misuse code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONTRACT, f"{self.prog}: error: {message}\n")


def _alpha(text: str):
    if text == 'auto':
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in [0, 1] or 'auto', got {text!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in [0, 1], got {text}")
    return value


def _rank(text: str):
    if text == 'auto':
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"rank must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _size(text: str) -> Tuple[int, int]:
    """'N' (square) or 'NxP'."""
    parts = text.lower().split('x')
    try:
        dims = [int(part) for part in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or NxP, got {text!r}")
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2 or min(dims) < 2:
        raise argparse.ArgumentTypeError(f"expected N or NxP with both at least 2, got {text!r}")
    return dims[0], dims[1]


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = ('alpha', 'rank', 'epsilon', 'k_sigma', 'batch', 'tol', 'max_iter', 'seed', 'grid', 'format', 'sweep', 'trace')
    settings = {name: getattr(args, name) for name in fields if getattr(args, name, None) is not None}
    inputs = [str(path) for path in getattr(args, 'inputs', [])]
    return RunConfig(command = args.command, inputs = inputs, output = getattr(args, 'output', None),
                     workers = resolve_workers(getattr(args, 'workers', None)), **settings).validate()


def _base_config(run: RunConfig) -> RSvdConfig:
    return RSvdConfig(tol = run.tol, max_iter = run.max_iter)


def _emit(doc: Dict[str, Any], output: Optional[str]) -> None:
    """Write a JSON document to `output`, or to stdout when no path is given."""
    if output:
        write_json(output, doc)
        _logger.info("wrote %s", output)
    else:
        sys.stdout.write(dumps_json(doc))


def _converged_or_exit(models: Sequence[RSvdModel], what: str) -> int:
    failed = [index for index, model in enumerate(models) if not model.all_converged]
    if failed:
        _logger.error("%s: %d fit(s) did not converge (outputs written with converged = false)", what, len(failed))
        print(f"{PROG}: {what}: fit did not converge", file = sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _resolved_rank(run: RunConfig, X: np.ndarray, extra: Dict[str, Any]) -> int:
    if run.rank != 'auto':
        return int(run.rank)
    selection = select_rank(X, run.epsilon)
    extra['rank_selection'] = selection.to_dict()
    return selection.chosen_rank


def cmd_decompose(args: argparse.Namespace) -> int:
    run = _run_config(args)
    X = read_matrix(run.inputs[0], run.format)
    extra: Dict[str, Any] = {}
    rank = _resolved_rank(run, X, extra)
    if run.alpha == 'auto':
        selection = select_alpha(X, rank, run.grid, config = _base_config(run), workers = run.workers,
                                 epsilon = run.epsilon if run.rank == 'auto' else None)
        model = selection.chosen_model
        extra['alpha_selection'] = selection.to_dict()
    else:
        model = rsvd_dpd(X, run.estimator(rank = rank))
    if run.output:
        write_model(run.output, model, include_trace = run.trace, **extra)
    else:
        doc = model.to_dict(include_trace = run.trace)
        doc.update(extra)
        _emit(doc, None)
    return _converged_or_exit([model], 'decompose')


def _pgm_names(names: Sequence[str]) -> List[str]:
    return [Path(name).with_suffix('.pgm').name for name in names]


def _foreground_images(results: Sequence[BatchResult]) -> np.ndarray:
    """|residual| rasters of every batch, stitched in frame order."""
    images = []
    for result in results:
        height, width = result.sequence.height, result.sequence.width
        images.append(rasters(np.abs(result.residuals), height, width))
    return np.concatenate(images)


def cmd_background(args: argparse.Namespace) -> int:
    run = _run_config(args)
    seq = read_frame_dir(run.inputs[0])
    results = process_sequence(seq, alpha = run.alpha, rank = None if run.rank == 'auto' else int(run.rank),
                               epsilon = run.epsilon, k_sigma = run.k_sigma, batch = run.batch,
                               config = _base_config(run), workers = run.workers, grid = run.grid)
    out = Path(run.output)
    names = _pgm_names(seq.names) if seq.names else frame_names(seq.count)
    backgrounds = np.concatenate([result.background.frames() for result in results])
    write_frame_dir(out / 'background', backgrounds, names, workers = run.workers)
    write_frame_dir(out / 'foreground', _foreground_images(results), names, workers = run.workers)
    write_frame_dir(out / 'mask', stitch_masks(results).bits, names, mask = True, workers = run.workers)
    for result in results:
        part = result.sequence
        extra: Dict[str, Any] = {'frames': list(_pgm_names(part.names)) if part.names else [],
                                 'k_sigma': run.k_sigma}
        if result.background.selection is not None:
            extra['alpha_selection'] = result.background.selection.to_dict()
        write_model(out / f"model_{result.index:03d}.json", result.background.model, include_trace = run.trace, **extra)
    _logger.info("background: wrote %d frame(s) and %d model(s) to %s", seq.count, len(results), out)
    return _converged_or_exit([result.background.model for result in results], 'background')


def _aligned_files(pred_dir: str, truth_dir: str) -> Tuple[List[Path], List[Path]]:
    """Pair files of two directories by file-name stem.

    Raises:
        FormatError: if the two directories do not hold the same frames.
    """
    pred = list_frame_files(pred_dir)
    truth = list_frame_files(truth_dir)
    pred_stems = [path.stem for path in pred]
    truth_stems = [path.stem for path in truth]
    if pred_stems != truth_stems:
        missing = sorted(set(truth_stems) - set(pred_stems))
        extra = sorted(set(pred_stems) - set(truth_stems))
        raise FormatError(f"frame lists differ between {pred_dir} and {truth_dir}: "
                          f"missing {missing[:5]}, unexpected {extra[:5]}")
    return pred, truth


def _read_masks(files: Sequence[Path]) -> np.ndarray:
    masks = [read_mask(path) for path in files]
    if len({mask.shape for mask in masks}) != 1:
        raise FormatError(f"inconsistent mask sizes in {files[0].parent}")
    return np.stack(masks)


def cmd_evaluate(args: argparse.Namespace) -> int:
    run = _run_config(args)
    pred_dir, truth_dir = run.inputs
    pred_files, truth_files = _aligned_files(pred_dir, truth_dir)
    truth = _read_masks(truth_files)
    names = [path.stem for path in truth_files]
    sweep_doc = None
    status = EXIT_OK
    if run.sweep:
        seq = read_frame_dir(pred_dir)
        if (seq.height, seq.width) != truth.shape[1:]:
            raise FormatError(f"frames are {seq.width}x{seq.height} but masks are {truth.shape[2]}x{truth.shape[1]}")
        results = process_sequence(seq, alpha = run.alpha, rank = None if run.rank == 'auto' else int(run.rank),
                                   epsilon = run.epsilon, batch = run.batch, config = _base_config(run),
                                   workers = run.workers, grid = run.grid)
        # residuals in units of each batch's sigma, so one k applies to all batches
        scaled = np.hstack([result.residuals / np.sqrt(result.background.model.sigma2) for result in results])
        sweep = sweep_threshold(scaled, 1.0, truth, run.sweep)
        sweep_doc = sweep.to_dict()
        pred = rasters(np.abs(scaled), seq.height, seq.width) > sweep.best_k
        status = _converged_or_exit([result.background.model for result in results], 'evaluate')
    else:
        pred = _read_masks(pred_files)
        if pred.shape != truth.shape:
            raise FormatError(f"mask dimensions differ: prediction {pred.shape[1:]}, truth {truth.shape[1:]}")
    metrics: MaskMetrics = evaluate_mask(pred, truth, names)
    doc = metrics.to_dict()
    if sweep_doc is not None:
        doc['sweep'] = sweep_doc
    _emit(doc, run.output)
    if args.csv:
        write_metrics_csv(metrics, args.csv)
    _logger.info("evaluate: pooled F1 %.4f over %d frame(s)", metrics.aggregate.f1, len(names))
    return status


def _synth_spec(args: argparse.Namespace) -> SynthSpec:
    doc: Dict[str, Any] = dict(read_json(args.spec)) if args.spec else {}
    for name in ('height', 'width', 'frames', 'background_rank', 'illumination', 'object_size', 'object_start',
                 'velocity', 'object_intensity', 'contamination', 'contamination_frames', 'density', 'seed'):
        value = getattr(args, name, None)
        if value is not None:
            doc[name] = value
    return SynthSpec.from_dict(doc)


def cmd_synth(args: argparse.Namespace) -> int:
    spec = _synth_spec(args)
    video = generate_synthetic(spec)
    out = Path(args.output)
    names = frame_names(spec.frames)
    write_frame_dir(out / 'frames', video.sequence.frames, names)
    write_frame_dir(out / 'truth', video.truth.bits, names, mask = True)
    write_frame_dir(out / 'background', video.background, names)
    write_json(out / 'spec.json', spec.to_dict())
    _logger.info("synth: wrote %d frame(s) of %dx%d to %s", spec.frames, spec.height, spec.width, out)
    return EXIT_OK


def cmd_select_alpha(args: argparse.Namespace) -> int:
    run = _run_config(args)
    X = read_matrix(run.inputs[0], run.format)
    extra: Dict[str, Any] = {}
    rank = _resolved_rank(run, X, extra)
    selection = select_alpha(X, rank, run.grid, config = _base_config(run), workers = run.workers,
                             epsilon = run.epsilon if run.rank == 'auto' else None)
    doc = selection.to_dict()
    doc.update(extra)
    _emit(doc, run.output)
    return EXIT_OK


def cmd_consistency(args: argparse.Namespace) -> int:
    run = _run_config(args)
    report = consistency_experiment(args.sizes, replications = args.replications, seed = run.seed,
                                    alpha = float(run.alpha), noise_scale = args.noise_scale,
                                    config = _base_config(run), workers = run.workers)
    _emit(report.to_dict(), run.output)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    run = _run_config(args)
    report = timing_benchmark(args.sizes, alpha = float(run.alpha), rank = args.bench_rank, runs = args.runs,
                              iterations = args.iterations, seed = run.seed)
    _emit(report.to_dict(), run.output)
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    parser = _Parser(add_help = False)
    parser.add_argument('--log-level', default = None, help = "DEBUG, INFO, WARNING (default, or $RSVD_LOG_LEVEL) or ERROR")
    parser.add_argument('--workers', type = _positive_int, default = None,
                        help = "worker threads, capped by $RSVD_THREADS (default 1)")
    parser.add_argument('--seed', type = int, default = None, help = "seed for every random draw (default 0)")
    return parser


def _fit_parser() -> argparse.ArgumentParser:
    parser = _Parser(add_help = False)
    parser.add_argument('--alpha', type = _alpha, default = None, help = "robustness in [0, 1] or 'auto' (default 0.5)")
    parser.add_argument('--rank', type = _rank, default = None, help = "number of components or 'auto' (default)")
    parser.add_argument('--epsilon', type = float, default = None,
                        help = "unexplained share allowed by --rank auto (default 0.1)")
    parser.add_argument('--grid', type = float, nargs = '+', default = None,
                        help = f"alpha grid for --alpha auto (default {' '.join(map(str, DEFAULT_ALPHA_GRID))})")
    parser.add_argument('--tol', type = float, default = None, help = "convergence tolerance (default 1e-6)")
    parser.add_argument('--max-iter', dest = 'max_iter', type = _positive_int, default = None,
                        help = "iteration cap per component (default 100)")
    parser.add_argument('--trace', action = 'store_true', default = None, help = "include iteration traces in model JSON")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    fit = _fit_parser()
    parser = _Parser(prog = PROG, description = "Robust SVD with the density power divergence.")
    parser.add_argument('--version', action = 'version', version = f"{PROG} {__version__}")
    commands = parser.add_subparsers(dest = 'command', metavar = 'command', required = True)

    def command(name: str, handler: Callable[[argparse.Namespace], int], help_text: str,
                parents: Sequence[argparse.ArgumentParser]) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents = list(parents), help = help_text, description = help_text)
        sub.set_defaults(handler = handler)
        return sub

    sub = command('decompose', cmd_decompose, "fit a robust SVD to a matrix file", [common, fit])
    sub.add_argument('inputs', nargs = 1, metavar = 'MATRIX', help = "CSV or binary matrix")
    sub.add_argument('--format', choices = FORMATS, default = None, help = "input format (default: from the suffix)")
    sub.add_argument('-o', '--output', default = None, help = "model JSON path (default: stdout)")

    sub = command('background', cmd_background, "model the background of a frame directory", [common, fit])
    sub.add_argument('inputs', nargs = 1, metavar = 'FRAMES', help = "directory of PGM/PPM frames")
    sub.add_argument('-o', '--output', required = True, help = "output directory")
    sub.add_argument('--k-sigma', dest = 'k_sigma', type = float, default = None,
                     help = "foreground threshold in units of sigma (default 3)")
    sub.add_argument('--batch', type = int, default = None, help = "frames per independent fit (default 120)")

    sub = command('evaluate', cmd_evaluate, "score foreground masks against ground truth", [common, fit])
    sub.add_argument('inputs', nargs = 2, metavar = ('PRED', 'TRUTH'),
                     help = "predicted mask directory (frame directory with --sweep) and truth mask directory")
    sub.add_argument('--sweep', type = float, nargs = '+', default = None, metavar = 'K',
                     help = "fit PRED frames and report the k_sigma with the best pooled F1")
    sub.add_argument('--batch', type = int, default = None, help = "frames per independent fit with --sweep")
    sub.add_argument('--csv', default = None, help = "also write per-frame metrics as CSV")
    sub.add_argument('-o', '--output', default = None, help = "metrics JSON path (default: stdout)")

    sub = command('synth', cmd_synth, "write a seeded synthetic video", [common])
    sub.add_argument('output', help = "output directory (frames/, truth/, background/, spec.json)")
    sub.add_argument('--spec', default = None, help = "JSON file of synthetic parameters; flags override it")
    sub.add_argument('--height', type = int, default = None)
    sub.add_argument('--width', type = int, default = None)
    sub.add_argument('--frames', type = int, default = None)
    sub.add_argument('--background-rank', dest = 'background_rank', type = int, default = None)
    sub.add_argument('--illumination', type = float, default = None)
    sub.add_argument('--object-size', dest = 'object_size', type = int, default = None)
    sub.add_argument('--object-start', dest = 'object_start', type = int, nargs = 2, default = None, metavar = ('ROW', 'COL'))
    sub.add_argument('--velocity', type = int, nargs = 2, default = None, metavar = ('ROWS', 'COLS'))
    sub.add_argument('--object-intensity', dest = 'object_intensity', type = float, default = None)
    sub.add_argument('--contamination', choices = CONTAMINATIONS, default = None)
    sub.add_argument('--contamination-frames', dest = 'contamination_frames', type = int, nargs = '+', default = None,
                     metavar = 'N', help = "1-based frame numbers to tamper with")
    sub.add_argument('--density', type = float, default = None, help = "salt-and-pepper density")

    sub = command('select-alpha', cmd_select_alpha, "choose alpha by the grid criterion", [common, fit])
    sub.add_argument('inputs', nargs = 1, metavar = 'MATRIX', help = "CSV or binary matrix")
    sub.add_argument('--format', choices = FORMATS, default = None)
    sub.add_argument('-o', '--output', default = None, help = "report JSON path (default: stdout)")

    sub = command('consistency', cmd_consistency, "bias and RMSE of the first singular value", [common])
    sub.add_argument('--sizes', type = int, nargs = '+', default = [50, 100, 200, 400])
    sub.add_argument('--replications', type = int, default = 50)
    sub.add_argument('--alpha', type = _alpha, default = None, help = "robustness in [0, 1] (default 0.5)")
    sub.add_argument('--noise-scale', dest = 'noise_scale', type = float, default = 1.0)
    sub.add_argument('--tol', type = float, default = None)
    sub.add_argument('--max-iter', dest = 'max_iter', type = _positive_int, default = None)
    sub.add_argument('-o', '--output', default = None, help = "report JSON path (default: stdout)")

    sub = command('bench', cmd_bench, "time robust fits on seeded matrices", [common])
    sub.add_argument('--sizes', type = _size, nargs = '+', default = [(100, 100), (141, 141), (200, 200)],
                     metavar = 'N[xP]')
    sub.add_argument('--alpha', type = _alpha, default = None, help = "robustness in [0, 1] (default 0.5)")
    sub.add_argument('--rank', dest = 'bench_rank', type = _positive_int, default = 1)
    sub.add_argument('--runs', type = int, default = 5)
    sub.add_argument('--iterations', type = _positive_int, default = 20)
    sub.add_argument('-o', '--output', default = None, help = "report JSON path (default: stdout)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.log_level)
        if getattr(args, 'alpha', None) == 'auto' and args.command in ('consistency', 'bench'):
            raise ConfigError(f"{args.command} needs a numeric --alpha")
        return args.handler(args)
    except RsvdError as exc:
        print(f"{PROG}: error: {exc}", file = sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"{PROG}: error: {exc}", file = sys.stderr)
        return EXIT_FORMAT
