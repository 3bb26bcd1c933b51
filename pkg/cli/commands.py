"""
Command-line entry point exposing the pipeline as batch subcommands
"""
import argparse
import logging
import sys
import traceback
from pathlib import Path

from core import classifier
from core.classifier import GAMMA_AUTO, ClassifierKind
from core.condition import ConditionLabel
from core.dataset import parse_record
from core.errors import InvalidConfig, VibrodiagError
from core.evaluation import (
    default_grid, evaluate, format_confusion, grid_search, write_curve_csv, write_report_csv
)
from core.extraction import extract_dataset, resolve_layout
from core.features import (
    SHAPE_CONVENTIONAL, SHAPE_PRINTED, class_summary, normalize_minmax, read_feature_csv,
    write_feature_csv
)
from core.run_config import (
    NORMALIZE_COLUMN, NORMALIZE_NONE, NORMALIZE_SPECTRUM, NORMALIZE_STRICT, RunConfig
)
from core.signal_generator import SynthConfig, write_dataset
from core.spectrum import to_spectrum, write_spectrum_csv
from database.db_manager import DatabaseManager
from utils.timer import Timer

logger = logging.getLogger("CLI")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vibrodiag",
        description="Vibration fault diagnosis: spectra, statistical features and classifiers")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for per-record detail")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    synth = commands.add_parser("synth", help="write a synthetic dataset tree")
    synth.add_argument("--out", required=True, help="dataset root to create")
    synth.add_argument("--per-class", type=int, default=1000, help="records per condition (1000)")
    synth.add_argument("--rotation-hz", type=float, default=30.0, help="shaft rate in Hz (30)")
    synth.add_argument("--sample-rate", type=float, default=20000.0, help="sampling rate in Hz (20000)")
    synth.add_argument("--duration", type=float, default=5.0, help="record length in seconds (5)")
    synth.add_argument("--noise-std", type=float, default=0.02, help="noise std in g (0.02)")
    _add_seed(synth)

    extract = commands.add_parser("extract", help="dataset tree -> feature CSV")
    extract.add_argument("--data", required=True, help="dataset root")
    extract.add_argument("--out", required=True, help="feature CSV to write")
    extract.add_argument("--manifest", help="dataset manifest (default: <data>/manifest.txt if present)")
    extract.add_argument("--summary-out", help="also write per-class feature means/stds")
    extract.add_argument("--remove-dc", action="store_true", help="subtract the mean before the FFT")
    extract.add_argument("--no-unit-conversion", action="store_true",
                         help="keep samples in g instead of m/s^2")
    extract.add_argument("--shape-factor", choices=[SHAPE_PRINTED, SHAPE_CONVENTIONAL],
                         default=SHAPE_PRINTED, help="1/mean (printed, default) or rms/mean|x|")
    extract.add_argument("--normalize", choices=[NORMALIZE_COLUMN, NORMALIZE_SPECTRUM],
                         default=NORMALIZE_COLUMN,
                         help="column: leave scaling to the model stage (default); "
                              "spectrum: min-max scale spectra dataset-wide before extraction")
    _add_seed(extract)

    train = commands.add_parser("train", help="feature CSV -> model file")
    train.add_argument("--features", required=True)
    train.add_argument("--out", required=True, help="model file to write")
    _add_classifier(train)
    _add_normalize(train, [NORMALIZE_COLUMN, NORMALIZE_NONE])
    _add_seed(train)

    evaluation = commands.add_parser("evaluate", help="cross-validated evaluation report")
    evaluation.add_argument("--features", required=True)
    evaluation.add_argument("--out", help="report CSV to write")
    evaluation.add_argument("--db", help="results database to append to")
    _add_classifier(evaluation)
    _add_split(evaluation)
    _add_normalize(evaluation, [NORMALIZE_COLUMN, NORMALIZE_STRICT, NORMALIZE_NONE])
    _add_seed(evaluation)

    sweep = commands.add_parser("sweep", help="hyperparameter sweep curve")
    sweep.add_argument("--features", required=True)
    sweep.add_argument("--out", required=True, help="curve CSV to write")
    sweep.add_argument("--best-out", help="write the chosen parameters as key=value")
    sweep.add_argument("--db", help="evaluate the best setting and append it to this database")
    sweep.add_argument("--range", nargs=2, type=int, default=[1, 100], metavar=("LOW", "HIGH"),
                       help="C or K values, or smoothing exponents (1 100)")
    _add_classifier(sweep)
    _add_split(sweep)
    _add_normalize(sweep, [NORMALIZE_COLUMN, NORMALIZE_STRICT, NORMALIZE_NONE])
    _add_seed(sweep)

    predict = commands.add_parser("predict", help="label a feature CSV with a model file")
    predict.add_argument("--features", required=True)
    predict.add_argument("--model", required=True)
    predict.add_argument("--out", required=True, help="predictions CSV to write")
    _add_seed(predict)

    report = commands.add_parser("report", help="accuracy table from the results database")
    report.add_argument("--db", required=True)
    report.add_argument("--out", help="also write the table as CSV")
    report.add_argument("--history", nargs="?", const="all", metavar="CLF",
                        help="list past runs, newest first, for one classifier or all")
    _add_seed(report)

    dump = commands.add_parser("spectrum-dump", help="one record -> spectrum CSV")
    dump.add_argument("--record", required=True, help="record CSV")
    dump.add_argument("--out", required=True, help="spectrum CSV to write")
    dump.add_argument("--label", default="normal", help="condition of the record (normal)")
    dump.add_argument("--max-hz", type=float, help="drop bins above this frequency")
    dump.add_argument("--remove-dc", action="store_true")
    dump.add_argument("--no-unit-conversion", action="store_true")
    _add_seed(dump)
    return parser


def _add_seed(parser):
    parser.add_argument("--seed", type=int, default=42, help="seed for every random choice (42)")


def _add_classifier(parser):
    parser.add_argument("--clf", choices=[kind.value for kind in ClassifierKind], required=True)
    parser.add_argument("--C", type=float, default=1.0, help="SVM regularization (1.0)")
    parser.add_argument("--gamma", default=GAMMA_AUTO,
                        help="RBF gamma, or 'auto' for 1/(d*Var(X)) (auto)")
    parser.add_argument("--k", type=int, default=5, help="KNN neighbors (5)")
    parser.add_argument("--var-smoothing", type=float, default=1e-9, help="GNB smoothing (1e-9)")


def _add_split(parser):
    parser.add_argument("--mode", choices=["1fold", "5fold"], default="5fold",
                        help="1fold: stratified holdout; 5fold: stratified k-fold (5fold)")
    parser.add_argument("--folds", type=int, default=5, help="folds for k-fold mode (5)")
    parser.add_argument("--test-fraction", type=float, default=0.2, help="holdout test share (0.2)")


def _add_normalize(parser, choices):
    parser.add_argument("--normalize", choices=choices, default=choices[0],
                        help="column: min-max over all rows (default); strict: per training "
                             "split; none: use features as read")


def configure_logging(verbosity):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")


def run(argv=None):
    """Run one subcommand and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    configure_logging(args.verbose)
    try:
        config = RunConfig.from_args(args)
        return HANDLERS[config.command](config, args)
    except VibrodiagError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        logger.error(f"Unexpected failure in {args.command}: {exc}")
        logger.error(traceback.format_exc())
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _synth(config, args):
    synth_config = SynthConfig(rotation_hz=args.rotation_hz, sample_rate_hz=args.sample_rate,
                               duration_s=args.duration, noise_std=args.noise_std,
                               seed=config.seed, per_class_count=args.per_class)
    written = write_dataset(synth_config, config.paths["out"], n_jobs=config.threads)
    print(f"wrote {len(written)} records to {config.paths['out']}")
    return 0


def _extract(config, args):
    root = config.paths["data"]
    layout = resolve_layout(root, config.paths.get("manifest"))
    with Timer() as timer:
        matrix, dropped = extract_dataset(root, config.extraction, layout, n_jobs=config.threads)
    write_feature_csv(matrix, config.paths["out"])
    if "summary_out" in config.paths:
        class_summary(matrix).to_csv(config.paths["summary_out"], index=False,
                                     float_format="%.17g", lineterminator="\n")
    print(f"wrote {len(matrix)} feature rows to {config.paths['out']} (dropped_count={dropped})")
    print(f"extraction wall clock: {timer.elapsed:.1f} s")
    return 0


def _load_features(config):
    """Read the feature CSV and apply the column normalization if requested"""
    matrix = read_feature_csv(config.paths["features"])
    if config.normalize == NORMALIZE_COLUMN:
        matrix = normalize_minmax(matrix)
    return matrix


def _train(config, args):
    matrix = _load_features(config)
    model = classifier.fit(config.classifier, matrix.values, matrix.labels)
    classifier.save_model(config.paths["out"], model, scaling=matrix.scaling)
    print(f"wrote {config.classifier.describe()} model to {config.paths['out']}")
    return 0


def _evaluate(config, args):
    matrix = _load_features(config)
    report = evaluate(config.classifier, matrix, config.plan,
                      strict_normalization=config.normalize == NORMALIZE_STRICT)
    _print_report(report)
    if "out" in config.paths:
        write_report_csv(report, config.paths["out"])
    if "db" in config.paths:
        DatabaseManager(str(config.paths["db"])).save_evaluation(report, config.paths["features"])
    return 0


def _print_report(report):
    print(f"{report.spec.describe()} {report.plan.label}")
    print(format_confusion(report))
    folds = ", ".join(f"{accuracy:.3f}" for accuracy in report.fold_accuracies)
    print(f"fold accuracies: [{folds}]")
    print(f"mean WA: {report.weighted_accuracy:.3f}")
    print(f"wall clock: {report.elapsed_s:.1f} s")


def _sweep(config, args):
    matrix = _load_features(config)
    low, high = args.range
    grid = default_grid(config.classifier.kind, low, high, base=config.classifier)
    strict = config.normalize == NORMALIZE_STRICT
    best, curve = grid_search(config.classifier.kind, grid, matrix, config.plan,
                              strict_normalization=strict, n_jobs=config.threads)
    write_curve_csv(curve, config.paths["out"])
    print(f"best: {best.describe()}")
    if "best_out" in config.paths:
        lines = [f"classifier={best.kind.value}", f"svm_c={best.svm_c:.17g}",
                 f"svm_gamma={best.svm_gamma}", f"knn_k={best.knn_k}",
                 f"gnb_smoothing={best.gnb_smoothing:.17g}"]
        Path(config.paths["best_out"]).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if "db" in config.paths:
        report = evaluate(best, matrix, config.plan, strict_normalization=strict)
        DatabaseManager(str(config.paths["db"])).save_evaluation(report, config.paths["features"])
    return 0


def _predict(config, args):
    matrix = read_feature_csv(config.paths["features"])
    model, scaling = classifier.load_model(config.paths["model"])
    if scaling is not None:
        matrix = scaling.apply(matrix)
    predicted = classifier.predict(model, matrix.values)
    with open(config.paths["out"], "w", encoding="utf-8") as handle:
        handle.write("source,label,predicted\n")
        for source, label, guess in zip(matrix.sources, matrix.labels, predicted):
            handle.write(f"{source},{int(label)},{int(guess)}\n")
    print(f"wrote {len(predicted)} predictions to {config.paths['out']}")
    return 0


def _report(config, args):
    db = DatabaseManager(str(config.paths["db"]))
    if args.history:
        return _print_history(db, args.history)
    modes, rows = db.accuracy_table()
    if not rows:
        print("no evaluations recorded")
        return 0
    header = ["classifier"] + modes
    print("  ".join(name.ljust(10) for name in header))
    for name, values in rows:
        cells = ["-" if value is None else f"{value:.3f}" for value in values]
        print("  ".join(cell.ljust(10) for cell in [name.upper()] + cells))
    if "out" in config.paths:
        with open(config.paths["out"], "w", encoding="utf-8") as handle:
            handle.write(",".join(header) + "\n")
            for name, values in rows:
                cells = ["" if value is None else f"{value:.17g}" for value in values]
                handle.write(",".join([name] + cells) + "\n")
    return 0


def _print_history(db, name):
    if name != "all" and name not in {kind.value for kind in ClassifierKind}:
        raise InvalidConfig(f"Unknown classifier for --history: {name!r}")
    history = db.get_history(None if name == "all" else name)
    if not history:
        print("no evaluations recorded")
        return 0
    for _, mode, params, weighted, mean_fold, _, seed, elapsed, timestamp in history:
        print(f"{timestamp}  {mode:<7} {params:<24} WA {weighted:.3f}  "
              f"mean fold {mean_fold:.3f}  seed {seed}  {elapsed:.1f} s")
    return 0


def _spectrum_dump(config, args):
    label = ConditionLabel.parse(args.label)
    record = parse_record(config.paths["record"], label)
    spectrum = to_spectrum(record, unit_conversion=config.unit_conversion,
                           remove_dc=config.remove_dc)
    write_spectrum_csv(spectrum, config.paths["out"], max_hz=args.max_hz)
    print(f"wrote {spectrum.n_bins} bins at {spectrum.bin_hz:.4f} Hz to {config.paths['out']}")
    return 0


HANDLERS = {
    "synth": _synth,
    "extract": _extract,
    "train": _train,
    "evaluate": _evaluate,
    "sweep": _sweep,
    "predict": _predict,
    "report": _report,
    "spectrum-dump": _spectrum_dump,
}
