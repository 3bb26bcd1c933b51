"""
Run configuration assembled from command-line arguments
"""
from dataclasses import dataclass, field
from pathlib import Path

from core.classifier import GAMMA_AUTO, ClassifierSpec
from core.evaluation import SplitPlan
from core.extraction import ExtractionOptions
from core.features import SHAPE_PRINTED
from utils.parallel import thread_count

COMMANDS = ("synth", "extract", "train", "evaluate", "sweep", "predict", "report",
            "spectrum-dump")
NORMALIZE_COLUMN = "column"
NORMALIZE_SPECTRUM = "spectrum"
NORMALIZE_STRICT = "strict"
NORMALIZE_NONE = "none"


@dataclass
class RunConfig:
    command: str
    paths: dict = field(default_factory=dict)
    seed: int = 42
    classifier: ClassifierSpec = None
    plan: SplitPlan = None
    remove_dc: bool = False
    shape_factor: str = SHAPE_PRINTED
    normalize: str = NORMALIZE_COLUMN
    unit_conversion: bool = True
    threads: int = -1

    @classmethod
    def from_args(cls, args):
        """Build the configuration for one parsed subcommand"""
        paths = {name: Path(value) for name, value in vars(args).items()
                 if name in _PATH_ARGS and value is not None}
        config = cls(command=args.command, paths=paths, seed=args.seed,
                     remove_dc=getattr(args, "remove_dc", False),
                     shape_factor=getattr(args, "shape_factor", SHAPE_PRINTED),
                     normalize=getattr(args, "normalize", NORMALIZE_COLUMN),
                     unit_conversion=not getattr(args, "no_unit_conversion", False),
                     threads=thread_count(getattr(args, "threads", None)))
        if hasattr(args, "clf"):
            gamma = args.gamma if args.gamma == GAMMA_AUTO else float(args.gamma)
            config.classifier = ClassifierSpec(kind=args.clf, svm_c=args.C, svm_gamma=gamma,
                                               knn_k=args.k, gnb_smoothing=args.var_smoothing)
        if hasattr(args, "mode"):
            if args.mode == "1fold":
                config.plan = SplitPlan.holdout(test_fraction=args.test_fraction, seed=args.seed)
            else:
                config.plan = SplitPlan.kfold(k=args.folds, seed=args.seed)
        return config

    @property
    def extraction(self):
        return ExtractionOptions(unit_conversion=self.unit_conversion, remove_dc=self.remove_dc,
                                 shape_factor=self.shape_factor,
                                 spectrum_scaling=self.normalize == NORMALIZE_SPECTRUM)


_PATH_ARGS = ("out", "data", "features", "model", "manifest", "record", "db",
              "summary_out", "best_out")
