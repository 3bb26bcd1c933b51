import numpy as np
import pytest

from core.condition import ConditionLabel
from core.dataset import VibrationRecord
from core.features import FeatureMatrix
from core.signal_generator import SynthConfig, write_dataset

TABLE_EXCERPT = """Time,X,Y,Z
0.004516,-0.102961,0.030537,0.114270
0.004566,-0.118802,-0.020894,0.123060
0.004616,-0.110881,-0.046609,0.114270
0.004666,-0.102961,-0.053038,0.105480
0.004716,-0.087121,-0.059466,0.096690
"""


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def write_csv(tmp_path):
    """Write text to a CSV under tmp_path and return its path"""
    def _write(text, name="record.csv"):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path
    return _write


def make_record(x, y=None, z=None, rate=1000.0, label=ConditionLabel.NORMAL, missing=None):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    y = np.zeros(n) if y is None else np.asarray(y, dtype=np.float64)
    z = np.zeros(n) if z is None else np.asarray(z, dtype=np.float64)
    missing = np.zeros(n, dtype=bool) if missing is None else np.asarray(missing, dtype=bool)
    return VibrationRecord(time=np.arange(n) / rate, x=x, y=y, z=z, missing=missing,
                           label=label, declared_rate_hz=rate)


def make_blobs(rng, per_class=30, n_features=27, separation=10.0, std=1.0):
    """Four Gaussian blobs whose means sit `separation` std apart on distinct axes"""
    values, labels = [], []
    for code in range(4):
        center = np.zeros(n_features)
        center[code] = separation * std
        values.append(center + rng.normal(0.0, std, size=(per_class, n_features)))
        labels.append(np.full(per_class, code))
    return FeatureMatrix(values=np.vstack(values), labels=np.concatenate(labels).astype(np.int64))


@pytest.fixture
def blobs(rng):
    return make_blobs(rng)


SMALL_SYNTH = SynthConfig(sample_rate_hz=5000.0, duration_s=0.2, per_class_count=6, seed=7)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    write_dataset(SMALL_SYNTH, root)
    return root
