"""Statlog (Landsat Satellite) loader."""

import os
import shutil
import warnings
from pathlib import Path

import numpy as np

DATA_ENV = "ADAPTIVE_SGLD_DATA"
N_FEATURES = 36
LABELS = (1, 2, 3, 4, 5, 7)
EXPECTED_ROWS = {"train": 4435, "test": 2000}


class DatasetError(ValueError):
    """Malformed or missing dataset file."""


def data_root():
    """Directory holding ``sat.trn`` / ``sat.tst``; overridable via ``$ADAPTIVE_SGLD_DATA``."""
    return Path(os.environ.get(DATA_ENV, Path("data") / "landsat"))


def read_landsat_file(path, expected_rows=None):
    """Parse one whitespace-separated Statlog file into ``(X, y)``.

    ``X`` is scaled to [0, 1] by dividing by 255 and ``y`` holds contiguous
    class indices (label 7 becomes 5).
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    label_index = {lab: k for k, lab in enumerate(LABELS)}
    rows, labels = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != N_FEATURES + 1:
                raise DatasetError(
                    f"{path}:{lineno}: expected {N_FEATURES + 1} fields, found {len(fields)}"
                )
            try:
                values = [int(v) for v in fields]
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: non-integer field") from None
            feats, lab = values[:-1], values[-1]
            if min(feats) < 0 or max(feats) > 255:
                raise DatasetError(f"{path}:{lineno}: attribute outside [0, 255]")
            if lab not in label_index:
                raise DatasetError(f"{path}:{lineno}: unknown class label {lab}")
            rows.append(feats)
            labels.append(label_index[lab])
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    if expected_rows is not None and len(rows) != expected_rows:
        warnings.warn(f"{path}: expected {expected_rows} rows, found {len(rows)}", stacklevel=2)
    X = np.array(rows, dtype=float) / 255.0
    return X, np.array(labels, dtype=np.intp)


def load_landsat(train_path=None, test_path=None):
    """Return ``(X_train, y_train, X_test, y_test)``.

    Paths default to ``sat.trn`` / ``sat.tst`` under :func:`data_root`.
    Both files are checked for existence before either is parsed.
    """
    root = data_root()
    train_path = Path(train_path) if train_path is not None else root / "sat.trn"
    test_path = Path(test_path) if test_path is not None else root / "sat.tst"
    for p in (train_path, test_path):
        if not p.is_file():
            raise FileNotFoundError(f"dataset file not found: {p}")
    X_tr, y_tr = read_landsat_file(train_path, EXPECTED_ROWS["train"])
    X_te, y_te = read_landsat_file(test_path, EXPECTED_ROWS["test"])
    return X_tr, y_tr, X_te, y_te


def ingest_landsat(train_path, test_path, out_dir):
    """Validate the two files and copy them to ``out_dir`` under canonical names."""
    X_tr, y_tr, X_te, y_te = load_landsat(train_path, test_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(train_path, out / "sat.trn")
    shutil.copyfile(test_path, out / "sat.tst")
    return {
        "train_rows": len(y_tr),
        "test_rows": len(y_te),
        "train_class_counts": np.bincount(y_tr, minlength=len(LABELS)).tolist(),
        "test_class_counts": np.bincount(y_te, minlength=len(LABELS)).tolist(),
        "out_dir": str(out),
    }
