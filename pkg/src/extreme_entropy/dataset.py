"""Binary-labelled datasets: loading, [0, 1] scaling and stratified folds."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files or invalid datasets."""


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        X = np.ascontiguousarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64).ravel()
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise DataError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError("dataset needs N >= 1 and d >= 1")
        if not np.all(np.isin(y, (-1, 1))):
            raise DataError("labels must be -1 or +1")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or infinite values")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.name)


def _parse_label(token: str, lineno: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"line {lineno}: cannot parse label {token!r}") from None
    if value == 1:
        return 1
    if value in (-1, 0):
        return -1
    raise DataError(f"line {lineno}: label outside {{-1,0,+1}}: {token!r}")


def _read_libsvm(text: str, n_features: int | None = None):
    rows, labels, width = [], [], 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_parse_label(tokens[0], lineno))
        entries = {}
        last = 0
        for tok in tokens[1:]:
            try:
                idx_s, val_s = tok.split(":", 1)
                idx, val = int(idx_s), float(val_s)
            except ValueError:
                raise DataError(f"line {lineno}: malformed entry {tok!r}") from None
            if idx <= last:
                raise DataError(f"line {lineno}: indices must be 1-based and ascending")
            last = idx
            entries[idx - 1] = val
        width = max(width, last)
        rows.append(entries)
    if not rows:
        raise DataError("no samples in file")
    if n_features is not None:
        if width > n_features:
            raise DataError(f"file uses feature index {width} but n_features={n_features}")
        width = n_features
    X = np.zeros((len(rows), max(width, 1)))
    for i, entries in enumerate(rows):
        for j, v in entries.items():
            X[i, j] = v
    return X, np.array(labels)


def _read_csv(text: str, label_column: int, header: bool):
    rows, labels, ncols = [], [], None
    lines = text.splitlines()
    start = 1 if header else 0
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        if not raw.strip():
            continue
        cells = [c.strip() for c in raw.split(",")]
        if ncols is None:
            ncols = len(cells)
        elif len(cells) != ncols:
            raise DataError(f"line {lineno}: expected {ncols} columns, found {len(cells)}")
        if not -ncols <= label_column < ncols:
            raise DataError(f"label column {label_column} out of range for {ncols} columns")
        lab = cells.pop(label_column)
        labels.append(_parse_label(lab, lineno))
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise DataError(f"line {lineno}: non-numeric feature value") from None
    if not rows:
        raise DataError("no samples in file")
    return np.array(rows, dtype=np.float64), np.array(labels)


def load(path, format: str = "libsvm", label_column: int | None = None,
         header: bool = False, name: str | None = None,
         n_features: int | None = None) -> Dataset:
    """Load a binary dataset from a libsvm or CSV file.

    Labels 0 are remapped to -1. Sparse libsvm rows are densified; the
    dimension is the largest index seen in the file unless `n_features`
    fixes it (needed when trailing features happen to be zero everywhere).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if format == "libsvm":
        X, y = _read_libsvm(text, n_features)
    elif format == "csv":
        X, y = _read_csv(text, 0 if label_column is None else label_column, header)
    else:
        raise DataError(f"unknown format {format!r}")
    return Dataset(X, y, name or path.stem)


def save_libsvm(ds: Dataset, path) -> None:
    """Write `ds` in libsvm format with 17 significant digits (exact round-trip)."""
    lines = []
    for x, y in zip(ds.features, ds.labels):
        items = " ".join(f"{j + 1}:{v:.17g}" for j, v in enumerate(x) if v != 0.0)
        lines.append(f"{int(y):+d} {items}".rstrip())
    Path(path).write_text("\n".join(lines) + "\n")


BUNDLED = ("breast-cancer", "diabetes", "heart", "blobs")


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("extreme_entropy") / "data" / f"{name}.libsvm"))


def load_bundled(name: str) -> Dataset:
    """Load a dataset shipped with the package (three UCI extracts and a toy set)."""
    if name not in BUNDLED:
        raise DataError(f"unknown bundled dataset {name!r}; choose from {BUNDLED}")
    return load(bundled_path(name), "libsvm", name=name)


@dataclass(frozen=True)
class ScalingTransform:
    minimum: np.ndarray
    range: np.ndarray

    def apply(self, ds: Dataset) -> Dataset:
        return apply_scaler(self, ds)


def fit_scaler(ds: Dataset) -> ScalingTransform:
    X = ds.features
    lo = X.min(axis=0)
    return ScalingTransform(lo, X.max(axis=0) - lo)


def scale_features(t: ScalingTransform, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    safe = np.where(t.range > 0, t.range, 1.0)
    out = (X - t.minimum) / safe
    out[:, t.range <= 0] = 0.0
    return out


def apply_scaler(t: ScalingTransform, ds: Dataset) -> Dataset:
    return Dataset(scale_features(t, ds.features), ds.labels, ds.name)


@dataclass(frozen=True)
class FoldPlan:
    folds: list = field(repr=False)
    k: int
    repeats: int
    seed: int

    def __iter__(self):
        return iter(self.folds)

    def __len__(self):
        return len(self.folds)

    def repeat(self, r: int) -> list:
        return self.folds[r * self.k:(r + 1) * self.k]


def stratified_kfold(ds: Dataset, k: int = 10, repeats: int = 1, seed: int = 0) -> FoldPlan:
    """Repeated stratified k-fold plan.

    Each class is shuffled with a seed-derived stream and dealt round-robin
    into the k folds. Class sizes per fold differ by at most one.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    y = ds.labels
    classes = [np.flatnonzero(y == c) for c in (1, -1)]
    if any(len(c) == 0 for c in classes):
        raise DataError("stratified folds need at least one sample of each class")
    if min(len(c) for c in classes) < k:
        warnings.warn(f"smaller class has fewer than k={k} members; some folds lack it",
                      stacklevel=2)
    rng = np.random.default_rng(seed)
    n = ds.n_samples
    folds = []
    for _ in range(repeats):
        assignment = np.empty(n, dtype=np.int64)
        offset = 0
        for members in classes:
            perm = rng.permutation(members)
            # continue dealing where the previous class stopped so fold sizes stay balanced
            assignment[perm] = (np.arange(len(perm)) + offset) % k
            offset += len(perm)
        for f in range(k):
            test = np.flatnonzero(assignment == f)
            train = np.flatnonzero(assignment != f)
            folds.append((train, test))
    return FoldPlan(folds, k, repeats, seed)


def split_by_class(ds, labels=None):
    """Rows of the positive and negative class, order preserved.

    Accepts a `Dataset` or a raw ``(features, labels)`` pair; the latter may
    be empty.
    """
    if labels is None:
        X, y = ds.features, ds.labels
    else:
        X, y = np.asarray(ds, dtype=np.float64), np.asarray(labels)
    return X[y == 1], X[y == -1]
