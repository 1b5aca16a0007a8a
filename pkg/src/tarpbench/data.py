"""Labeled two-class datasets: CSV ingestion, train/validation/test partitioning,
and synthetic Gaussian mixtures with their Bayes error."""

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.special import ndtr
from scipy.stats import multivariate_normal

from .errors import ParseError, PartitionError, SchemaError, SpecError

SPLIT_NAMES = ("train", "val", "test")
DEFAULT_FRACTIONS = (0.25, 0.25, 0.5)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """N x p feature matrix with binary labels.

    ``groups`` is an optional per-row integer tag (e.g. the original digit in
    a merged even-vs-odd problem); sequential partitioning splits within each
    (class, group) cell when it is present.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: Optional[tuple] = None
    groups: Optional[np.ndarray] = None
    label_names: Optional[tuple] = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise SchemaError(f"features must be a 2-D matrix, got shape {X.shape}")
        if y.ndim != 1 or len(y) != X.shape[0]:
            raise SchemaError(
                f"expected {X.shape[0]} labels, got shape {y.shape}")
        if not np.all(np.isin(y, (0, 1))):
            raise SchemaError("labels must be 0 or 1")
        y = y.astype(np.int64)
        counts = np.bincount(y, minlength=2)
        if counts.min() == 0:
            raise SchemaError(
                f"both classes must be present, got counts {tuple(counts)}")
        bad = np.argwhere(~np.isfinite(X))
        if len(bad):
            i, j = bad[0]
            raise ValueError(f"non-finite feature value at row {i}, column {j}")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise SchemaError("feature_names length does not match feature count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.groups is not None:
            g = np.asarray(self.groups)
            if g.shape != y.shape:
                raise SchemaError("groups must have one entry per row")
            g.setflags(write=False)
            object.__setattr__(self, "groups", g)

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def class_counts(self):
        return tuple(int(c) for c in np.bincount(self.labels, minlength=2))


@dataclass(frozen=True, eq=False)
class DataPartition:
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray

    def __post_init__(self):
        for name in ("train_idx", "val_idx", "test_idx"):
            idx = np.asarray(getattr(self, name), dtype=np.int64)
            idx.setflags(write=False)
            object.__setattr__(self, name, idx)
        allidx = np.concatenate([self.train_idx, self.val_idx, self.test_idx])
        if len(np.unique(allidx)) != len(allidx):
            raise PartitionError("train, validation and test indices overlap")

    def sizes(self):
        return len(self.train_idx), len(self.val_idx), len(self.test_idx)

    def __eq__(self, other):
        if not isinstance(other, DataPartition):
            return NotImplemented
        return all(np.array_equal(getattr(self, a), getattr(other, a))
                   for a in ("train_idx", "val_idx", "test_idx"))


def load_csv(path, label_column: Union[str, int] = -1, header=True,
             delimiter=",") -> LabeledDataset:
    """Read a CSV file with one sample per row.

    The label column may be given by header name or by (possibly negative)
    index. Its values must take exactly two distinct strings, mapped to 0
    and 1 in sorted order. All other columns must parse as finite floats.
    Row order is preserved.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rows = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: file is empty")

    names = None
    if header:
        _, names = rows[0]
        names = [c.strip() for c in names]
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")

    width = len(names) if names is not None else len(rows[0][1])
    for lineno, r in rows:
        if len(r) != width:
            raise ParseError(f"expected {width} columns, found {len(r)}", row=lineno)

    if isinstance(label_column, str):
        if names is None:
            raise SchemaError("label column given by name but the file has no header")
        if label_column not in names:
            raise SchemaError(f"label column {label_column!r} not in header {names}")
        label_col = names.index(label_column)
    else:
        label_col = int(label_column)
        if not -width <= label_col < width:
            raise SchemaError(f"label column index {label_column} out of range")
        label_col %= width

    raw_labels = [r[label_col].strip() for _, r in rows]
    values = sorted(set(raw_labels))
    if len(values) != 2:
        raise SchemaError(
            f"label column must contain exactly two distinct values, found {len(values)}: "
            f"{values[:10]}")
    mapping = {v: i for i, v in enumerate(values)}

    feat_cols = [j for j in range(width) if j != label_col]
    X = np.empty((len(rows), len(feat_cols)))
    for i, (lineno, r) in enumerate(rows):
        for jj, j in enumerate(feat_cols):
            try:
                X[i, jj] = float(r[j])
            except ValueError:
                raise ParseError(f"column {j}: cannot parse {r[j]!r} as a number",
                                 row=lineno) from None
    bad = np.argwhere(~np.isfinite(X))
    if len(bad):
        i, jj = bad[0]
        raise ValueError(
            f"non-finite feature value at row {rows[i][0]}, column {feat_cols[jj]}")

    y = np.array([mapping[v] for v in raw_labels], dtype=np.int64)
    feature_names = tuple(names[j] for j in feat_cols) if names is not None else None
    return LabeledDataset(X, y, feature_names=feature_names, label_names=tuple(values))


def save_csv(dataset: LabeledDataset, path, label_name="label"):
    """Write ``dataset`` as CSV with a header row and the label in the last column."""
    names = dataset.feature_names or tuple(f"x{j}" for j in range(dataset.n_features))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + [label_name])
        for row, lab in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])


MFEAT_SAMPLES_PER_DIGIT = 200


def load_mfeat(path, task="zero_vs_one") -> LabeledDataset:
    """Load one UCI Multiple Features file (e.g. ``mfeat-fou``, ``mfeat-kar``).

    The files hold 2000 whitespace-separated rows, 200 per digit in order
    0..9, without labels. ``task`` is ``"zero_vs_one"`` (400 rows, digit
    0 -> class 0) or ``"even_vs_odd"`` (all rows, even -> class 0). The
    source digit is kept in ``groups``.
    """
    X = np.loadtxt(path)
    if X.ndim != 2 or X.shape[0] != 10 * MFEAT_SAMPLES_PER_DIGIT:
        raise SchemaError(f"{path}: expected 2000 rows, got shape {X.shape}")
    digits = np.repeat(np.arange(10), MFEAT_SAMPLES_PER_DIGIT)
    if task == "zero_vs_one":
        keep = digits < 2
        return LabeledDataset(X[keep], digits[keep], groups=digits[keep],
                              label_names=("0", "1"))
    if task == "even_vs_odd":
        return LabeledDataset(X, digits % 2, groups=digits, label_names=("even", "odd"))
    raise ValueError(f"unknown MFEAT task {task!r}")


def _split_sizes(count, fractions):
    n_train = math.floor(fractions[0] * count + 1e-9)
    n_val = math.floor(fractions[1] * count + 1e-9)
    return n_train, n_val, count - n_train - n_val


def partition(dataset: LabeledDataset, strategy="sequential",
              fractions: Sequence[float] = DEFAULT_FRACTIONS, seed=None) -> DataPartition:
    """Split a dataset into train/validation/test index sets, per class.

    ``sequential`` keeps row order within each class (and within each group
    when the dataset carries ``groups``). ``stratified_random`` shuffles
    within each class using ``seed``. Sizes are floor(train), floor(val) and
    the remainder to test, computed per cell.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or min(fractions) <= 0 or abs(sum(fractions) - 1) > 1e-9:
        raise PartitionError(f"fractions must be three positive numbers summing to 1, "
                             f"got {fractions}")
    if strategy == "sequential":
        rng = None
        cells = dataset.labels.astype(np.int64)
        if dataset.groups is not None:
            _, g = np.unique(dataset.groups, return_inverse=True)
            cells = cells * (g.max() + 1) + g
    elif strategy == "stratified_random":
        if seed is None:
            raise PartitionError("stratified_random partitioning needs a seed")
        rng = np.random.default_rng(seed)
        cells = dataset.labels
    else:
        raise PartitionError(f"unknown partition strategy {strategy!r}")

    parts = ([], [], [])
    for cell in np.unique(cells):
        idx = np.flatnonzero(cells == cell)
        if rng is not None:
            idx = rng.permutation(idx)
        n_train, n_val, _ = _split_sizes(len(idx), fractions)
        parts[0].append(idx[:n_train])
        parts[1].append(idx[n_train:n_train + n_val])
        parts[2].append(idx[n_train + n_val:])
    parts = [np.sort(np.concatenate(p)) for p in parts]

    for name, idx in zip(SPLIT_NAMES, parts):
        present = np.bincount(dataset.labels[idx], minlength=2)
        for c in (0, 1):
            if present[c] == 0:
                raise PartitionError(f"{name} split has no samples of class {c}")
    return DataPartition(*parts)


@dataclass(frozen=True, eq=False)
class GaussianMixtureSpec:
    """Two-class Gaussian mixture; class 0 ~ N(mu1, cov1) with prior ``prior1``."""

    mu1: np.ndarray
    mu2: np.ndarray
    cov1: np.ndarray
    cov2: np.ndarray
    prior1: float = 0.5

    def __post_init__(self):
        mu1 = np.atleast_1d(np.asarray(self.mu1, dtype=float))
        mu2 = np.atleast_1d(np.asarray(self.mu2, dtype=float))
        p = len(mu1)
        if mu1.ndim != 1 or mu2.shape != mu1.shape:
            raise SpecError("mu1 and mu2 must be vectors of the same length")
        covs = []
        for name in ("cov1", "cov2"):
            c = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            if c.shape != (p, p):
                raise SpecError(f"{name} must be {p}x{p}, got {c.shape}")
            if not np.allclose(c, c.T, rtol=0, atol=1e-12):
                raise SpecError(f"{name} is not symmetric")
            if np.linalg.eigvalsh(c).min() <= 1e-12:
                raise SpecError(f"{name} is not positive definite")
            covs.append(c)
        if not 0 < self.prior1 < 1:
            raise SpecError(f"prior1 must lie in (0, 1), got {self.prior1}")
        for name, v in (("mu1", mu1), ("mu2", mu2), ("cov1", covs[0]), ("cov2", covs[1])):
            if not np.all(np.isfinite(v)):
                raise SpecError(f"{name} has non-finite entries")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "prior1", float(self.prior1))

    @property
    def dim(self):
        return len(self.mu1)

    @property
    def prior2(self):
        return 1.0 - self.prior1

    def swapped(self):
        return GaussianMixtureSpec(self.mu2, self.mu1, self.cov2, self.cov1, self.prior2)

    def to_dict(self):
        return {"mu1": self.mu1.tolist(), "mu2": self.mu2.tolist(),
                "cov1": self.cov1.tolist(), "cov2": self.cov2.tolist(),
                "prior1": self.prior1}

    @classmethod
    def from_dict(cls, d):
        missing = {"mu1", "mu2", "cov1", "cov2", "prior1"} - set(d)
        if missing:
            raise SpecError(f"mixture spec is missing keys {sorted(missing)}")
        return cls(d["mu1"], d["mu2"], d["cov1"], d["cov2"], d["prior1"])

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as e:
                raise SpecError(f"{path}: invalid JSON ({e})") from None
        if not isinstance(d, dict):
            raise SpecError(f"{path}: expected a JSON object")
        return cls.from_dict(d)

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)


def sample_gaussian_mixture(spec: GaussianMixtureSpec, count, seed) -> LabeledDataset:
    if count < 2:
        raise ValueError(f"count must be at least 2, got {count}")
    rng = np.random.default_rng(seed)
    labels = (rng.random(count) >= spec.prior1).astype(np.int64)
    z = rng.standard_normal((count, spec.dim))
    X = np.empty_like(z)
    for c, (mu, cov) in enumerate(((spec.mu1, spec.cov1), (spec.mu2, spec.cov2))):
        L = np.linalg.cholesky(cov)
        m = labels == c
        X[m] = mu + z[m] @ L.T
    if labels.min() == labels.max():
        raise SpecError(f"all {count} samples drew the same class; increase count")
    return LabeledDataset(X, labels)


class BayesError(NamedTuple):
    value: float
    std_error: float
    method: str


def bayes_error_gaussian(spec: GaussianMixtureSpec, mc_samples=1_000_000,
                         seed=0) -> BayesError:
    """Bayes error of a two-Gaussian mixture.

    Equal covariances use the closed form in the Mahalanobis distance.
    Otherwise the error is the expectation, under the mixture, of the
    smaller posterior, estimated from ``mc_samples`` draws.
    """
    p1, p2 = spec.prior1, spec.prior2
    if np.allclose(spec.cov1, spec.cov2, rtol=0, atol=1e-9):
        cov = (spec.cov1 + spec.cov2) / 2
        d = spec.mu2 - spec.mu1
        try:
            delta = math.sqrt(max(float(d @ np.linalg.solve(cov, d)), 0.0))
        except np.linalg.LinAlgError as e:
            raise ArithmeticError(f"singular covariance: {e}") from None
        if delta == 0.0:
            return BayesError(min(p1, p2), 0.0, "closed_form")
        log_ratio = math.log(p1 / p2)
        err = (p1 * ndtr(-delta / 2 - log_ratio / delta)
               + p2 * ndtr(-delta / 2 + log_ratio / delta))
        return BayesError(float(err), 0.0, "closed_form")

    data = sample_gaussian_mixture(spec, mc_samples, seed)
    lp1 = np.log(p1) + multivariate_normal(spec.mu1, spec.cov1).logpdf(data.features)
    lp2 = np.log(p2) + multivariate_normal(spec.mu2, spec.cov2).logpdf(data.features)
    # smaller posterior = 1 / (1 + exp(|lp1 - lp2|))
    post_min = 1.0 / (1.0 + np.exp(np.abs(lp1 - lp2)))
    return BayesError(float(post_min.mean()),
                      float(post_min.std(ddof=1) / math.sqrt(mc_samples)), "monte_carlo")
