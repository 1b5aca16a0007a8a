"""Monte-Carlo estimation of the TARP benchmark sequence and the benchmark plane.

For a fixed ``n``, the benchmark for depth ``k`` is the expected test error
of a depth-``k`` n-TARP tree, estimated as the mean over independently grown
trees. ``b0`` (always predict the majority class) anchors the curve at zero
cost. Points are plotted as (error, cost), where the cost is the mean
training or testing wall-clock time.
"""

import csv
import enum
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .data import DEFAULT_FRACTIONS, DataPartition, LabeledDataset, partition
from .errors import SchemaError
from .tree import evaluate_tree, grow_tree

COST_AXES = ("training_time", "testing_time")
CSV_COLUMNS = ("n", "k", "mean_error", "std_error", "mean_training_time_s",
               "mean_testing_time_s")
MIN_LEAF_TRAIN = 10


class KmaxWarning(UserWarning):
    """Expected training samples per leaf fell below MIN_LEAF_TRAIN."""


@dataclass(frozen=True)
class PartitionConfig:
    """How each Monte-Carlo run obtains its train/validation/test split.

    ``sequential`` gives the same split to every run; ``stratified_random``
    re-draws it per run from the run's seed.
    """

    strategy: str = "stratified_random"
    fractions: tuple = DEFAULT_FRACTIONS

    def to_dict(self):
        return {"strategy": self.strategy, "fractions": list(self.fractions)}


Split = Union[PartitionConfig, DataPartition]


@dataclass(frozen=True)
class BenchmarkPoint:
    k: int
    n: int
    mean_error: float
    std_error: float
    runs: int
    mean_training_time: float
    mean_testing_time: float
    errors: Optional[tuple] = field(default=None, compare=False, repr=False)

    def to_dict(self):
        return {"k": self.k, "mean_error": self.mean_error, "std_error": self.std_error,
                "mean_training_time_s": self.mean_training_time,
                "mean_testing_time_s": self.mean_testing_time, "runs": self.runs}

    def cost(self, axis="training_time"):
        if axis == "training_time":
            return self.mean_training_time
        if axis == "testing_time":
            return self.mean_testing_time
        raise ValueError(f"unknown cost axis {axis!r}; expected one of {COST_AXES}")


@dataclass(frozen=True)
class Asymptote:
    value: float
    converged: bool


@dataclass
class BenchmarkCurve:
    n: int
    points: list
    b0: float
    asymptote: Optional[Asymptote] = None
    dataset: str = ""
    config: Optional[dict] = None

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.k)
        if any(p.n != self.n for p in self.points):
            raise ValueError("all points of a curve must share its n")

    @property
    def errors(self):
        return np.array([p.mean_error for p in self.points])

    @property
    def std_errors(self):
        return np.array([p.std_error for p in self.points])

    def to_dict(self):
        d = {"dataset": self.dataset, "n": self.n, "b0": self.b0,
             "points": [p.to_dict() for p in self.points],
             "asymptote": None if self.asymptote is None else
             {"value": self.asymptote.value, "converged": self.asymptote.converged}}
        if self.config is not None:
            d["config"] = self.config
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            n = int(d["n"])
            points = [BenchmarkPoint(int(p["k"]), n, float(p["mean_error"]),
                                     float(p["std_error"]), int(p["runs"]),
                                     float(p["mean_training_time_s"]),
                                     float(p["mean_testing_time_s"]))
                      for p in d["points"]]
            a = d.get("asymptote")
            asym = None if a is None else Asymptote(float(a["value"]), bool(a["converged"]))
            return cls(n, points, float(d["b0"]), asym, d.get("dataset", ""), d.get("config"))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed curve record: {e!r}") from None


@dataclass(frozen=True)
class MethodPoint:
    name: str
    error: float
    training_time: float
    testing_time: float

    def __post_init__(self):
        for attr in ("error", "training_time", "testing_time"):
            v = getattr(self, attr)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ValueError(f"method {self.name!r}: {attr} must be finite and >= 0, "
                                 f"got {v!r}")
        if self.error > 1:
            raise ValueError(f"method {self.name!r}: error must be in [0, 1]")

    def cost(self, axis="training_time"):
        if axis not in COST_AXES:
            raise ValueError(f"unknown cost axis {axis!r}; expected one of {COST_AXES}")
        return self.training_time if axis == "training_time" else self.testing_time

    def to_dict(self):
        return {"name": self.name, "error": self.error,
                "training_time_s": self.training_time, "testing_time_s": self.testing_time}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(str(d["name"]), float(d["error"]), float(d["training_time_s"]),
                       float(d["testing_time_s"]))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed method record: {e!r}") from None


class RegionLabel(str, enum.Enum):
    NEGATIVE_GAIN = "negative_gain"
    COMPUTATIONAL_GAIN = "computational_gain"
    STRUCTURAL_GAIN = "structural_gain"


def estimate_B0(data: Union[LabeledDataset, Sequence[int]]) -> float:
    """Error of always predicting the majority class, min(N0, N1) / N."""
    labels = data.labels if isinstance(data, LabeledDataset) else np.asarray(data)
    counts = np.bincount(labels, minlength=2)
    if len(counts) != 2 or counts.min() == 0:
        raise ValueError(f"both classes must be present, got counts {tuple(counts)}")
    return float(counts.min() / counts.sum())


def run_seed(seed, n, k, run):
    """Per-run (partition, tree) seed sequences; a fresh stream for every (n, k, run)."""
    part_ss, tree_ss = np.random.SeedSequence([int(seed), int(n), int(k), int(run)]).spawn(2)
    return part_ss, tree_ss


def resolve_split(dataset, split: Split, part_ss) -> DataPartition:
    if isinstance(split, DataPartition):
        return split
    seed = part_ss if split.strategy == "stratified_random" else None
    return partition(dataset, split.strategy, split.fractions, seed=seed)


def run_once(dataset: LabeledDataset, split: Split, n, k, seed, run):
    """Grow and test one tree. Returns (test error, training time, testing time)."""
    part_ss, tree_ss = run_seed(seed, n, k, run)
    parts = resolve_split(dataset, split, part_ss)
    tree = grow_tree(dataset, parts, n, k, np.random.default_rng(tree_ss))
    X_test = dataset.features[parts.test_idx]
    y_test = dataset.labels[parts.test_idx]
    err = evaluate_tree(tree, X_test, y_test)
    return err, tree.training_time, tree.testing_time


def _map_runs(fn, runs, jobs):
    if jobs is None or jobs <= 1 or runs == 1:
        return [fn(r) for r in range(runs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(runs), chunksize=max(1, runs // (4 * jobs))))


def estimate_Bkn(dataset: LabeledDataset, split: Split, n, k, runs=100, seed=0,
                 jobs=1) -> BenchmarkPoint:
    """Mean test error of ``runs`` independently grown depth-``k`` n-TARP trees."""
    if n < 1 or k < 1 or runs < 1:
        raise ValueError(f"n, k and runs must be >= 1, got n={n}, k={k}, runs={runs}")
    results = _map_runs(partial(run_once, dataset, split, n, k, seed), runs, jobs)
    errs = np.array([r[0] for r in results])
    std_error = float(errs.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
    return BenchmarkPoint(
        k=int(k), n=int(n), mean_error=float(errs.mean()), std_error=std_error,
        runs=int(runs),
        mean_training_time=float(np.mean([r[1] for r in results])),
        mean_testing_time=float(np.mean([r[2] for r in results])),
        errors=tuple(float(e) for e in errs),
    )


def _train_size(dataset, split):
    if isinstance(split, DataPartition):
        return len(split.train_idx)
    return len(partition(dataset, split.strategy, split.fractions, seed=0).train_idx)


def max_reliable_k(train_size, min_leaf=MIN_LEAF_TRAIN):
    """Largest k with train_size / 2**k >= min_leaf (0 if even the root is too small)."""
    if train_size < min_leaf:
        return 0
    return int(math.floor(math.log2(train_size / min_leaf)))


def estimate_asymptote(curve: Union["BenchmarkCurve", Sequence[float]], window=3,
                       rel_tol=0.05, noise_z=2.0) -> Asymptote:
    """Plateau of the last ``window`` errors.

    Converged when the spread (max - min) of the window is at most
    ``rel_tol`` times its mean, or at most ``noise_z`` standard errors of a
    difference of two points (``sqrt(2) * max std_error`` in the window),
    so that Monte-Carlo noise on a near-zero plateau does not read as a
    trend. The value is then the window mean, otherwise the last error.
    """
    if isinstance(curve, BenchmarkCurve):
        errors, std_errors = curve.errors, curve.std_errors
    else:
        errors = np.asarray(curve, dtype=float)
        std_errors = np.zeros_like(errors)
    if window < 1 or len(errors) < window:
        raise ValueError(f"need at least {window} points, got {len(errors)}")
    tail = errors[-window:]
    mean = float(tail.mean())
    spread = float(tail.max() - tail.min())
    noise = noise_z * math.sqrt(2.0) * float(std_errors[-window:].max())
    if spread <= max(rel_tol * mean, noise):
        return Asymptote(mean, True)
    return Asymptote(float(errors[-1]), False)


def estimate_curve(dataset: LabeledDataset, split: Split, n, k_max, runs=100, seed=0,
                   jobs=1, window=3, rel_tol=0.05, noise_z=2.0, name="") -> BenchmarkCurve:
    """Benchmark points for k = 1..k_max plus the b0 anchor and an asymptote."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    train_size = _train_size(dataset, split)
    if k_max > max_reliable_k(train_size):
        warnings.warn(
            f"k_max={k_max} leaves fewer than {MIN_LEAF_TRAIN} expected training samples "
            f"per leaf ({train_size} / 2**{k_max} = {train_size / 2 ** k_max:.2f})",
            KmaxWarning, stacklevel=2)
    points = [estimate_Bkn(dataset, split, n, k, runs, seed, jobs)
              for k in range(1, k_max + 1)]
    curve = BenchmarkCurve(int(n), points, estimate_B0(dataset), dataset=name)
    if len(points) >= window:
        curve.asymptote = estimate_asymptote(curve, window, rel_tol, noise_z)
    else:
        curve.asymptote = Asymptote(points[-1].mean_error, False)
    return curve


@dataclass(frozen=True)
class RegionResult:
    method: MethodPoint
    label: RegionLabel
    cost_axis: str
    asymptote: Asymptote
    dominated_by: Optional[tuple] = None  # (k, error, cost); k == 0 is the b0 anchor
    margin: Optional[float] = None  # asymptote - error, for structural gain

    @property
    def provisional(self):
        return not self.asymptote.converged

    def to_dict(self):
        return {"name": self.method.name, "region": self.label.value,
                "cost_axis": self.cost_axis, "error": self.method.error,
                "cost": self.method.cost(self.cost_axis),
                "dominated_by": None if self.dominated_by is None else
                dict(zip(("k", "error", "cost"), self.dominated_by)),
                "margin_to_asymptote": self.margin,
                "asymptote": self.asymptote.value,
                "asymptote_converged": self.asymptote.converged}


def region_report(curve: BenchmarkCurve, m: MethodPoint,
                  cost_axis="training_time") -> RegionResult:
    """Place a method on the benchmark plane of ``curve``.

    Structural gain: error strictly below the asymptote. Negative gain: some
    benchmark point, or the zero-cost b0 anchor, is at least as accurate and
    at most as expensive. Computational gain otherwise.
    """
    if cost_axis not in COST_AXES:
        raise ValueError(f"unknown cost axis {cost_axis!r}; expected one of {COST_AXES}")
    if not curve.points:
        raise ValueError("curve has no benchmark points")
    asym = curve.asymptote
    if asym is None:
        asym = (estimate_asymptote(curve) if len(curve.points) >= 3
                else Asymptote(curve.points[-1].mean_error, False))
    cost = m.cost(cost_axis)
    if m.error < asym.value:
        return RegionResult(m, RegionLabel.STRUCTURAL_GAIN, cost_axis, asym,
                            margin=asym.value - m.error)
    anchors = [(0, curve.b0, 0.0)] + [(p.k, p.mean_error, p.cost(cost_axis))
                                      for p in curve.points]
    for k, err, c in anchors:
        if err <= m.error and c <= cost:
            return RegionResult(m, RegionLabel.NEGATIVE_GAIN, cost_axis, asym,
                                dominated_by=(k, err, c))
    return RegionResult(m, RegionLabel.COMPUTATIONAL_GAIN, cost_axis, asym)


def classify_region(curve: BenchmarkCurve, m: MethodPoint,
                    cost_axis="training_time") -> RegionLabel:
    return region_report(curve, m, cost_axis).label


def export_results(curves: Sequence[BenchmarkCurve], path, fmt="json",
                   methods: Sequence[MethodPoint] = (), cost_axis="training_time",
                   config: Optional[dict] = None):
    """Write curves as JSON (list of curve records) or plot-ready CSV.

    In JSON, ``methods`` are attached to every curve together with their
    region on that curve, and ``config`` is embedded in each record. CSV
    holds one row per (n, k) and carries ``config`` as ``#`` comment lines.
    """
    path = Path(path)
    if fmt == "json":
        records = []
        for c in curves:
            d = c.to_dict()
            if config is not None:
                d["config"] = config
            if methods:
                d["methods"] = [dict(m.to_dict(), **{
                    "region": region_report(c, m, cost_axis).label.value,
                    "cost_axis": cost_axis}) for m in methods]
            records.append(d)
        with path.open("w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2)
            fh.write("\n")
    elif fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            if config is not None:
                for line in json.dumps(config, indent=None, sort_keys=True).splitlines():
                    fh.write(f"# config: {line}\n")
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for c in curves:
                for p in c.points:
                    w.writerow([p.n, p.k, repr(p.mean_error), repr(p.std_error),
                                repr(p.mean_training_time), repr(p.mean_testing_time)])
    else:
        raise ValueError(f"unknown export format {fmt!r}; expected 'json' or 'csv'")
    return path


def load_curves(path) -> list:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}: invalid JSON ({e})") from None
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise SchemaError(f"{path}: expected a list of curve records")
    return [BenchmarkCurve.from_dict(d) for d in data]


def load_methods(path) -> list:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(data, list):
        raise SchemaError(f"{path}: expected a JSON array of method records")
    return [MethodPoint.from_dict(d) for d in data]
