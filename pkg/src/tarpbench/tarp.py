"""Thresholding After Random Projection (TARP) and best-of-n selection.

A TARP projects feature vectors onto a single random direction ``r`` and
thresholds the scalar ``r @ x``.  The threshold comes from a two-Gaussian
fit of the projected classes; the best of ``n`` candidates (n-TARP) is the
one whose split leaves the lowest size-weighted Gini impurity.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, FitError

SIGMA_FLOOR = 1e-12
EQUAL_SIGMA_TOL = 1e-12


def sample_projection(p, rng: np.random.Generator) -> np.ndarray:
    """Draw a length-``p`` vector with i.i.d. Uniform[-1, 1] entries."""
    if p < 1:
        raise DimensionError(f"projection dimension must be >= 1, got {p}")
    while True:
        r = rng.uniform(-1.0, 1.0, size=p)
        if np.any(r != 0.0):
            return r


def sample_projections(p, n, rng: np.random.Generator) -> np.ndarray:
    """``n`` projection vectors as rows of an n x p matrix, drawn in order."""
    return np.stack([sample_projection(p, rng) for _ in range(n)])


def project(X, r) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    r = np.asarray(r, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != r.shape[0]:
        raise DimensionError(
            f"feature dimension {X.shape[1]} does not match projection length {r.shape[0]}")
    return X @ r


@dataclass(frozen=True)
class GaussianFit1D:
    """Per-class Gaussian fit of projected values (a = class 0, b = class 1)."""

    mu_a: float
    mu_b: float
    sigma_a: float
    sigma_b: float
    prior_a: float
    prior_b: float


def fit_gaussians_1d(values, labels) -> GaussianFit1D:
    """Class means, population standard deviations and class fractions."""
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    a = values[labels == 0]
    b = values[labels == 1]
    if len(a) == 0 or len(b) == 0:
        raise FitError(f"need samples from both classes, got {len(a)} and {len(b)}")
    total = len(a) + len(b)
    return GaussianFit1D(float(a.mean()), float(b.mean()), float(a.std()), float(b.std()),
                         len(a) / total, len(b) / total)


def _between(u, lo, hi):
    return lo < u < hi


def bayes_threshold_1d(fit: GaussianFit1D) -> Optional[float]:
    """Point between the class means where the weighted densities cross.

    Returns None when there is nothing to split on (equal means). Falls back
    to the midpoint of the means when the crossing does not fall strictly
    between them.
    """
    mu_a, mu_b = fit.mu_a, fit.mu_b
    if mu_a == mu_b or fit.prior_a <= 0 or fit.prior_b <= 0:
        return None
    midpoint = 0.5 * (mu_a + mu_b)
    sa, sb = fit.sigma_a, fit.sigma_b
    if sa == 0 and sb == 0:
        return midpoint
    sa = max(sa, SIGMA_FLOOR)
    sb = max(sb, SIGMA_FLOOR)

    # Solve in u = t - mu_a: A u^2 + B u + C = 0 is the log-density difference.
    d = mu_b - mu_a
    lo, hi = min(0.0, d), max(0.0, d)
    log_term = math.log(fit.prior_a / fit.prior_b) + math.log(sb / sa)
    if abs(sa - sb) <= EQUAL_SIGMA_TOL:
        s2 = 0.5 * (sa * sa + sb * sb)
        u = 0.5 * d + s2 * math.log(fit.prior_a / fit.prior_b) / d
        return mu_a + u if _between(u, lo, hi) else midpoint

    A = 0.5 / (sb * sb) - 0.5 / (sa * sa)
    B = -d / (sb * sb)
    C = 0.5 * d * d / (sb * sb) + log_term
    disc = B * B - 4.0 * A * C
    if disc < 0:
        return midpoint
    q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
    roots = []
    if q != 0:
        roots = [q / A, C / q]
    elif A != 0:
        roots = [0.0]
    inside = [u for u in roots if math.isfinite(u) and _between(u, lo, hi)]
    if not inside:
        return midpoint
    u = min(inside, key=lambda v: abs(v - 0.5 * d))
    return mu_a + u


def gini_impurity(class_counts: Sequence[int]) -> float:
    n0, n1 = class_counts
    total = n0 + n1
    if total < 1:
        raise ValueError("gini impurity of an empty node is undefined")
    f0, f1 = n0 / total, n1 / total
    return 1.0 - f0 * f0 - f1 * f1


def weighted_children_gini(labels, below) -> float:
    """Size-weighted mean Gini impurity of the two sides of a split."""
    labels = np.asarray(labels)
    below = np.asarray(below, dtype=bool)
    total = len(labels)
    if total == 0:
        raise ValueError("cannot score a split of zero samples")
    out = 0.0
    for side in (labels[below], labels[~below]):
        if len(side):
            n1 = int(side.sum())
            out += len(side) / total * gini_impurity((len(side) - n1, n1))
    return out


@dataclass(frozen=True, eq=False)
class TarpClassifier:
    """``r @ x < threshold`` -> ``class_below``, otherwise the other class.

    A threshold of +inf or -inf makes the classifier constant (no split).
    ``projection`` may be None for a constant classifier, or while only the
    threshold and orientation are known (``train_tarp`` on bare values).
    ``train_gini`` is the weighted children Gini on the training data.
    """

    projection: Optional[np.ndarray]
    threshold: float
    class_below: int
    train_gini: Optional[float] = None

    def __post_init__(self):
        if self.projection is not None:
            r = np.asarray(self.projection, dtype=float)
            r.setflags(write=False)
            object.__setattr__(self, "projection", r)
        if self.class_below not in (0, 1):
            raise ValueError(f"class_below must be 0 or 1, got {self.class_below}")
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "class_below", int(self.class_below))

    @property
    def is_split(self):
        return math.isfinite(self.threshold)

    @property
    def class_above(self):
        return 1 - self.class_below

    def route(self, X) -> np.ndarray:
        """Boolean mask, True where a sample goes below the threshold."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if not self.is_split:
            if self.projection is not None and X.shape[1] != len(self.projection):
                raise DimensionError(
                    f"feature dimension {X.shape[1]} does not match "
                    f"projection length {len(self.projection)}")
            return np.full(X.shape[0], self.threshold > 0)
        if self.projection is None:
            raise ValueError("classifier has a finite threshold but no projection vector")
        return project(X, self.projection) < self.threshold

    def predict(self, X) -> np.ndarray:
        return np.where(self.route(X), self.class_below, self.class_above)

    def with_threshold(self, threshold):
        return TarpClassifier(self.projection, threshold, self.class_below, self.train_gini)

    def to_dict(self):
        t = self.threshold
        return {
            "projection": None if self.projection is None else self.projection.tolist(),
            "threshold": t if math.isfinite(t) else ("+inf" if t > 0 else "-inf"),
            "class_below": self.class_below,
        }

    @classmethod
    def from_dict(cls, d):
        t = d["threshold"]
        if isinstance(t, str):
            t = {"+inf": math.inf, "-inf": -math.inf}[t]
        return cls(d["projection"], t, d["class_below"])


def constant_classifier(label, projection=None) -> TarpClassifier:
    """No-split classifier that sends everything below (+inf) to ``label``."""
    return TarpClassifier(projection, math.inf, label)


def train_tarp(values, labels, projection=None) -> TarpClassifier:
    """Fit threshold and orientation to already-projected training values."""
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    n1 = int(labels.sum())
    n0 = len(labels) - n1
    majority = 1 if n1 > n0 else 0
    if n0 == 0 or n1 == 0:
        return constant_classifier(majority, projection)
    fit = fit_gaussians_1d(values, labels)
    t = bayes_threshold_1d(fit)
    if t is None:
        clf = constant_classifier(majority, projection)
        return TarpClassifier(projection, clf.threshold, clf.class_below,
                              gini_impurity((n0, n1)))
    class_below = 1 if fit.mu_b < fit.mu_a else 0
    gini = weighted_children_gini(labels, values < t)
    return TarpClassifier(projection, t, class_below, gini)


def select_best_tarp(candidates: Sequence[TarpClassifier], X, labels) -> TarpClassifier:
    """Candidate with the lowest weighted children Gini on (X, labels).

    Ties go to the lowest index. No-split candidates are considered only
    when every candidate is a no-split.
    """
    if len(candidates) == 0:
        raise ValueError("no TARP candidates to select from")
    if len(candidates) == 1:
        return candidates[0]
    eligible = [i for i, c in enumerate(candidates) if c.is_split]
    if not eligible:
        return candidates[0]
    scores = [weighted_children_gini(labels, candidates[i].route(X)) for i in eligible]
    return candidates[eligible[int(np.argmin(scores))]]


def classify(c: TarpClassifier, x) -> int:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError("classify expects a single feature vector")
    return int(c.predict(x)[0])


def error_rate(c: TarpClassifier, X, labels) -> float:
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("error rate of an empty set is undefined")
    return float(np.mean(c.predict(X) != labels))
