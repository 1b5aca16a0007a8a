"""k-level binary decision trees with an n-TARP at every internal node.

Every internal node draws ``n`` fresh projections, keeps the one with the
lowest weighted children Gini on its training data, and then checks the
split on its validation data. A split that makes validation error worse is
replaced by a constant router (threshold +/-inf) so the tree still reaches
depth ``k``, only without partitioning the data at that node.
"""

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import DataPartition, LabeledDataset
from .errors import DataError, DimensionError
from .tarp import (
    TarpClassifier,
    constant_classifier,
    sample_projections,
    select_best_tarp,
    train_tarp,
)

MIN_CLASS_SAMPLES = 2


@dataclass(eq=False)
class TarpNode:
    decision: Optional[TarpClassifier]
    majority_label: int
    train_count: int
    val_count: int
    children: Optional[tuple] = None
    # diagnostics
    gini: Optional[float] = None
    fallback: bool = False
    forced_no_split: bool = False
    prior_val_error: Optional[float] = None
    post_val_error: Optional[float] = None

    @property
    def is_leaf(self):
        return self.children is None

    def to_dict(self, diagnostics=False):
        d = {
            "majority_label": self.majority_label,
            "train_count": self.train_count,
            "val_count": self.val_count,
            "decision": None if self.decision is None else self.decision.to_dict(),
            "children": None if self.children is None
            else [c.to_dict(diagnostics) for c in self.children],
        }
        if diagnostics:
            d["diagnostics"] = {
                "gini": self.gini,
                "fallback": self.fallback,
                "forced_no_split": self.forced_no_split,
                "prior_val_error": self.prior_val_error,
                "post_val_error": self.post_val_error,
            }
        return d

    @classmethod
    def from_dict(cls, d):
        diag = d.get("diagnostics") or {}
        return cls(
            decision=None if d["decision"] is None else TarpClassifier.from_dict(d["decision"]),
            majority_label=d["majority_label"],
            train_count=d["train_count"],
            val_count=d["val_count"],
            children=None if d["children"] is None
            else tuple(cls.from_dict(c) for c in d["children"]),
            **diag,
        )


@dataclass(eq=False)
class TarpTree:
    k: int
    n: int
    root: TarpNode
    training_time: float = 0.0
    testing_time: Optional[float] = None

    def leaves(self):
        """Depth-k nodes, left to right (2**k of them)."""
        level = [self.root]
        for _ in range(self.k):
            level = [c for node in level for c in node.children]
        return level

    def nodes_at(self, depth):
        level = [self.root]
        for _ in range(depth):
            level = [c for node in level for c in node.children]
        return level

    def _walk(self, X, idx, node, depth, limit, out_label, out_leaf, leaf_id):
        if node.is_leaf or depth == limit:
            out_label[idx] = node.majority_label
            out_leaf[idx] = leaf_id
            return
        below = node.decision.route(X[idx]) if len(idx) else np.zeros(0, bool)
        left, right = node.children
        self._walk(X, idx[below], left, depth + 1, limit, out_label, out_leaf, 2 * leaf_id)
        self._walk(X, idx[~below], right, depth + 1, limit, out_label, out_leaf,
                   2 * leaf_id + 1)

    def _route(self, X, depth):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DimensionError(f"expected a 2-D feature matrix, got shape {X.shape}")
        limit = self.k if depth is None else depth
        if not 0 <= limit <= self.k:
            raise ValueError(f"depth must be in [0, {self.k}], got {depth}")
        labels = np.empty(X.shape[0], dtype=np.int64)
        leaf = np.empty(X.shape[0], dtype=np.int64)
        self._walk(X, np.arange(X.shape[0]), self.root, 0, limit, labels, leaf, 0)
        return labels, leaf

    def predict(self, X, depth=None) -> np.ndarray:
        """Labels from the tree, optionally truncated to its first ``depth`` levels."""
        return self._route(X, depth)[0]

    def apply(self, X, depth=None) -> np.ndarray:
        """Index (0 .. 2**depth - 1, left to right) of the node each sample lands in."""
        return self._route(X, depth)[1]

    def to_dict(self, diagnostics=False):
        return {"k": self.k, "n": self.n, "training_time_s": self.training_time,
                "testing_time_s": self.testing_time,
                "root": self.root.to_dict(diagnostics)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["k"], d["n"], TarpNode.from_dict(d["root"]),
                   d.get("training_time_s", 0.0), d.get("testing_time_s"))


def _majority(labels, tie):
    n1 = int(labels.sum())
    n0 = len(labels) - n1
    if n1 > n0:
        return 1
    if n0 > n1:
        return 0
    return tie


def _no_split(majority, projection=None):
    return constant_classifier(majority, projection)


def _fallback(decision: TarpClassifier, majority):
    """Constant router sending everything to the side labelled ``majority``."""
    t = math.inf if decision.class_below == majority else -math.inf
    return decision.with_threshold(t)


class _Grower:
    def __init__(self, X, y, n, k, rng):
        self.X, self.y, self.n, self.k, self.rng = X, y, n, k, rng

    def grow(self, tr, va, depth, parent_majority):
        y_tr = self.y[tr]
        majority = _majority(y_tr, parent_majority)
        node = TarpNode(None, majority, len(tr), len(va))
        if depth == self.k:
            return node

        n1 = int(y_tr.sum())
        n0 = len(tr) - n1
        if min(n0, n1) < MIN_CLASS_SAMPLES:
            node.decision = _no_split(majority)
            node.forced_no_split = True
        else:
            node.decision = self._split(node, tr, va, y_tr, majority)

        X = self.X
        below_tr = node.decision.route(X[tr]) if len(tr) else np.zeros(0, bool)
        below_va = node.decision.route(X[va]) if len(va) else np.zeros(0, bool)
        node.children = (
            self.grow(tr[below_tr], va[below_va], depth + 1, majority),
            self.grow(tr[~below_tr], va[~below_va], depth + 1, majority),
        )
        return node

    def _split(self, node, tr, va, y_tr, majority):
        X_tr = self.X[tr]
        R = sample_projections(self.X.shape[1], self.n, self.rng)
        P = X_tr @ R.T
        candidates = [train_tarp(P[:, i], y_tr, R[i]) for i in range(self.n)]
        best = select_best_tarp(candidates, X_tr, y_tr)
        node.gini = best.train_gini
        if not best.is_split:
            return _fallback(best, majority)
        if len(va) == 0:
            return best

        below = best.route(X_tr)
        maj_below = _majority(y_tr[below], majority)
        maj_above = _majority(y_tr[~below], majority)
        y_va = self.y[va]
        prior = float(np.mean(y_va != majority))
        pred = np.where(best.route(self.X[va]), maj_below, maj_above)
        post = float(np.mean(pred != y_va))
        node.prior_val_error, node.post_val_error = prior, post
        if post > prior:
            node.fallback = True
            return _fallback(best, majority)
        return best


def grow_tree(dataset: LabeledDataset, split: DataPartition, n, k,
              rng: np.random.Generator) -> TarpTree:
    """Grow a depth-``k`` tree on ``split.train_idx``, validating on ``split.val_idx``.

    Projections are drawn from ``rng`` node by node in depth-first,
    below-side-first order; nodes without at least two training samples of
    each class draw nothing.
    """
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be >= 1, got n={n}, k={k}")
    if len(split.train_idx) == 0:
        raise DataError("empty training set")
    grower = _Grower(dataset.features, dataset.labels, int(n), int(k), rng)
    start = time.perf_counter()
    root = grower.grow(np.asarray(split.train_idx), np.asarray(split.val_idx), 0, 0)
    elapsed = time.perf_counter() - start
    return TarpTree(int(k), int(n), root, training_time=elapsed)


def evaluate_tree(tree: TarpTree, X, labels) -> float:
    """Test error of the tree; also stores the wall-clock time in ``tree.testing_time``."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    start = time.perf_counter()
    pred = tree.predict(X)
    err = float(np.mean(pred != labels))
    tree.testing_time = time.perf_counter() - start
    return err
