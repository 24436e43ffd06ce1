"""Trainable classifiers behind one prediction interface.

Three model families share the ``predict`` entry point: a majority-class
baseline, linear SVMs trained by deterministic epoch-based subgradient
descent on the L2-regularized hinge loss (one-vs-rest for any class count),
and a Random Forest of CART trees grown on Gini impurity. An external-scores
loader lets predictions produced elsewhere flow through the same evaluation
path without executing a model here.

Determinism contract: training is a pure function of (data order,
hyperparameters, seed). The SVM derives one RNG per class from
``SeedSequence([seed, class_index])``; the forest seeds tree ``i`` with
``seed + i``, so parallel tree training would reproduce the sequential
result exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CorpusFormatError, DataError, ModelError
from .features import DocumentVector, vectors_to_csr

_SEED_MASK = 0xFFFF_FFFF_FFFF_FFFF
# splits must beat the parent impurity by more than float noise
_SPLIT_EPSILON = 1e-12
# refold the SVM scale factor before it degrades float precision
_SCALE_FLOOR = 1e-9


@dataclass(frozen=True)
class LabelMap:
    """Ordered class names; the index order is fixed at training time."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise DataError("a label map needs at least one class")
        if len(set(self.names)) != len(self.names):
            raise DataError(f"duplicate class names in label map: {self.names}")
        if any(not n for n in self.names):
            raise DataError("class names must be non-empty")

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown class name {name!r}; expected one of {self.names}") from None


def _argmax_lowest(scores: np.ndarray) -> int:
    # np.argmax already returns the first maximum, which is the tie rule
    return int(np.argmax(scores))


@dataclass(frozen=True)
class Prediction:
    """A predicted class name plus the per-class scores that chose it."""

    label: str
    scores: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if not all(math.isfinite(s) for s in self.scores):
            raise ModelError(f"non-finite prediction scores: {self.scores}")

    @classmethod
    def from_scores(cls, scores: Sequence[float], labels: LabelMap) -> "Prediction":
        arr = np.asarray(scores, dtype=np.float64)
        if arr.shape != (len(labels),):
            raise ModelError(f"expected {len(labels)} scores, got shape {arr.shape}")
        return cls(label=labels.names[_argmax_lowest(arr)], scores=tuple(arr))


def _extract_class_indices(train, labels: LabelMap) -> np.ndarray:
    items = list(train)
    if not items:
        raise DataError("training set is empty")
    out = []
    for item in items:
        idx = item[1] if isinstance(item, tuple) else item
        idx = int(idx)
        if not 0 <= idx < len(labels):
            raise DataError(f"class index {idx} out of range for {len(labels)} classes")
        out.append(idx)
    return np.asarray(out, dtype=np.int64)


@dataclass(frozen=True)
class MajorityModel:
    """Predicts the most frequent training class for every input."""

    kind = "majority"

    labels: LabelMap
    class_counts: tuple[int, ...]
    majority_class: int

    def __post_init__(self):
        object.__setattr__(self, "class_counts", tuple(int(c) for c in self.class_counts))
        if len(self.class_counts) != len(self.labels):
            raise ModelError("class_counts length must match the label map")
        if any(c < 0 for c in self.class_counts):
            raise ModelError("class counts must be non-negative")
        expected = _argmax_lowest(np.asarray(self.class_counts))
        if self.majority_class != expected:
            raise ModelError(
                f"majority_class {self.majority_class} disagrees with counts (argmax {expected})"
            )


def train_majority(train, labels: LabelMap) -> MajorityModel:
    """Count classes; ties go to the lowest index.

    ``train`` may be a sequence of class indices or of (vector, index) pairs.
    """
    y = _extract_class_indices(train, labels)
    counts = np.bincount(y, minlength=len(labels))
    return MajorityModel(
        labels=labels,
        class_counts=tuple(int(c) for c in counts),
        majority_class=_argmax_lowest(counts),
    )


@dataclass(frozen=True)
class SvmHyperparams:
    """Pinned defaults: lambda 1e-4, 10 epochs, no class reweighting."""

    lambda_reg: float = 1e-4
    epochs: int = 10
    seed: int = 0
    balance_classes: bool = False

    def __post_init__(self):
        if not (self.lambda_reg > 0 and math.isfinite(self.lambda_reg)):
            raise DataError(f"lambda_reg must be positive and finite, got {self.lambda_reg}")
        if self.epochs < 1:
            raise DataError(f"epochs must be >= 1, got {self.epochs}")


class LinearSvmModel:
    """One weight vector and bias per class; prediction score = margin."""

    kind = "svm"

    def __init__(
        self,
        labels: LabelMap,
        weights: np.ndarray,
        biases: np.ndarray,
        hyperparams: SvmHyperparams,
        objective_history: np.ndarray,
    ):
        self.labels = labels
        self.weights = np.asarray(weights, dtype=np.float64)
        self.biases = np.asarray(biases, dtype=np.float64)
        self.hyperparams = hyperparams
        self.objective_history = np.asarray(objective_history, dtype=np.float64)
        k = len(labels)
        if self.weights.ndim != 2 or self.weights.shape[0] != k:
            raise ModelError(f"weights must be ({k}, V), got {self.weights.shape}")
        if self.biases.shape != (k,):
            raise ModelError(f"biases must be ({k},), got {self.biases.shape}")
        if self.objective_history.ndim != 2 or self.objective_history.shape[0] != k:
            raise ModelError("objective history must have one row per class")
        for name, arr in (("weights", self.weights), ("biases", self.biases)):
            if not np.all(np.isfinite(arr)):
                raise ModelError(f"non-finite SVM {name}")

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def margins(self, vector: DocumentVector) -> np.ndarray:
        _check_dimension(vector, self.n_features)
        out = self.biases.copy()
        if len(vector):
            out += self.weights[:, vector.indices] @ vector.weights
        return out


def _class_weights(y: np.ndarray, n_classes: int, balance: bool) -> np.ndarray:
    if not balance:
        return np.ones(n_classes)
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    weights = np.ones(n_classes)
    present = counts > 0
    weights[present] = len(y) / (n_classes * counts[present])
    return weights


def _prepare_training(train, labels: LabelMap, n_features: int | None):
    pairs = list(train)
    if not pairs:
        raise DataError("training set is empty")
    vectors: list[DocumentVector] = []
    y = []
    for vec, idx in pairs:
        if not isinstance(vec, DocumentVector):
            raise DataError("training items must be (DocumentVector, class index) pairs")
        idx = int(idx)
        if not 0 <= idx < len(labels):
            raise DataError(f"class index {idx} out of range for {len(labels)} classes")
        vectors.append(vec)
        y.append(idx)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise DataError("training data contains a single class; need at least two")
    if n_features is None:
        n_features = 1 + max((int(v.indices[-1]) for v in vectors if len(v)), default=-1)
    else:
        for v in vectors:
            _check_dimension(v, n_features)
    return vectors, y, int(n_features)


def train_svm(
    train: Iterable[tuple[DocumentVector, int]],
    labels: LabelMap,
    hp: SvmHyperparams = SvmHyperparams(),
    n_features: int | None = None,
) -> LinearSvmModel:
    """One-vs-rest subgradient descent on the regularized hinge loss.

    Step size eta_t = 1/(lambda*t) over a per-epoch shuffled pass; the bias
    is left unregularized. The full-objective value at the end of each epoch
    is recorded per class in the returned model.
    """
    vectors, y, n_feat = _prepare_training(train, labels, n_features)
    n = len(vectors)
    k = len(labels)
    lam = hp.lambda_reg
    matrix = vectors_to_csr(vectors, n_feat)
    class_w = _class_weights(y, k, hp.balance_classes)
    example_w = class_w[y]
    weights = np.zeros((k, n_feat))
    biases = np.zeros(k)
    history = np.zeros((k, hp.epochs))
    rows = [(vec.indices, vec.weights) for vec in vectors]

    for c in range(k):
        signs = np.where(y == c, 1.0, -1.0)
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([hp.seed & _SEED_MASK, c]))
        )
        v = np.zeros(n_feat)
        scale = 1.0
        bias = 0.0
        t = 0
        for epoch in range(hp.epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (lam * t)
                decay = 1.0 - eta * lam
                if decay == 0.0:
                    scale = 1.0
                    v.fill(0.0)
                else:
                    scale *= decay
                    if scale < _SCALE_FLOOR:
                        v *= scale
                        scale = 1.0
                idx, wts = rows[i]
                sign = signs[i]
                margin = sign * (scale * float(v[idx] @ wts) + bias)
                if margin < 1.0:
                    step = eta * example_w[i] * sign
                    v[idx] += (step / scale) * wts
                    bias += step
            w = scale * v
            raw = matrix @ w + bias
            hinge = np.maximum(0.0, 1.0 - signs * raw)
            history[c, epoch] = 0.5 * lam * float(w @ w) + float(np.mean(example_w * hinge))
        weights[c] = scale * v
        biases[c] = bias
    return LinearSvmModel(labels, weights, biases, hp, history)


@dataclass(frozen=True)
class ForestHyperparams:
    """Pinned defaults: 100 trees, unlimited depth, sqrt feature sampling."""

    n_trees: int = 100
    max_depth: int | None = None
    max_features: int | str | None = "sqrt"
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise DataError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth is not None and self.max_depth < 1:
            raise DataError(f"max_depth must be >= 1 or None, got {self.max_depth}")
        mf = self.max_features
        if isinstance(mf, str):
            if mf != "sqrt":
                raise DataError(f"max_features string form must be 'sqrt', got {mf!r}")
        elif mf is not None and mf < 1:
            raise DataError(f"max_features must be >= 1, 'sqrt', or None, got {mf}")


def _resolve_max_features(max_features: int | str | None, n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return min(n_features, math.isqrt(n_features - 1) + 1) if n_features else 0
    return min(n_features, int(max_features))


class DecisionTree:
    """Flat-array CART tree: feature -1 marks a leaf, counts hold class histograms."""

    def __init__(self, feature, threshold, left, right, counts):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.float64)
        n = len(self.feature)
        shapes = (self.threshold.shape, self.left.shape, self.right.shape)
        if any(s != (n,) for s in shapes) or self.counts.shape[0] != n:
            raise ModelError("tree arrays must share one entry per node")
        leaves = self.feature == -1
        if np.any((self.left[leaves] != -1) | (self.right[leaves] != -1)):
            raise ModelError("leaf nodes must have no children")
        internal = ~leaves
        if np.any((self.left[internal] < 0) | (self.right[internal] < 0)):
            raise ModelError("internal nodes must have two children")
        if np.any(self.counts < 0):
            raise ModelError("node histograms must be non-negative")
        if np.any(self.counts[leaves].sum(axis=1) <= 0):
            raise ModelError("leaf histograms must not be all zero")

    def __len__(self) -> int:
        return len(self.feature)

    def leaf_distribution(self, vector: DocumentVector) -> np.ndarray:
        node = 0
        while self.feature[node] != -1:
            if _vector_value(vector, int(self.feature[node])) <= self.threshold[node]:
                node = int(self.left[node])
            else:
                node = int(self.right[node])
        hist = self.counts[node]
        return hist / hist.sum()


def _vector_value(vector: DocumentVector, feature: int) -> float:
    pos = int(np.searchsorted(vector.indices, feature))
    if pos < len(vector.indices) and int(vector.indices[pos]) == feature:
        return float(vector.weights[pos])
    return 0.0


def _find_split(matrix, rows, y_node, w_node, hist, total, n_candidates, rng):
    n_features = matrix.shape[1]
    n_classes = len(hist)
    candidates = rng.choice(n_features, size=n_candidates, replace=False)
    block = matrix[rows][:, candidates].toarray()
    parent = 1.0 - float(hist @ hist) / (total * total)
    best = None
    for j in range(n_candidates):
        column = block[:, j]
        order = np.argsort(column, kind="stable")
        values = column[order]
        if values[0] == values[-1]:
            continue
        onehot = np.zeros((len(values), n_classes))
        onehot[np.arange(len(values)), y_node[order]] = w_node[order]
        prefix = np.cumsum(onehot, axis=0)
        left_w = prefix.sum(axis=1)
        right_w = total - left_w
        left_sq = np.einsum("ij,ij->i", prefix, prefix)
        suffix = hist - prefix
        right_sq = np.einsum("ij,ij->i", suffix, suffix)
        child = (
            (left_w - left_sq / np.where(left_w > 0, left_w, 1.0))
            + (right_w - right_sq / np.where(right_w > 0, right_w, 1.0))
        ) / total
        boundaries = np.flatnonzero(values[:-1] != values[1:])
        if not len(boundaries):
            continue
        at = boundaries[int(np.argmin(child[boundaries]))]
        impurity = float(child[at])
        if parent - impurity <= _SPLIT_EPSILON:
            continue
        if best is None or impurity < best[0]:
            threshold = (float(values[at]) + float(values[at + 1])) / 2.0
            mask = column <= threshold
            # midpoint rounding can land on a value and empty one side
            if mask.all() or not mask.any():
                continue
            best = (impurity, int(candidates[j]), threshold, mask)
    if best is None:
        return None
    return best[1], best[2], best[3]


def _grow_tree(matrix, y, rows, row_weights, n_classes, max_depth, n_candidates, rng):
    feature, threshold, left, right, counts = [], [], [], [], []
    # (rows, weights, depth, parent id, is_right_child); preorder growth
    stack = [(rows, row_weights, 0, -1, False)]
    while stack:
        node_rows, node_w, depth, parent, is_right = stack.pop()
        node_id = len(feature)
        if parent >= 0:
            (right if is_right else left)[parent] = node_id
        y_node = y[node_rows]
        hist = np.zeros(n_classes)
        np.add.at(hist, y_node, node_w)
        total = float(hist.sum())
        split = None
        depth_ok = max_depth is None or depth < max_depth
        if depth_ok and n_candidates > 0 and int(np.count_nonzero(hist)) > 1:
            split = _find_split(matrix, node_rows, y_node, node_w, hist, total, n_candidates, rng)
        feature.append(-1 if split is None else split[0])
        threshold.append(0.0 if split is None else split[1])
        left.append(-1)
        right.append(-1)
        counts.append(hist)
        if split is not None:
            mask = split[2]
            stack.append((node_rows[~mask], node_w[~mask], depth + 1, node_id, True))
            stack.append((node_rows[mask], node_w[mask], depth + 1, node_id, False))
    return DecisionTree(feature, threshold, left, right, np.vstack(counts))


class ForestModel:
    """Bootstrap-aggregated CART trees; scores are mean leaf class shares."""

    kind = "forest"

    def __init__(
        self,
        labels: LabelMap,
        trees: Sequence[DecisionTree],
        hyperparams: ForestHyperparams,
        n_features: int,
    ):
        self.labels = labels
        self.trees = list(trees)
        self.hyperparams = hyperparams
        self.n_features = int(n_features)
        if not self.trees:
            raise ModelError("a forest needs at least one tree")
        for tree in self.trees:
            if tree.counts.shape[1] != len(labels):
                raise ModelError("tree histogram width must match the label map")
            used = tree.feature[tree.feature >= 0]
            if len(used) and int(used.max()) >= self.n_features:
                raise ModelError("tree references a feature beyond n_features")

    def scores(self, vector: DocumentVector) -> np.ndarray:
        _check_dimension(vector, self.n_features)
        acc = np.zeros(len(self.labels))
        for tree in self.trees:
            acc += tree.leaf_distribution(vector)
        return acc / len(self.trees)


def train_forest(
    train: Iterable[tuple[DocumentVector, int]],
    labels: LabelMap,
    hp: ForestHyperparams = ForestHyperparams(),
    n_features: int | None = None,
) -> ForestModel:
    """Grow hp.n_trees CART trees; tree i is seeded with hp.seed + i."""
    vectors, y, n_feat = _prepare_training(train, labels, n_features)
    n = len(vectors)
    matrix = vectors_to_csr(vectors, n_feat).tocsr()
    n_candidates = _resolve_max_features(hp.max_features, n_feat)
    trees = []
    for i in range(hp.n_trees):
        rng = np.random.default_rng(hp.seed + i)
        if hp.bootstrap:
            sampled = rng.integers(0, n, n)
            multiplicity = np.bincount(sampled, minlength=n)
            rows = np.flatnonzero(multiplicity)
            row_weights = multiplicity[rows].astype(np.float64)
        else:
            rows = np.arange(n)
            row_weights = np.ones(n)
        trees.append(
            _grow_tree(matrix, y, rows, row_weights, len(labels), hp.max_depth, n_candidates, rng)
        )
    return ForestModel(labels, trees, hp, n_feat)


def _check_dimension(vector: DocumentVector, n_features: int) -> None:
    if len(vector) and int(vector.indices[-1]) >= n_features:
        raise ModelError(
            f"vector index {int(vector.indices[-1])} out of range for a "
            f"{n_features}-feature model"
        )


def predict(model, vector: DocumentVector) -> Prediction:
    """Uniform prediction across model families; ties go to the lowest index."""
    if isinstance(model, MajorityModel):
        scores = np.zeros(len(model.labels))
        scores[model.majority_class] = 1.0
        return Prediction.from_scores(scores, model.labels)
    if isinstance(model, LinearSvmModel):
        return Prediction.from_scores(model.margins(vector), model.labels)
    if isinstance(model, ForestModel):
        return Prediction.from_scores(model.scores(vector), model.labels)
    raise ModelError(f"unknown model type: {type(model).__name__}")


def load_external_scores(path, labels: LabelMap, expected_ids: Sequence[str]) -> list[Prediction]:
    """Read a per-document score table produced outside this package.

    Format: TSV, header ``id<TAB>score_<class1><TAB>...`` with the score
    columns in label-map order, then one row per evaluation record in corpus
    order. Any mismatch in header, ids, row count, or score syntax raises an
    error naming the first offending line.
    """
    path = str(path)
    expected_header = ["id"] + [f"score_{name}" for name in labels.names]
    predictions: list[Prediction] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        lines = handle.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorpusFormatError("missing header row", path=path)
    header = lines[0].split("\t")
    if header != expected_header:
        raise CorpusFormatError(
            f"header {header!r} does not match expected {expected_header!r}", path=path, line=1
        )
    n_expected = len(expected_ids)
    if len(lines) - 1 != n_expected:
        raise CorpusFormatError(
            f"expected {n_expected} score rows, found {len(lines) - 1}", path=path
        )
    for row_idx, raw in enumerate(lines[1:]):
        line_no = row_idx + 2
        cells = raw.split("\t")
        if len(cells) != len(expected_header):
            raise CorpusFormatError(
                f"expected {len(expected_header)} columns, found {len(cells)}",
                path=path,
                line=line_no,
            )
        if cells[0] != expected_ids[row_idx]:
            raise CorpusFormatError(
                f"id {cells[0]!r} does not match corpus id {expected_ids[row_idx]!r}",
                path=path,
                line=line_no,
            )
        try:
            scores = [float(cell) for cell in cells[1:]]
        except ValueError as exc:
            raise CorpusFormatError(f"bad score value: {exc}", path=path, line=line_no) from None
        if not all(math.isfinite(s) for s in scores):
            raise CorpusFormatError("scores must be finite", path=path, line=line_no)
        predictions.append(Prediction.from_scores(scores, labels))
    return predictions
