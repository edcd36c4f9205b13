"""Multiclass alternating decision trees grown by LogitBoost, a greedy
information-gain tree for comparison, stratified cross-validation and
confusion-matrix metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

MODEL_FORMAT = "netselect-adt"
TREE_FORMAT = "netselect-greedy-tree"
FORMAT_VERSION = 1

Z_CLIP = 4.0
W_FLOOR = 1e-8
_TIE = 1e-12


class TrainingError(ValueError):
    pass


class ModelFileError(ValueError):
    pass


@dataclass
class LabeledDataset:
    feature_names: tuple[str, ...]
    graph_ids: list[str]
    labels: list[str]
    X: np.ndarray
    class_list: tuple[str, ...] = ()

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64).reshape(len(self.labels), len(self.feature_names))
        if len(self.graph_ids) != len(self.labels):
            raise ValueError("graph_ids and labels differ in length")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("feature matrix contains missing or non-finite values")
        if not self.class_list:
            self.class_list = tuple(sorted(set(self.labels)))

    def __len__(self):
        return len(self.labels)

    @property
    def y(self) -> np.ndarray:
        index = {c: i for i, c in enumerate(self.class_list)}
        return np.array([index[c] for c in self.labels], dtype=np.int64)

    def subset(self, rows) -> LabeledDataset:
        rows = np.asarray(rows, dtype=np.int64)
        return LabeledDataset(self.feature_names, [self.graph_ids[i] for i in rows],
                              [self.labels[i] for i in rows], self.X[rows], self.class_list)

    def select(self, names: Sequence[str]) -> LabeledDataset:
        cols = [self.feature_names.index(c) for c in names]
        return LabeledDataset(tuple(names), list(self.graph_ids), list(self.labels),
                              self.X[:, cols], self.class_list)

    def drop(self, names: Sequence[str]) -> LabeledDataset:
        return self.select([c for c in self.feature_names if c not in set(names)])


# -- alternating decision tree ----------------------------------------------

@dataclass(frozen=True)
class Splitter:
    parent: int        # prediction node the test hangs from
    feature: int
    threshold: float
    below: int         # prediction node reached when x[feature] < threshold
    above: int


@dataclass(frozen=True)
class AdtModel:
    class_list: tuple[str, ...]
    feature_names: tuple[str, ...]
    scores: tuple[tuple[float, ...], ...]     # per prediction node; node 0 is the root
    splitters: tuple[Splitter, ...] = ()
    iterations: int = 0

    def reach(self, X: np.ndarray) -> np.ndarray:
        X = _check_arity(X, len(self.feature_names))
        r = np.zeros((len(X), len(self.scores)), dtype=bool)
        r[:, 0] = True
        for s in self.splitters:
            low = X[:, s.feature] < s.threshold
            r[:, s.below] = r[:, s.parent] & low
            r[:, s.above] = r[:, s.parent] & ~low
        return r

    def decision(self, X) -> np.ndarray:
        """Summed class scores, shape (rows, classes)."""
        return self.reach(X).astype(np.float64) @ np.array(self.scores)

    def predict_proba(self, X) -> np.ndarray:
        return _softmax(self.decision(X))


def _check_arity(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != d:
        raise ValueError(f"expected {d} features, got {X.shape[1]}")
    return X


def _softmax(F: np.ndarray) -> np.ndarray:
    e = np.exp(F - F.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def logistic_loss(F: np.ndarray, y: np.ndarray) -> float:
    P = _softmax(F)
    return float(-np.log(np.maximum(P[np.arange(len(y)), y], 1e-300)).sum())


def _working(Y: np.ndarray, F: np.ndarray):
    P = _softmax(F)
    w = np.maximum(P * (1.0 - P), W_FLOOR)
    z = np.clip((Y - P) / w, -Z_CLIP, Z_CLIP)
    return z, w


def _node_scores(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    J = z.shape[1]
    c = (w * z).sum(axis=0) / w.sum(axis=0)
    return (J - 1) / J * (c - c.mean())


def _best_split_for(x: np.ndarray, z: np.ndarray, w: np.ndarray):
    """Best midpoint threshold for one feature within one node.

    Returns (gain, threshold) or None when the feature is constant here.
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cut = np.nonzero(xs[1:] > xs[:-1])[0]
    if len(cut) == 0:
        return None
    wz = (w * z)[order]
    ww = w[order]
    cwz = np.cumsum(wz, axis=0)[cut]
    cw = np.cumsum(ww, axis=0)[cut]
    twz, tw = wz.sum(axis=0), ww.sum(axis=0)
    gain = (cwz ** 2 / cw).sum(axis=1) + ((twz - cwz) ** 2 / (tw - cw)).sum(axis=1)
    i = int(np.argmax(gain))
    # argmax returns the first maximum, i.e. the lowest threshold
    return float(gain[i]), float(0.5 * (xs[cut[i]] + xs[cut[i] + 1]))


def train_ladtree(ds: LabeledDataset, iterations: int = 10, seed=0) -> AdtModel:
    """Grow a multiclass ADT with ``iterations`` LogitBoost rounds.

    Each round computes LogitBoost working responses and weights per class,
    then adds the splitter (any existing prediction node, any feature,
    midpoint thresholds) that maximizes the weighted least-squares fit of
    the responses.  Ties go to the lowest feature index, then the lowest
    threshold, then the shallowest prediction node.  If a Newton step would
    raise the training log-loss, its scores are halved until it does not.
    Training is deterministic; ``seed`` is accepted for interface symmetry.
    """
    del seed
    if len(ds) < 10:
        raise TrainingError("need at least 10 rows to train")
    y = ds.y
    J = len(ds.class_list)
    if len(set(y.tolist())) < 2:
        raise TrainingError("need at least 2 classes to train")
    X = ds.X
    if np.all(X == X[0]):
        raise TrainingError("all features are constant")
    Y = np.eye(J)[y]

    F = np.zeros((len(y), J))
    z, w = _working(Y, F)
    root = _node_scores(z, w)
    F += root
    scores = [root]
    reach = [np.ones(len(y), dtype=bool)]
    depth = [0]
    splitters: list[Splitter] = []

    for _ in range(iterations):
        z, w = _working(Y, F)
        best = None     # (gain, key, node, feature, threshold)
        for node in sorted(range(len(reach)), key=lambda k: (depth[k], k)):
            rows = reach[node]
            if rows.sum() < 2:
                continue
            for f in range(X.shape[1]):
                found = _best_split_for(X[rows, f], z[rows], w[rows])
                if found is None:
                    continue
                gain, thr = found
                key = (f, thr, depth[node], node)
                if best is None or gain > best[0] * (1 + _TIE) + _TIE:
                    best = (gain, key, node, f, thr)
                elif abs(gain - best[0]) <= _TIE * (1 + abs(best[0])) and key < best[1]:
                    best = (gain, key, node, f, thr)
        if best is None:
            break
        _, _, node, f, thr = best
        low = reach[node] & (X[:, f] < thr)
        high = reach[node] & ~(X[:, f] < thr)
        s_low = _node_scores(z[low], w[low])
        s_high = _node_scores(z[high], w[high])
        before = logistic_loss(F, y)
        step = 1.0
        for _ in range(30):
            trial = F.copy()
            trial[low] += step * s_low
            trial[high] += step * s_high
            if logistic_loss(trial, y) <= before:
                break
            step *= 0.5
        else:
            step = 0.0
        s_low, s_high = step * s_low, step * s_high
        F[low] += s_low
        F[high] += s_high
        ids = len(scores), len(scores) + 1
        scores.extend([s_low, s_high])
        reach.extend([low, high])
        depth.extend([depth[node] + 1] * 2)
        splitters.append(Splitter(node, f, thr, *ids))

    return AdtModel(
        class_list=tuple(ds.class_list),
        feature_names=tuple(ds.feature_names),
        scores=tuple(tuple(float(v) for v in s) for s in scores),
        splitters=tuple(splitters),
        iterations=len(splitters),
    )


# -- greedy information-gain tree -------------------------------------------

@dataclass(frozen=True)
class TreeNode:
    counts: tuple[int, ...]
    feature: int = -1
    threshold: float = 0.0
    below: TreeNode | None = None
    above: TreeNode | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class GreedyTree:
    class_list: tuple[str, ...]
    feature_names: tuple[str, ...]
    root: TreeNode
    max_depth: int = 8
    min_leaf: int = 2

    def _leaf(self, x) -> TreeNode:
        node = self.root
        while not node.is_leaf:
            node = node.below if x[node.feature] < node.threshold else node.above
        return node

    def predict_proba(self, X) -> np.ndarray:
        X = _check_arity(X, len(self.feature_names))
        out = np.array([self._leaf(x).counts for x in X], dtype=np.float64)
        return out / out.sum(axis=1, keepdims=True)

    def decision(self, X) -> np.ndarray:
        return self.predict_proba(X)


def _entropy(counts: np.ndarray) -> np.ndarray:
    total = counts.sum(axis=-1, keepdims=True)
    p = np.divide(counts, total, out=np.zeros_like(counts, dtype=np.float64), where=total > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log2(p), 0.0).sum(axis=-1)
    return h


def train_greedy_tree(ds: LabeledDataset, max_depth: int = 8, min_leaf: int = 2) -> GreedyTree:
    """Top-down binary tree on information gain with majority-vote leaves."""
    if len(ds) < 2 or len(set(ds.labels)) < 2:
        raise TrainingError("need at least 2 classes to train")
    X, y, J = ds.X, ds.y, len(ds.class_list)

    def grow(rows: np.ndarray, depth: int) -> TreeNode:
        counts = np.bincount(y[rows], minlength=J)
        node = TreeNode(tuple(int(c) for c in counts))
        if depth >= max_depth or np.count_nonzero(counts) <= 1 or len(rows) < 2 * min_leaf:
            return node
        parent_h = _entropy(counts.astype(np.float64))
        best = None
        onehot = np.eye(J)[y[rows]]
        for f in range(X.shape[1]):
            x = X[rows, f]
            order = np.argsort(x, kind="stable")
            xs = x[order]
            cum = np.cumsum(onehot[order], axis=0)
            cut = np.nonzero(xs[1:] > xs[:-1])[0]
            cut = cut[(cut + 1 >= min_leaf) & (len(rows) - cut - 1 >= min_leaf)]
            if len(cut) == 0:
                continue
            left = cum[cut]
            right = counts - left
            nl = left.sum(axis=1)
            gain = parent_h - (nl * _entropy(left) + (len(rows) - nl) * _entropy(right)) / len(rows)
            i = int(np.argmax(gain))
            if gain[i] > 1e-12 and (best is None or gain[i] > best[0] + _TIE):
                best = (float(gain[i]), f, float(0.5 * (xs[cut[i]] + xs[cut[i] + 1])))
        if best is None:
            return node
        _, f, thr = best
        low = X[rows, f] < thr
        return TreeNode(node.counts, f, thr, grow(rows[low], depth + 1), grow(rows[~low], depth + 1))

    root = grow(np.arange(len(ds)), 0)
    return GreedyTree(tuple(ds.class_list), tuple(ds.feature_names), root, max_depth, min_leaf)


# -- prediction --------------------------------------------------------------

def predict_batch(model, X) -> tuple[list[str], np.ndarray]:
    """Labels and per-class confidences for each row.

    ADT confidences are softmax-normalized summed scores; ties in the
    argmax go to the earliest class in ``class_list``.
    """
    P = model.predict_proba(X)
    if isinstance(model, AdtModel):
        idx = np.argmax(model.decision(X), axis=1)
    else:
        idx = np.argmax(P, axis=1)
    return [model.class_list[i] for i in idx], P


def predict(model, row) -> tuple[str, dict[str, float]]:
    labels, P = predict_batch(model, row)
    return labels[0], dict(zip(model.class_list, P[0].tolist()))


# -- evaluation --------------------------------------------------------------

@dataclass
class EvalMetrics:
    class_list: tuple[str, ...]
    confusion: np.ndarray                 # rows: true class, columns: predicted
    precision: dict[str, float | None]
    recall: dict[str, float | None]
    accuracy: float
    predictions: list[str] = field(default_factory=list)


def metrics(confusion, class_list: Sequence[str] | None = None) -> EvalMetrics:
    C = np.asarray(confusion)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("confusion matrix must be square")
    if np.any(C < 0):
        raise ValueError("confusion matrix must be nonnegative")
    names = tuple(class_list) if class_list is not None else tuple(str(i) for i in range(len(C)))
    diag = np.diag(C).astype(np.float64)
    col, row = C.sum(axis=0), C.sum(axis=1)
    precision = {c: (float(diag[i] / col[i]) if col[i] else None) for i, c in enumerate(names)}
    recall = {c: (float(diag[i] / row[i]) if row[i] else None) for i, c in enumerate(names)}
    total = C.sum()
    return EvalMetrics(names, C, precision, recall, float(diag.sum() / total) if total else 0.0)


def evaluate(model, ds: LabeledDataset) -> EvalMetrics:
    labels, _ = predict_batch(model, ds.X)
    return confusion_metrics(ds.labels, labels, model.class_list)


def confusion_metrics(true: Sequence[str], pred: Sequence[str], class_list) -> EvalMetrics:
    index = {c: i for i, c in enumerate(class_list)}
    C = np.zeros((len(class_list), len(class_list)), dtype=np.int64)
    for t, p in zip(true, pred):
        C[index[t], index[p]] += 1
    out = metrics(C, class_list)
    out.predictions = list(pred)
    return out


def stratified_folds(labels: Sequence[str], folds: int, seed) -> np.ndarray:
    """Fold index per row: seeded shuffle within each class, then round-robin.

    The round-robin counter carries over between classes so fold sizes
    differ by at most one row overall.
    """
    rng = np.random.default_rng(seed)
    labels = list(labels)
    out = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for c in sorted(set(labels)):
        rows = np.array([i for i, l in enumerate(labels) if l == c])
        if len(rows) < folds:
            raise ValueError(f"class {c!r} has {len(rows)} rows, fewer than {folds} folds")
        rows = rows[rng.permutation(len(rows))]
        out[rows] = (offset + np.arange(len(rows))) % folds
        offset = (offset + len(rows)) % folds
    return out


Learner = Callable[[LabeledDataset], object]


def cross_validate(ds: LabeledDataset, folds: int = 10, learner: Learner | None = None,
                   seed=0) -> EvalMetrics:
    """Stratified k-fold CV; each row is predicted exactly once."""
    learner = learner or train_ladtree
    assign = stratified_folds(ds.labels, folds, seed)
    pred: list[str | None] = [None] * len(ds)
    for k in range(folds):
        test = np.nonzero(assign == k)[0]
        train = np.nonzero(assign != k)[0]
        model = learner(ds.subset(train))
        labels, _ = predict_batch(model, ds.X[test])
        for i, lab in zip(test.tolist(), labels):
            pred[i] = lab
    return confusion_metrics(ds.labels, pred, ds.class_list)


# -- serialization -----------------------------------------------------------

def model_to_dict(model) -> dict:
    if isinstance(model, AdtModel):
        return {
            "format": MODEL_FORMAT,
            "version": FORMAT_VERSION,
            "class_list": list(model.class_list),
            "feature_names": list(model.feature_names),
            "iterations": model.iterations,
            "prediction_nodes": [{"id": i, "scores": list(s)} for i, s in enumerate(model.scores)],
            "splitters": [{"parent": s.parent, "feature": model.feature_names[s.feature],
                           "threshold": s.threshold, "below": s.below, "above": s.above}
                          for s in model.splitters],
        }
    if isinstance(model, GreedyTree):
        def node(t: TreeNode):
            if t.is_leaf:
                return {"counts": list(t.counts)}
            return {"counts": list(t.counts), "feature": model.feature_names[t.feature],
                    "threshold": t.threshold, "below": node(t.below), "above": node(t.above)}
        return {"format": TREE_FORMAT, "version": FORMAT_VERSION,
                "class_list": list(model.class_list), "feature_names": list(model.feature_names),
                "max_depth": model.max_depth, "min_leaf": model.min_leaf, "root": node(model.root)}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc: dict):
    try:
        fmt, version = doc["format"], doc["version"]
        if version != FORMAT_VERSION:
            raise ModelFileError(f"unsupported model file version {version}")
        names = tuple(doc["feature_names"])
        classes = tuple(doc["class_list"])
        if fmt == MODEL_FORMAT:
            nodes = sorted(doc["prediction_nodes"], key=lambda p: p["id"])
            if [p["id"] for p in nodes] != list(range(len(nodes))):
                raise ModelFileError("prediction node ids are not contiguous")
            scores = tuple(tuple(float(v) for v in p["scores"]) for p in nodes)
            if any(len(s) != len(classes) for s in scores) or not all(np.isfinite(scores).ravel()):
                raise ModelFileError("bad score vector")
            splitters = []
            for s in doc["splitters"]:
                sp = Splitter(int(s["parent"]), names.index(s["feature"]), float(s["threshold"]),
                              int(s["below"]), int(s["above"]))
                if not sp.parent < sp.below < len(scores) or not sp.parent < sp.above < len(scores):
                    raise ModelFileError("splitter references an invalid prediction node")
                splitters.append(sp)
            return AdtModel(classes, names, scores, tuple(splitters), int(doc["iterations"]))
        if fmt == TREE_FORMAT:
            def node(d):
                if "feature" not in d:
                    return TreeNode(tuple(int(c) for c in d["counts"]))
                return TreeNode(tuple(int(c) for c in d["counts"]), names.index(d["feature"]),
                                float(d["threshold"]), node(d["below"]), node(d["above"]))
            return GreedyTree(classes, names, node(doc["root"]), int(doc["max_depth"]), int(doc["min_leaf"]))
        raise ModelFileError(f"unknown model format {fmt!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"malformed model file: {exc}") from exc


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n")


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not a model file ({exc})") from exc
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: not a model file")
    return model_from_dict(doc)
