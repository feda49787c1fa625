"""Binary linking classifiers written against numpy.

Each model exposes ``decision_scores(X)`` (the linking score) and
``predict(X)``, which is ``decision_scores(X) > threshold``.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..errors import DegenerateDatasetError


def _check_binary(X, y):
    X, y = check_X_y(X, y, dtype=float)
    labels = set(np.unique(y).tolist())
    if not labels <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got {sorted(labels)}")
    if labels != {0, 1}:
        raise DegenerateDatasetError("training data must contain both classes")
    return X, y.astype(int)


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class _LinkClassifier(ClassifierMixin, BaseEstimator):
    kind = ""

    def decision_scores(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X):
        return (self.decision_scores(X) > self.threshold).astype(int)


# -- logistic regression ---------------------------------------------------

def logistic_loss_grad(w, b, X, y, lam):
    """Mean log-loss plus ``lam/2 * |w|^2`` and its gradient (bias unregularized)."""
    z = X @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * np.dot(w, w)
    r = sigmoid(z) - y
    grad_w = X.T @ r / len(y) + lam * w
    grad_b = float(np.mean(r))
    return float(loss), grad_w, grad_b


class LogRegModel(_LinkClassifier):
    """L2-regularized logistic regression fit by full-batch gradient descent."""

    kind = "logreg"

    def __init__(self, lam=1e-3, lr=0.5, epochs=2000, seed=0, threshold=0.5):
        self.lam = lam
        self.lr = lr
        self.epochs = epochs
        self.seed = seed
        self.threshold = threshold

    def fit(self, X, y):
        X, y = _check_binary(X, y)
        w = np.zeros(X.shape[1])
        b = 0.0
        self.loss_history_ = []
        for _ in range(self.epochs):
            loss, gw, gb = logistic_loss_grad(w, b, X, y, self.lam)
            self.loss_history_.append(loss)
            w -= self.lr * gw
            b -= self.lr * gb
        self.coef_, self.intercept_ = w, b
        self.n_features_in_ = X.shape[1]
        return self

    def decision_scores(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        return sigmoid(X @ self.coef_ + self.intercept_)

    def predict_proba(self, X):
        p = self.decision_scores(X)
        return np.column_stack([1.0 - p, p])

    def get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def set_state(self, state):
        self.coef_ = np.array(state["coef"], dtype=float)
        self.intercept_ = float(state["intercept"])
        self.n_features_in_ = len(self.coef_)
        return self


# -- linear SVC -----------------------------------------------------------

def svc_objective(w, b, X, y_pm, lam):
    """``lam/2 * |[w, b]|^2 + mean hinge``; the bias is regularized with ``w``."""
    margins = y_pm * (X @ w + b)
    return 0.5 * lam * (np.dot(w, w) + b * b) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


class LinearSvcModel(_LinkClassifier):
    """Linear SVM trained with Pegasos stochastic sub-gradient steps.

    The bias is handled as an extra constant feature, so it is regularized
    along with the weights. The optional projection onto the 1/sqrt(lam)
    ball is left out: with it, the large early iterates get clipped
    unevenly and the running average can drift back uphill. The returned
    model is the average of all iterates; ``objective_history_`` holds its
    objective after each epoch.
    """

    kind = "svc"

    def __init__(self, lam=0.01, epochs=50, seed=0, threshold=0.0):
        self.lam = lam
        self.epochs = epochs
        self.seed = seed
        self.threshold = threshold

    def fit(self, X, y):
        X, y = _check_binary(X, y)
        y_pm = np.where(y == 1, 1.0, -1.0)
        n, d = X.shape
        Xa = np.hstack([X, np.ones((n, 1))])
        rng = np.random.default_rng(self.seed)
        w = np.zeros(d + 1)
        w_sum = np.zeros(d + 1)
        t = 0
        self.objective_history_ = []
        for _ in range(self.epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (self.lam * t)
                violated = y_pm[i] * np.dot(w, Xa[i]) < 1.0
                w *= 1.0 - eta * self.lam
                if violated:
                    w += eta * y_pm[i] * Xa[i]
                w_sum += w
            avg = w_sum / t
            self.objective_history_.append(svc_objective(avg[:-1], avg[-1], X, y_pm, self.lam))
        avg = w_sum / t if t else w_sum
        self.coef_, self.intercept_ = avg[:-1], float(avg[-1])
        self.n_features_in_ = d
        return self

    def decision_scores(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        return X @ self.coef_ + self.intercept_

    decision_function = decision_scores

    def get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def set_state(self, state):
        self.coef_ = np.array(state["coef"], dtype=float)
        self.intercept_ = float(state["intercept"])
        self.n_features_in_ = len(self.coef_)
        return self


# -- random forest --------------------------------------------------------

class _Tree:
    """Flat binary tree; ``feature == -1`` marks a leaf."""

    def __init__(self):
        self.feature, self.threshold, self.left, self.right, self.value = [], [], [], [], []

    def add(self, feature=-1, threshold=0.0, value=0.0):
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def predict(self, X):
        feature = np.array(self.feature)
        threshold = np.array(self.threshold)
        left, right = np.array(self.left), np.array(self.right)
        node = np.zeros(len(X), dtype=int)
        while True:
            f = feature[node]
            inner = f >= 0
            if not inner.any():
                break
            rows = np.nonzero(inner)[0]
            go_left = X[rows, f[rows]] <= threshold[node[rows]]
            node[rows] = np.where(go_left, left[node[rows]], right[node[rows]])
        return np.array(self.value)[node]

    def to_dict(self):
        return {k: list(getattr(self, k)) for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, d):
        t = cls()
        for k in ("feature", "threshold", "left", "right", "value"):
            setattr(t, k, list(d[k]))
        return t


def _best_split(x, y):
    """Lowest weighted Gini split of one feature: (impurity, threshold) or None."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    cut = np.nonzero(xs[:-1] < xs[1:])[0]
    if cut.size == 0:
        return None
    pos_left = np.cumsum(ys)[cut]
    n_left = cut + 1.0
    n_right = n - n_left
    pos_right = ys.sum() - pos_left
    p_l, p_r = pos_left / n_left, pos_right / n_right
    gini = (n_left * 2 * p_l * (1 - p_l) + n_right * 2 * p_r * (1 - p_r)) / n
    k = int(np.argmin(gini))
    return float(gini[k]), float((xs[cut[k]] + xs[cut[k] + 1]) / 2.0)


def _grow(tree, X, y, idx, depth, max_depth, n_sub, rng):
    ys = y[idx]
    p = float(ys.mean())
    node = tree.add(value=p)
    if depth >= max_depth or p in (0.0, 1.0) or len(idx) < 2:
        return node
    parent = 2 * p * (1 - p)
    d = X.shape[1]
    perm = rng.permutation(d)
    # try the sampled subset first, then the rest only if it yields no split
    for group in (perm[:n_sub], perm[n_sub:]):
        best = None
        for f in sorted(group.tolist()):
            s = _best_split(X[idx, f], ys)
            if s is not None and s[0] < parent - 1e-12 and (best is None or s[0] < best[0]):
                best = (s[0], f, s[1])
        if best is not None:
            break
    if best is None:
        return node
    _, f, thr = best
    mask = X[idx, f] <= thr
    tree.feature[node], tree.threshold[node] = f, thr
    tree.left[node] = _grow(tree, X, y, idx[mask], depth + 1, max_depth, n_sub, rng)
    tree.right[node] = _grow(tree, X, y, idx[~mask], depth + 1, max_depth, n_sub, rng)
    return node


class RandomForestModel(_LinkClassifier):
    """Bagged Gini trees; the score is the mean leaf positive fraction.

    Parameters
    ----------
    n_trees : int
    max_depth : int
        ``0`` gives single-leaf trees.
    max_features : int or None
        Features sampled per node; ``None`` means ``ceil(sqrt(d))``.
    bootstrap : bool
        Resample rows with replacement for every tree.
    seed : int
        Root seed; per-tree generators are spawned from it.
    """

    kind = "rf"

    def __init__(self, n_trees=100, max_depth=6, max_features=None, bootstrap=True, seed=0, threshold=0.5):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.threshold = threshold

    def fit(self, X, y):
        X, y = _check_binary(X, y)
        n, d = X.shape
        n_sub = self.max_features or math.ceil(math.sqrt(d))
        n_sub = min(max(n_sub, 1), d)
        self.trees_ = []
        for child in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(child)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = _Tree()
            _grow(tree, X, y.astype(float), idx, 0, self.max_depth, n_sub, rng)
            self.trees_.append(tree)
        self.n_features_in_ = d
        return self

    def decision_scores(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X, dtype=float)
        return np.mean([t.predict(X) for t in self.trees_], axis=0)

    def predict_proba(self, X):
        p = self.decision_scores(X)
        return np.column_stack([1.0 - p, p])

    def get_state(self):
        return {"trees": [t.to_dict() for t in self.trees_], "n_features": self.n_features_in_}

    def set_state(self, state):
        self.trees_ = [_Tree.from_dict(t) for t in state["trees"]]
        self.n_features_in_ = state["n_features"]
        return self


MODELS = {cls.kind: cls for cls in (LogRegModel, LinearSvcModel, RandomForestModel)}
