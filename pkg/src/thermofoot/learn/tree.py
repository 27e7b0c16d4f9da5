"""CART decision trees (Gini for classification, squared error for regression).

Trees are grown depth-first into flat arrays. A sample goes left when
``x[feature] <= threshold``. Split search picks the largest impurity
decrease; near-equal decreases (within ``_TIE_TOL``) resolve to the lowest
feature index, then the lowest threshold.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._seeding import as_generator
from .._validation import (check_array, check_is_fitted, check_n_features,
                           check_sample_weight, check_X_y)
from ..exceptions import ConfigError

_TIE_TOL = 1e-12
LEAF = -1


def _gini_curve(w0, w1):
    total = w0 + w1
    with np.errstate(invalid="ignore", divide="ignore"):
        g = 1.0 - (w0 * w0 + w1 * w1) / (total * total)
    return np.where(total > 0, g, 0.0)


class ClassificationCriterion:
    """Weighted Gini impurity on 0/1 targets."""

    def __init__(self, y, w):
        self.w0 = w * (y == 0)
        self.w1 = w * (y == 1)

    def node_stats(self, idx):
        w0 = self.w0[idx].sum()
        w1 = self.w1[idx].sum()
        return w0 + w1, float(_gini_curve(w0, w1)), (w1 / (w0 + w1) if w0 + w1 > 0 else 0.0)

    def split_curve(self, idx_sorted):
        """Weighted left mass and child impurities for every cut position.

        ``idx_sorted`` is ``(n,)`` or ``(n, m)``; cumulation runs along axis 0.
        """
        c0 = np.cumsum(self.w0[idx_sorted], axis=0)
        c1 = np.cumsum(self.w1[idx_sorted], axis=0)
        r0 = c0[-1] - c0
        r1 = c1[-1] - c1
        return c0 + c1, _gini_curve(c0, c1), r0 + r1, _gini_curve(r0, r1)

    def split_stats(self, idx, goes_left):
        """Child masses and impurities for an ``(n, m)`` 0/1 left mask."""
        w0, w1 = self.w0[idx], self.w1[idx]
        l0, l1 = w0 @ goes_left, w1 @ goes_left
        r0, r1 = w0.sum() - l0, w1.sum() - l1
        return l0 + l1, _gini_curve(l0, l1), r0 + r1, _gini_curve(r0, r1)


class RegressionCriterion:
    """Weighted squared error (variance) on real targets."""

    def __init__(self, y, w):
        self.w = w
        self.wy = w * y
        self.wyy = w * y * y

    @staticmethod
    def _var(sw, swy, swyy):
        with np.errstate(invalid="ignore", divide="ignore"):
            v = swyy / sw - (swy / sw) ** 2
        return np.where(sw > 0, np.maximum(v, 0.0), 0.0)

    def node_stats(self, idx):
        sw = self.w[idx].sum()
        swy = self.wy[idx].sum()
        var = float(self._var(sw, swy, self.wyy[idx].sum()))
        return sw, var, (swy / sw if sw > 0 else 0.0)

    def split_curve(self, idx_sorted):
        cw = np.cumsum(self.w[idx_sorted], axis=0)
        cy = np.cumsum(self.wy[idx_sorted], axis=0)
        cyy = np.cumsum(self.wyy[idx_sorted], axis=0)
        rw, ry, ryy = cw[-1] - cw, cy[-1] - cy, cyy[-1] - cyy
        return cw, self._var(cw, cy, cyy), rw, self._var(rw, ry, ryy)

    def split_stats(self, idx, goes_left):
        w, wy, wyy = self.w[idx], self.wy[idx], self.wyy[idx]
        lw, ly, lyy = w @ goes_left, wy @ goes_left, wyy @ goes_left
        rw, ry, ryy = w.sum() - lw, wy.sum() - ly, wyy.sum() - lyy
        return lw, self._var(lw, ly, lyy), rw, self._var(rw, ry, ryy)


def resolve_max_features(max_features, n_features):
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(np.log2(n_features)))
    if isinstance(max_features, str):
        raise ConfigError(f"unknown max_features {max_features!r}")
    if isinstance(max_features, (float, np.floating)):
        if not 0.0 < max_features <= 1.0:
            raise ConfigError(f"max_features fraction must lie in (0, 1], got {max_features}")
        return max(1, int(max_features * n_features))
    n = int(max_features)
    if n < 1:
        raise ConfigError(f"max_features must be >= 1, got {max_features}")
    return min(n, n_features)


class Tree:
    """Flat array representation of a fitted binary tree."""

    def __init__(self, feature, threshold, left, right, value, n_samples, weight,
                 impurity, impurity_decrease, n_features):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)
        self.n_samples = np.asarray(n_samples, dtype=np.int64)
        self.weight = np.asarray(weight, dtype=float)
        self.impurity = np.asarray(impurity, dtype=float)
        self.impurity_decrease = np.asarray(impurity_decrease, dtype=float)
        self.n_features = int(n_features)

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def max_depth(self):
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X):
        """Leaf index reached by every row of X."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.arange(X.shape[0])
        while active.size:
            f = self.feature[node[active]]
            internal = f != LEAF
            active = active[internal]
            if not active.size:
                break
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        return node

    def predict(self, X):
        return self.value[self.apply(X)]

    def feature_importances(self, normalize=True):
        """Impurity decrease weighted by node mass fraction, per feature."""
        imp = np.zeros(self.n_features)
        internal = self.feature != LEAF
        if internal.any():
            frac = self.weight[internal] / self.weight[0]
            np.add.at(imp, self.feature[internal], frac * self.impurity_decrease[internal])
        total = imp.sum()
        if normalize and total > 0:
            imp /= total
        return imp

    # nested-dict form used for serialization
    def to_nested(self, node=0):
        d = {"n_samples": int(self.n_samples[node]), "weight": float(self.weight[node]),
             "impurity": float(self.impurity[node]), "value": float(self.value[node])}
        if self.feature[node] != LEAF:
            d.update(feature=int(self.feature[node]), threshold=float(self.threshold[node]),
                     impurity_decrease=float(self.impurity_decrease[node]),
                     left=self.to_nested(int(self.left[node])),
                     right=self.to_nested(int(self.right[node])))
        return d

    @classmethod
    def from_nested(cls, root, n_features):
        cols = {k: [] for k in ("feature", "threshold", "left", "right", "value", "n_samples",
                                "weight", "impurity", "impurity_decrease")}

        def visit(d):
            i = len(cols["feature"])
            for k in cols:
                cols[k].append(0)
            cols["n_samples"][i] = d["n_samples"]
            cols["weight"][i] = d["weight"]
            cols["impurity"][i] = d["impurity"]
            cols["value"][i] = d["value"]
            if "feature" in d:
                cols["feature"][i] = d["feature"]
                cols["threshold"][i] = d["threshold"]
                cols["impurity_decrease"][i] = d["impurity_decrease"]
                cols["left"][i] = visit(d["left"])
                cols["right"][i] = visit(d["right"])
            else:
                cols["feature"][i] = LEAF
                cols["left"][i] = cols["right"][i] = LEAF
                cols["threshold"][i] = 0.0
                cols["impurity_decrease"][i] = 0.0
            return i

        visit(root)
        return cls(n_features=n_features, **cols)


def _best_cuts(xs_sorted, left_w, left_imp, right_w, right_imp, parent_imp, total_w,
               min_samples_leaf):
    """Best cut of every column of pre-sorted ``(n, m)`` values.

    Returns per-column decrease and position; columns without a valid cut
    get ``-inf`` and position ``-1``.
    """
    n = xs_sorted.shape[0]
    counts = np.arange(1, n)[:, None]
    valid = (xs_sorted[:-1] < xs_sorted[1:]) \
        & (counts >= min_samples_leaf) & (n - counts >= min_samples_leaf)
    decrease = parent_imp - (left_w[:-1] * left_imp[:-1] + right_w[:-1] * right_imp[:-1]) / total_w
    decrease = np.where(valid, decrease, -np.inf)
    best = decrease.max(axis=0)
    has_cut = valid.any(axis=0)
    pos = np.where(has_cut, np.argmax(decrease >= best - _TIE_TOL, axis=0), -1)
    return np.where(has_cut, best, -np.inf), pos


def _midpoint(lo, hi):
    thr = (lo + hi) / 2.0
    if thr >= hi or not np.isfinite(thr):
        thr = lo
    return float(thr)


def build_tree(X, y, sample_weight, criterion="gini", splitter="best", max_depth=None,
               min_samples_split=2, min_samples_leaf=1, max_features=None, rng=None):
    """Grow one tree.

    ``splitter="best"`` scans every midpoint between distinct sorted values;
    ``splitter="random"`` draws one threshold per candidate feature uniformly
    within the node's value range. When ``max_features`` is below the feature
    count, each node draws candidate features from ``rng``; with all features
    the growth uses no randomness at all.
    """
    n_samples, n_features = X.shape
    crit = ClassificationCriterion(y, sample_weight) if criterion == "gini" \
        else RegressionCriterion(y, sample_weight)
    k_features = resolve_max_features(max_features, n_features)
    depth_limit = np.inf if max_depth is None else max_depth
    if splitter == "random" or k_features < n_features:
        rng = as_generator(rng)

    feature, threshold, left, right = [], [], [], []
    value, n_node, weight, impurity, decrease = [], [], [], [], []

    def new_node(idx):
        w, imp, val = crit.node_stats(idx)
        for lst, v in ((feature, LEAF), (threshold, 0.0), (left, LEAF), (right, LEAF),
                       (value, val), (n_node, len(idx)), (weight, w), (impurity, imp),
                       (decrease, 0.0)):
            lst.append(v)
        return len(feature) - 1

    root = new_node(np.arange(n_samples))
    stack = [(root, np.arange(n_samples), 0)]
    while stack:
        node, idx, depth = stack.pop()
        n = len(idx)
        parent_imp = impurity[node]
        if depth >= depth_limit or n < min_samples_split or n < 2 * min_samples_leaf \
                or parent_imp <= 1e-15:
            continue
        total_w = weight[node]
        if k_features < n_features or splitter == "random":
            order = rng.permutation(n_features)
        else:
            order = np.arange(n_features)
        Xn = X[idx]
        # constant features are skipped without counting toward max_features
        varying = Xn.max(axis=0) > Xn.min(axis=0)
        feats = order[varying[order]][:k_features]
        if not feats.size:
            continue
        Xf = Xn[:, feats]
        if splitter == "random":
            lo, hi = Xf.min(axis=0), Xf.max(axis=0)
            thrs = rng.uniform(lo, hi)
            thrs = np.where(thrs >= hi, lo, thrs)
            goes_left = Xf <= thrs
            n_left = goes_left.sum(axis=0)
            ok = (n_left >= min_samples_leaf) & (n - n_left >= min_samples_leaf)
            lw, limp, rw, rimp = crit.split_stats(idx, goes_left.astype(float))
            decs = parent_imp - (lw * limp + rw * rimp) / total_w
        else:
            srt = np.argsort(Xf, axis=0, kind="stable")
            xs_sorted = np.take_along_axis(Xf, srt, axis=0)
            lw, limp, rw, rimp = crit.split_curve(idx[srt])
            decs, pos = _best_cuts(xs_sorted, lw, limp, rw, rimp, parent_imp, total_w,
                                   min_samples_leaf)
            ok = pos >= 0
        best = (-np.inf, None, None)      # decrease, feature, threshold
        for c in np.flatnonzero(ok):
            if splitter == "random":
                thr = float(thrs[c])
            else:
                thr = _midpoint(xs_sorted[pos[c], c], xs_sorted[pos[c] + 1, c])
            cand = (float(decs[c]), int(feats[c]), thr)
            if best[1] is None or cand[0] > best[0] + _TIE_TOL \
                    or (abs(cand[0] - best[0]) <= _TIE_TOL and cand[1] < best[1]):
                best = cand
        if best[1] is None:
            continue
        dec, f, thr = best
        goes_left = X[idx, f] <= thr
        li, ri = idx[goes_left], idx[~goes_left]
        feature[node], threshold[node], decrease[node] = f, thr, max(dec, 0.0)
        lnode = new_node(li)
        rnode = new_node(ri)
        left[node], right[node] = lnode, rnode
        # right pushed first so the left subtree is numbered first
        stack.append((rnode, ri, depth + 1))
        stack.append((lnode, li, depth + 1))

    return Tree(feature, threshold, left, right, value, n_node, weight, impurity, decrease,
                n_features)


def _check_tree_params(est):
    if est.max_depth is not None and int(est.max_depth) < 1:
        raise ConfigError(f"max_depth must be >= 1 or None, got {est.max_depth}")
    if int(est.min_samples_leaf) < 1:
        raise ConfigError(f"min_samples_leaf must be >= 1, got {est.min_samples_leaf}")
    if int(est.min_samples_split) < 2:
        raise ConfigError(f"min_samples_split must be >= 2, got {est.min_samples_split}")
    if est.splitter not in ("best", "random"):
        raise ConfigError(f"splitter must be 'best' or 'random', got {est.splitter!r}")


class BinaryProbaMixin:
    """``predict`` and ``predict_proba`` on top of a class-1 ``_score``."""

    def predict_proba(self, X):
        check_is_fitted(self)
        p = self._score(check_n_features(X, self.n_features_in_))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        p = self.predict_proba(X)[:, 1]
        return self.classes_[(p >= 0.5).astype(np.int64)]


class DecisionTreeClassifier(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    """Binary CART classifier.

    Parameters
    ----------
    max_depth : int or None
        Depth limit, unlimited when None.
    min_samples_split, min_samples_leaf : int
        Minimum node sizes (sample counts, not weights).
    max_features : None, int, float or "sqrt"
        Candidate features examined per node.
    splitter : {"best", "random"}
        Exhaustive midpoint search, or one uniform random threshold per feature.
    random_state : int or None
    """

    def __init__(self, max_depth=None, min_samples_split=2, min_samples_leaf=1,
                 max_features=None, splitter="best", random_state=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.splitter = splitter
        self.random_state = random_state

    def _validate_params(self):
        _check_tree_params(self)

    def fit(self, X, y, sample_weight=None):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        w = check_sample_weight(sample_weight, X.shape[0])
        self.tree_ = build_tree(X, yy, w, "gini", self.splitter, self.max_depth,
                                int(self.min_samples_split), int(self.min_samples_leaf),
                                self.max_features, self.random_state)
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        return self

    def _score(self, X):
        return self.tree_.predict(X)

    @property
    def feature_importances_(self):
        check_is_fitted(self)
        return self.tree_.feature_importances()

    def _get_state(self):
        return {"tree": self.tree_.to_nested()}

    def _set_state(self, state):
        self.tree_ = Tree.from_nested(state["tree"], self.n_features_in_)


class DecisionTreeRegressor(BaseEstimator):
    """Squared-error CART regressor; the weak learner of gradient boosting."""

    def __init__(self, max_depth=3, min_samples_split=2, min_samples_leaf=1,
                 max_features=None, splitter="best", random_state=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.splitter = splitter
        self.random_state = random_state

    def fit(self, X, y, sample_weight=None):
        _check_tree_params(self)
        X = check_array(X)
        y = np.asarray(y, dtype=float)
        w = check_sample_weight(sample_weight, X.shape[0])
        self.tree_ = build_tree(X, y, w, "mse", self.splitter, self.max_depth,
                                int(self.min_samples_split), int(self.min_samples_leaf),
                                self.max_features, self.random_state)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "tree_")
        return self.tree_.predict(check_n_features(X, self.n_features_in_))
