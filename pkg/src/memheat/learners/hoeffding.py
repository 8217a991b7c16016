"""Incremental decision tree with per-node drift adaptation.

Leaves accumulate per-class Gaussian statistics for the numeric features
and plain counts for the categoricals. Every ``grace_period`` instances a
leaf ranks candidate binary splits by information gain and splits once the
gap between the best and second-best candidate clears the Hoeffding bound,
or once the bound itself drops under the tie threshold.

Every internal node carries an ADWIN detector fed with the subtree's 0/1
prediction error (for a given instance the subtree's prediction equals the
reached leaf's prediction, so one leaf lookup serves the whole path). When
a node's detector fires, an alternate subtree starts growing in parallel on
the same instances; the alternate replaces the subtree when the detector
fires again or when the alternate's windowed error undercuts the subtree's
by a confidence bound.

Numeric split candidates come from the class Gaussian summaries: the
midpoint between the two class means (the equal-variance decision
boundary) plus nine points spanning both classes' 3-sigma ranges. This
bounds leaf memory; no per-value tracking is kept.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..features import CAT_BUCKET, CAT_OP, NUM_FEATURES, TOTAL_FEATURES
from ..kernels import Adwin, ClassGaussians
from .base import OnlineClassifier

_SQRT2 = math.sqrt(2.0)


class InvalidParams(Exception):
    pass


def hoeffding_bound(value_range, delta, n):
    """Confidence radius sqrt(R^2 ln(1/delta) / 2n)."""
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    if not 0.0 < delta <= 1.0:
        raise InvalidParams(f"delta must be in (0, 1], got {delta}")
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))


@dataclass(slots=True)
class HatConfig:
    grace_period: int = 200
    split_delta: float = 1e-7
    tie_tau: float = 0.05
    drift_delta: float = 0.002  # per-node ADWIN confidence
    swap_delta: float = 0.05    # confidence for alternate-vs-main comparison
    var_floor: float = 1e-6
    max_leaves: int = 1024
    n_buckets: int = 256


class _Leaf:
    __slots__ = ("class_w", "stats", "gauss", "op_counts", "bucket_counts",
                 "seen_since")

    def __init__(self, n_buckets, warm=None):
        self.class_w = [0.0, 0.0] if warm is None else [warm[0], warm[1]]
        self.stats = np.zeros((2, NUM_FEATURES, 3))
        self.gauss = ClassGaussians(self.stats)
        self.op_counts = [[0.0, 0.0], [0.0, 0.0]]
        self.bucket_counts = np.zeros((2, n_buckets))
        self.seen_since = 0


class _Split:
    __slots__ = ("is_cat", "feature", "threshold", "value", "left", "right",
                 "adwin", "alt", "alt_adwin")

    def __init__(self, is_cat, feature, threshold, value, left, right, adwin):
        self.is_cat = is_cat
        self.feature = feature
        self.threshold = threshold
        self.value = value
        self.left = left
        self.right = right
        self.adwin = adwin
        self.alt = None
        self.alt_adwin = None


def _entropy2(a, b):
    if a <= 0.0 or b <= 0.0:
        return 0.0
    n = a + b
    pa = a / n
    pb = b / n
    return -(pa * math.log2(pa) + pb * math.log2(pb))


def _phi(z):
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


class HoeffdingAdaptiveTree(OnlineClassifier):
    """Drift-adaptive Hoeffding tree over the fixed feature layout.

    ``subset_size`` restricts each split attempt to a fresh random feature
    subset (used by the forest); None evaluates all features and draws no
    randomness, so two trees fed the same stream stay identical.
    """

    def __init__(self, config=None, subset_size=None, rng=None):
        self.config = config if config is not None else HatConfig()
        self.subset_size = subset_size
        self.rng = rng
        self.root = _Leaf(self.config.n_buckets)
        self.n_leaves = 1
        self.n_splits = 0

    # -- prediction ---------------------------------------------------------

    @staticmethod
    def _route(node, fv):
        vals = fv.vals
        while type(node) is _Split:
            if node.is_cat:
                x = fv.op if node.feature == CAT_OP else fv.bucket
                node = node.left if x == node.value else node.right
            else:
                node = node.left if vals[node.feature] <= node.threshold else node.right
        return node

    def predict(self, fv):
        leaf = self._route(self.root, fv)
        c0, c1 = leaf.class_w
        score = (c1 + 1.0) / (c0 + c1 + 2.0)
        return (1 if c1 > c0 else 0), score

    def predict_label(self, fv):
        leaf = self._route(self.root, fv)
        return 1 if leaf.class_w[1] > leaf.class_w[0] else 0

    # -- learning -----------------------------------------------------------

    def learn(self, fv, label, weight=1.0, pred_hint=-1):
        """Absorb one instance. ``pred_hint`` lets a caller that already
        asked this tree for a label skip the extra pre-update lookup."""
        pred = self.predict_label(fv) if pred_hint < 0 else pred_hint
        err = 1 if pred != label else 0
        self._train_subtree(self, "root", fv, label, weight, err)

    def _leaf_learn(self, leaf, fv, label, weight):
        leaf.class_w[label] += weight
        leaf.op_counts[label][fv.op] += weight
        leaf.bucket_counts[label, fv.bucket] += weight
        leaf.gauss.update(label, fv.num, weight)
        leaf.seen_since += 1

    def _train_subtree(self, owner, attr, fv, label, weight, err):
        """Walk one subtree for this instance: update drift detectors and
        alternates on the way down, then learn at the reached leaf. The
        subtree hangs off ``getattr(owner, attr)`` so promotions and leaf
        splits can rewire the root slot and alternate slots uniformly."""
        cfg = self.config
        vals = fv.vals
        node = getattr(owner, attr)
        parent = None
        went_left = False
        while type(node) is _Split:
            promoted = None
            mean_before = node.adwin.mean()
            # One-sided response: a cut with a falling mean is the error
            # improving (the detector fires on any change), not drift.
            if node.adwin.add(err) and node.adwin.mean() > mean_before:
                if node.alt is None:
                    if self.n_leaves < cfg.max_leaves:
                        node.alt = _Leaf(cfg.n_buckets)
                        node.alt_adwin = Adwin(cfg.drift_delta)
                        self.n_leaves += 1
                else:
                    promoted = self._promote_alternate(node)
            elif node.alt is not None:
                alt_leaf = self._route(node.alt, fv)
                alt_err = 1 if (1 if alt_leaf.class_w[1] > alt_leaf.class_w[0] else 0) != label else 0
                node.alt_adwin.add(alt_err)
                self._train_subtree(node, "alt", fv, label, weight, alt_err)
                w_main = node.adwin.width
                w_alt = node.alt_adwin.width
                if w_main > 0 and w_alt > 0:
                    e_main = node.adwin.mean()
                    e_alt = node.alt_adwin.mean()
                    bound = math.sqrt(2.0 * e_main * (1.0 - e_main)
                                      * math.log(2.0 / cfg.swap_delta)
                                      * (1.0 / w_main + 1.0 / w_alt))
                    if e_main - e_alt > bound:
                        promoted = self._promote_alternate(node)
                    elif e_alt - e_main > bound:
                        self.n_leaves -= self._count_leaves(node.alt)
                        node.alt = None
                        node.alt_adwin = None
            if promoted is not None:
                if parent is None:
                    setattr(owner, attr, promoted)
                elif went_left:
                    parent.left = promoted
                else:
                    parent.right = promoted
                return
            parent = node
            if node.is_cat:
                went_left = (fv.op if node.feature == CAT_OP else fv.bucket) == node.value
            else:
                went_left = vals[node.feature] <= node.threshold
            node = node.left if went_left else node.right

        self._leaf_learn(node, fv, label, weight)
        if node.seen_since >= cfg.grace_period:
            node.seen_since = 0
            if self.n_leaves < cfg.max_leaves:
                split = self._attempt_split(node)
                if split is not None:
                    self.n_leaves += 1
                    self.n_splits += 1
                    if parent is None:
                        setattr(owner, attr, split)
                    elif went_left:
                        parent.left = split
                    else:
                        parent.right = split

    def _promote_alternate(self, node):
        promoted = node.alt
        node.alt = None
        node.alt_adwin = None
        self.n_leaves -= self._count_leaves(node)
        return promoted

    def _count_leaves(self, node):
        if type(node) is _Leaf:
            return 1
        n = self._count_leaves(node.left) + self._count_leaves(node.right)
        if node.alt is not None:
            n += self._count_leaves(node.alt)
        return n

    # -- split selection ----------------------------------------------------

    def _split_features(self):
        if self.subset_size is None or self.subset_size >= TOTAL_FEATURES:
            return range(TOTAL_FEATURES)
        picked = self.rng.choice(TOTAL_FEATURES, size=self.subset_size, replace=False)
        return sorted(int(f) for f in picked)

    def _attempt_split(self, leaf):
        cfg = self.config
        # Split merit is judged on the counts observed at this leaf; the
        # fractional warm-start weights only steady early predictions.
        n0 = leaf.stats[0, 0, 0]
        n1 = leaf.stats[1, 0, 0]
        if n0 <= 0.0 or n1 <= 0.0:
            return None
        total = n0 + n1
        h_parent = _entropy2(n0, n1)
        best_gain = 0.0
        second_gain = 0.0
        best = None  # (is_cat, feature, threshold, value, warm_left, warm_right)

        for f in self._split_features():
            if f < NUM_FEATURES:
                cands = self._numeric_candidates(leaf, f, h_parent, total, n0, n1)
            elif f == CAT_OP:
                cands = self._op_candidates(leaf, h_parent, total, n0, n1)
            else:
                cands = self._bucket_candidates(leaf, h_parent, total, n0, n1)
            for gain, desc in cands:
                if gain > best_gain:
                    second_gain = best_gain
                    best_gain = gain
                    best = desc
                elif gain > second_gain:
                    second_gain = gain

        if best is None:
            return None
        eps = hoeffding_bound(1.0, cfg.split_delta, total)
        # Tie-breaking additionally demands a material best gain, else
        # attempts whose candidate set carries no signal (a forest member
        # drew an uninformative subset) would pile up zero-value splits.
        if not (best_gain - second_gain > eps
                or (eps < cfg.tie_tau and best_gain >= cfg.tie_tau)):
            return None
        is_cat, feature, threshold, value, warm_l, warm_r = best
        left = _Leaf(cfg.n_buckets, warm=warm_l)
        right = _Leaf(cfg.n_buckets, warm=warm_r)
        return _Split(is_cat, feature, threshold, value, left, right,
                      Adwin(cfg.drift_delta))

    def _numeric_candidates(self, leaf, f, h_parent, total, n0, n1):
        s = leaf.stats
        mu0 = s[0, f, 1]
        mu1 = s[1, f, 1]
        sd0 = math.sqrt(max(s[0, f, 2] / n0, self.config.var_floor))
        sd1 = math.sqrt(max(s[1, f, 2] / n1, self.config.var_floor))
        lo = min(mu0 - 3.0 * sd0, mu1 - 3.0 * sd1)
        hi = max(mu0 + 3.0 * sd0, mu1 + 3.0 * sd1)
        if not hi > lo:
            return []
        span = hi - lo
        out = []
        for i in range(10):
            t = 0.5 * (mu0 + mu1) if i == 0 else lo + span * i / 10.0
            l0 = n0 * _phi((t - mu0) / sd0)
            l1 = n1 * _phi((t - mu1) / sd1)
            left = l0 + l1
            right = total - left
            if left < 1e-9 or right < 1e-9:
                continue
            gain = h_parent - (left * _entropy2(l0, l1)
                               + right * _entropy2(n0 - l0, n1 - l1)) / total
            out.append((gain, (False, f, t, 0,
                               (l0, l1), (n0 - l0, n1 - l1))))
        return out

    def _op_candidates(self, leaf, h_parent, total, n0, n1):
        oc = leaf.op_counts
        out = []
        for v in (0, 1):
            l0 = oc[0][v]
            l1 = oc[1][v]
            left = l0 + l1
            right = total - left
            if left <= 0.0 or right < 1e-9:
                continue
            gain = h_parent - (left * _entropy2(l0, l1)
                               + right * _entropy2(n0 - l0, n1 - l1)) / total
            out.append((gain, (True, CAT_OP, 0.0, v,
                               (l0, l1), (n0 - l0, n1 - l1))))
        return out

    def _bucket_candidates(self, leaf, h_parent, total, n0, n1):
        counts = leaf.bucket_counts
        l0 = counts[0]
        l1 = counts[1]
        left = l0 + l1
        right = total - left
        r0 = n0 - l0
        r1 = n1 - l1
        gains = h_parent - (left * _entropy2_vec(l0, l1)
                            + right * _entropy2_vec(r0, r1)) / total
        out = []
        nz = np.nonzero(left)[0]
        for v in nz:
            if right[v] < 1e-9:
                continue
            out.append((float(gains[v]),
                        (True, CAT_BUCKET, 0.0, int(v),
                         (float(l0[v]), float(l1[v])),
                         (float(r0[v]), float(r1[v])))))
        return out


def _entropy2_vec(a, b):
    n = a + b
    pa = np.divide(a, n, out=np.zeros_like(a), where=n > 0)
    pb = np.divide(b, n, out=np.zeros_like(b), where=n > 0)
    ha = np.where(pa > 0, -pa * np.log2(np.where(pa > 0, pa, 1.0)), 0.0)
    hb = np.where(pb > 0, -pb * np.log2(np.where(pb > 0, pb, 1.0)), 0.0)
    return ha + hb
