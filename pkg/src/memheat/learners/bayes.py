"""Gaussian / categorical naive Bayes over the fixed feature layout.

Numeric features get per-class Gaussian likelihoods with a variance floor,
the two categoricals (operation type, page bucket) get add-1 smoothed
counts, priors come from add-1 smoothed class counts. No drift handling:
this is the memoryless-accumulation reference point the adaptive learners
are compared against.
"""

import math

import numpy as np

from ..features import NUM_FEATURES
from ..kernels import ClassGaussians
from .base import OnlineClassifier

VAR_FLOOR = 1e-6


class GaussianStat:
    """Single-feature Welford accumulator (count, mean, sum of squared devs)."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self):
        self.n = 0.0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, x, weight=1.0):
        self.n += weight
        delta = x - self.mean
        self.mean += delta * weight / self.n
        self.m2 += weight * delta * (x - self.mean)

    def variance(self, floor=VAR_FLOOR):
        if self.n < 2:
            return floor
        return max(self.m2 / self.n, floor)


class NaiveBayes(OnlineClassifier):

    def __init__(self, var_floor=VAR_FLOOR, n_buckets=256):
        self.var_floor = var_floor
        self.n_buckets = n_buckets
        self.class_counts = [0.0, 0.0]
        self.stats = np.zeros((2, NUM_FEATURES, 3))
        self._gauss = ClassGaussians(self.stats)
        self.op_counts = [[0.0, 0.0], [0.0, 0.0]]  # [class][op]
        self.bucket_counts = np.zeros((2, n_buckets))

    def learn(self, fv, label):
        self.class_counts[label] += 1.0
        self.op_counts[label][fv.op] += 1.0
        self.bucket_counts[label, fv.bucket] += 1.0
        self._gauss.update(label, fv.num, 1.0)

    def posterior(self, fv):
        """(cold, hot) posterior probabilities, summing to 1."""
        n0, n1 = self.class_counts
        total = n0 + n1
        if total == 0.0:
            return 0.5, 0.5
        ll0, ll1 = self._gauss.loglik(fv.num, self.var_floor)
        ll0 += math.log((n0 + 1.0) / (total + 2.0))
        ll1 += math.log((n1 + 1.0) / (total + 2.0))
        ll0 += math.log((self.op_counts[0][fv.op] + 1.0) / (n0 + 2.0))
        ll1 += math.log((self.op_counts[1][fv.op] + 1.0) / (n1 + 2.0))
        ll0 += math.log((self.bucket_counts[0, fv.bucket] + 1.0) / (n0 + self.n_buckets))
        ll1 += math.log((self.bucket_counts[1, fv.bucket] + 1.0) / (n1 + self.n_buckets))
        m = ll0 if ll0 > ll1 else ll1
        e0 = math.exp(ll0 - m)
        e1 = math.exp(ll1 - m)
        p1 = e1 / (e0 + e1)
        return 1.0 - p1, p1

    def predict(self, fv):
        _, p_hot = self.posterior(fv)
        return (1 if p_hot > 0.5 else 0), p_hot
