"""Ensemble of drift-adaptive Hoeffding trees with online bagging.

Each member trains on every instance with a Poisson(lambda) weight and
restricts split attempts to a fresh random feature subset, which is what
decorrelates the trees. Two detectors watch each member's own prequential
error: the warning detector starts a background tree that trains in
parallel without voting, the drift detector replaces the member with its
background tree (or a fresh one). Votes are weighted by each member's
accuracy over its recent labeled window.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..features import TOTAL_FEATURES
from ..kernels import Adwin
from .base import OnlineClassifier
from .hoeffding import HatConfig, HoeffdingAdaptiveTree

_POISSON_BLOCK = 4096


@dataclass(slots=True)
class ArfConfig:
    n_trees: int = 10
    poisson_lambda: float | None = 6.0  # None pins every weight to 1
    warning_delta: float = 0.01
    drift_delta: float = 0.001
    subset_size: int | None = None      # None derives ceil(sqrt(feature count))
    acc_window: int = 1000
    weight_floor: float = 0.01
    detectors: bool = True              # member-level warning/drift handling
    hat: HatConfig = field(default_factory=HatConfig)

    def effective_subset(self):
        if self.subset_size is not None:
            return self.subset_size
        return math.ceil(math.sqrt(TOTAL_FEATURES))


class _Member:
    __slots__ = ("tree", "warn", "drift", "background", "acc", "acc_sum",
                 "generation")

    def __init__(self, tree, warning_delta, drift_delta, detectors, acc_window):
        self.tree = tree
        self.warn = Adwin(warning_delta) if detectors else None
        self.drift = Adwin(drift_delta) if detectors else None
        self.background = None
        self.acc = deque(maxlen=acc_window)
        self.acc_sum = 0
        self.generation = 0

    def record_outcome(self, correct):
        if len(self.acc) == self.acc.maxlen:
            self.acc_sum -= self.acc[0]
        self.acc.append(correct)
        self.acc_sum += correct

    def weight(self, floor):
        if not self.acc:
            return 1.0
        return max(self.acc_sum / len(self.acc), floor)


class AdaptiveRandomForest(OnlineClassifier):

    def __init__(self, config=None, seed=0):
        self.config = config if config is not None else ArfConfig()
        self.seed = seed
        subset = self.config.effective_subset()
        self.members = [
            _Member(self._new_tree(i, 0, subset),
                    self.config.warning_delta, self.config.drift_delta,
                    self.config.detectors, self.config.acc_window)
            for i in range(self.config.n_trees)
        ]
        self._poisson_rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([seed, 0x9A15500])))
        self._poisson_buf = None
        self._poisson_pos = 0

    def _new_tree(self, index, generation, subset=None):
        if subset is None:
            subset = self.config.effective_subset()
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([self.seed, index, generation])))
        return HoeffdingAdaptiveTree(self.config.hat, subset_size=subset, rng=rng)

    def _poisson(self):
        if self._poisson_buf is None or self._poisson_pos >= _POISSON_BLOCK:
            self._poisson_buf = self._poisson_rng.poisson(
                self.config.poisson_lambda, _POISSON_BLOCK)
            self._poisson_pos = 0
        k = int(self._poisson_buf[self._poisson_pos])
        self._poisson_pos += 1
        return k

    @staticmethod
    def _weighted_vote(votes, weights):
        total = 0.0
        hot = 0.0
        for v, w in zip(votes, weights):
            total += w
            if v:
                hot += w
        score = hot / total if total > 0 else 0.5
        return (1 if score > 0.5 else 0), score

    def predict(self, fv):
        floor = self.config.weight_floor
        votes = [m.tree.predict_label(fv) for m in self.members]
        weights = [m.weight(floor) for m in self.members]
        return self._weighted_vote(votes, weights)

    def learn(self, fv, label):
        cfg = self.config
        for i, member in enumerate(self.members):
            pred = member.tree.predict_label(fv)
            correct = 1 if pred == label else 0
            member.record_outcome(correct)
            err = 1 - correct
            replaced = False
            if member.warn is not None:
                # Detectors fire on any distribution change in the error
                # stream, including the error falling as the tree matures;
                # only a rising mean counts as warning or drift here.
                warn_before = member.warn.mean()
                if (member.warn.add(err) and member.warn.mean() > warn_before
                        and member.background is None):
                    member.generation += 1
                    member.background = self._new_tree(i, member.generation)
                    member.warn.reset()
                drift_before = member.drift.mean()
                if member.drift.add(err) and member.drift.mean() > drift_before:
                    if member.background is not None:
                        member.tree = member.background
                    else:
                        member.generation += 1
                        member.tree = self._new_tree(i, member.generation)
                    member.background = None
                    member.warn.reset()
                    member.drift.reset()
                    member.acc.clear()
                    member.acc_sum = 0
                    replaced = True
            k = 1 if cfg.poisson_lambda is None else self._poisson()
            if k > 0:
                w = float(k)
                member.tree.learn(fv, label, w, pred_hint=-1 if replaced else pred)
                if member.background is not None:
                    member.background.learn(fv, label, w)
