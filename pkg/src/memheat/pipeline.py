"""The replay pipeline: predict on arrival, label on queue exit, learn.

Per record, in order: features are extracted, the learner predicts, the
page's sketch counters are incremented and the entry joins a fixed-capacity
FIFO. Once the queue is full every new arrival pushes out the oldest entry,
whose heat is read from the sketch (before its counters are decremented, so
an entry's own in-window accesses count toward its heat). The exit heat
joins a recent-heats window; the entry is labeled hot when its heat reaches
the current percentile threshold of that window. The delayed label then
drives tier migration, trains the learner against the prediction made a
full queue ago, and updates the metrics.

Ground truth (sketch heats, percentile threshold, tier dynamics) depends
only on the trace and the labeling configuration, never on the learner's
predictions, so pipelines running different learners over the same trace
score against identical labels. That is what makes paired comparisons and
the frozen-vs-online experiment meaningful.
"""

import math
from collections import deque

from .baseline import TwoQ
from .config import PipelineConfig
from .features import ExtractorState, extract
from .kernels import Fenwick, mix64
from .learners import (AdaptiveRandomForest, ArfConfig, HatConfig,
                       HoeffdingAdaptiveTree, NaiveBayes)
from .metrics import ConfusionMatrix, WindowedSeries
from .sketch import CountMinSketch
from .threshold import CpuSource, ThresholdState, TierModel, update_threshold

METRICS_WINDOW = 1000


class PipelineError(Exception):
    pass


class EmptyWindow(PipelineError):
    pass


class PendingEntry:
    __slots__ = ("page_id", "features", "predicted", "seq", "size")

    def __init__(self, page_id, features, predicted, seq, size):
        self.page_id = page_id
        self.features = features
        self.predicted = predicted
        self.seq = seq
        self.size = size


class LabeledOutcome:
    __slots__ = ("seq", "page_id", "predicted", "actual", "heat")

    def __init__(self, seq, page_id, predicted, actual, heat):
        self.seq = seq
        self.page_id = page_id
        self.predicted = predicted
        self.actual = actual
        self.heat = heat


class EvalQueue:
    """Fixed-capacity FIFO; pushing onto a full queue returns the evictee."""

    __slots__ = ("capacity", "_items")

    def __init__(self, capacity):
        self.capacity = capacity
        self._items = deque()

    def push(self, entry):
        items = self._items
        items.append(entry)
        if len(items) > self.capacity:
            return items.popleft()
        return None

    def __len__(self):
        return len(self._items)


class ExitHeatWindow:
    """Last ``size`` exit heats with O(log n) order statistics."""

    __slots__ = ("size", "min_fill", "max_heat", "_heats", "_fenwick")

    def __init__(self, size=1024, min_fill=64, max_heat=1 << 20):
        self.size = size
        self.min_fill = min_fill
        self.max_heat = max_heat
        self._heats = deque()
        self._fenwick = Fenwick(max_heat + 1)

    def push(self, heat):
        if heat > self.max_heat:
            raise PipelineError(f"exit heat {heat} exceeds window bound {self.max_heat}")
        if len(self._heats) >= self.size:
            self._fenwick.add(self._heats.popleft(), -1)
        self._heats.append(heat)
        self._fenwick.add(heat, 1)

    def __len__(self):
        return len(self._heats)

    def percentile(self, p):
        n = len(self._heats)
        if n == 0:
            raise EmptyWindow("percentile of an empty window")
        rank = max(1, math.ceil(p * n))
        return self._fenwick.kth(rank)


def percentile(window, p):
    """Nearest-rank percentile: the ceil(p*n)-th smallest heat, rank floor 1."""
    return window.percentile(p)


def label_heat(heat, window, p):
    """Hot iff ``heat`` reaches the percentile threshold of recent exits.

    With fewer than ``min_fill`` recorded exits the threshold is floored at
    1 (any in-window re-access counts as hot) to avoid labeling everything
    hot off an empty window.
    """
    n = len(window)
    if n == 0:
        threshold = 1
    elif n < window.min_fill:
        threshold = max(window.percentile(p), 1)
    else:
        threshold = window.percentile(p)
    return 1 if heat >= threshold else 0


# ---------------------------------------------------------------------------
# Predictor seam: online classifiers and the 2Q baseline share the loop
# ---------------------------------------------------------------------------

class _ClassifierPredictor:
    __slots__ = ("clf",)

    def __init__(self, clf):
        self.clf = clf

    def predict(self, page_id, fv):
        return self.clf.predict(fv)

    def learn(self, fv, label):
        self.clf.learn(fv, label)


class _TwoQPredictor:
    __slots__ = ("twoq",)

    def __init__(self, twoq):
        self.twoq = twoq

    def predict(self, page_id, fv):
        label = self.twoq.access(page_id)
        return label, float(label)

    def learn(self, fv, label):
        pass


def build_predictor(learner_cfg, queue_capacity, seed):
    name = learner_cfg.name
    p = learner_cfg.params
    if name == "nb":
        return _ClassifierPredictor(NaiveBayes(**p))
    if name == "hat":
        return _ClassifierPredictor(HoeffdingAdaptiveTree(HatConfig(**p)))
    if name == "arf":
        hat_keys = ("grace_period", "split_delta", "tie_tau", "swap_delta", "max_leaves")
        hat_kwargs = {k: p[k] for k in hat_keys if k in p}
        if "hat_drift_delta" in p:
            hat_kwargs["drift_delta"] = p["hat_drift_delta"]
        arf_kwargs = {k: p[k] for k in
                      ("poisson_lambda", "warning_delta", "drift_delta",
                       "subset_size", "acc_window", "weight_floor", "detectors")
                      if k in p}
        if "trees" in p:
            arf_kwargs["n_trees"] = p["trees"]
        cfg = ArfConfig(hat=HatConfig(**hat_kwargs), **arf_kwargs)
        return _ClassifierPredictor(AdaptiveRandomForest(cfg, seed=seed))
    if name == "lru2q":
        k_in = p.get("k_in") or max(1, queue_capacity // 4)
        k_am = p.get("k_am") or max(1, queue_capacity // 2)
        k_out = p.get("k_out") or max(1, queue_capacity // 2)
        return _TwoQPredictor(TwoQ(k_in, k_am, k_out,
                                   a1in_counts_hot=p.get("a1in_counts_hot", False)))
    raise ValueError(f"unknown learner {name!r}")


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

class Pipeline:

    def __init__(self, config: PipelineConfig):
        config.validate()
        self.config = config
        self.page_shift = config.page_size_log2
        sketch_seed = config.sketch.seed
        if sketch_seed is None:
            sketch_seed = mix64(config.seed + 0x5EED)
        self.sketch = CountMinSketch(config.sketch.depth, config.sketch.width,
                                     seed=sketch_seed)
        self.queue = EvalQueue(config.queue.capacity)
        self.exit_window = ExitHeatWindow(config.queue.exit_window,
                                          config.queue.min_fill,
                                          max_heat=config.queue.capacity + 1)
        self.threshold_config = config.threshold
        self.threshold_state = ThresholdState(p=config.threshold.initial_p())
        self.tier = TierModel(config.threshold.hot_capacity_pages)
        self.cpu_source = CpuSource(**config.cpu_source)
        self.extractor = ExtractorState()
        self.predictor = build_predictor(config.learner, config.queue.capacity,
                                         config.seed)
        self.confusion = ConfusionMatrix()
        self.windows = WindowedSeries(METRICS_WINDOW)
        self.window_rows = []
        self.sys_state = (0.0, 0.0, 0.0)
        self.last_snapshot = None
        self.records_processed = 0
        self.labeled_count = 0
        self.learning_enabled = True

    def process(self, record):
        """Run one record through the pipeline; returns an outcome when an
        entry leaves the queue, None while the queue is still filling."""
        page_id = record.addr >> self.page_shift
        fv = extract(record, self.sys_state, self.extractor, self.page_shift)
        predicted, _score = self.predictor.predict(page_id, fv)
        self.sketch.increment(page_id)
        evicted = self.queue.push(
            PendingEntry(page_id, fv, predicted, record.seq, record.size))

        outcome = None
        if evicted is not None:
            heat = self.sketch.estimate(evicted.page_id)
            self.sketch.decrement(evicted.page_id)
            self.exit_window.push(heat)
            actual = label_heat(heat, self.exit_window, self.threshold_state.p)
            self.tier.apply(evicted.page_id, actual, evicted.size)
            if self.learning_enabled:
                self.predictor.learn(evicted.features, actual)
            self.confusion.update(evicted.predicted, actual)
            row = self.windows.update(evicted.predicted, actual, evicted.seq)
            if row is not None:
                snap = self.last_snapshot
                self.window_rows.append({
                    "start_seq": row["start_seq"],
                    "accuracy": row["accuracy"],
                    "f1": row["f1"],
                    "p": self.threshold_state.p,
                    "slow_band_rate": snap.slow_band_rate if snap else 0.0,
                    "pingpong": snap.pingpong_dis if snap else 0,
                })
            self.labeled_count += 1
            outcome = LabeledOutcome(evicted.seq, evicted.page_id,
                                     evicted.predicted, actual, heat)

        self.records_processed += 1
        if self.records_processed % self.threshold_config.period == 0:
            snap = self.tier.snapshot_window(self.cpu_source)
            self.last_snapshot = snap
            self.sys_state = (snap.slow_band_rate,
                              snap.pingpong_dis / self.threshold_config.period,
                              snap.cpu_rate)
            update_threshold(self.threshold_state, self.threshold_config, snap)
        return outcome

    def run(self, records):
        for record in records:
            self.process(record)

    def report(self):
        labeled = self.labeled_count
        rep = {
            "learner": self.config.learner.name,
            "records": self.records_processed,
            "labeled": labeled,
            "final_p": self.threshold_state.p,
        }
        if labeled > 0:
            rep.update(self.confusion.scores())
        else:
            rep.update({"accuracy": None, "precision": None,
                        "recall": None, "f1": None})
            rep["note"] = "no labeled outcomes: trace shorter than queue capacity"
        rep["confusion"] = self.confusion.counts()
        rep["windows"] = list(self.window_rows)
        return rep
