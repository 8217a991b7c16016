"""Streaming classification metrics and the paired significance test.

Hot is the positive class throughout. Windowed series recompute their
scores from per-window confusion counts (not running averages) so that
windows form independent pairs for the t-test.
"""

import math

from scipy.special import betainc


class MetricsError(Exception):
    pass


class EmptyMatrix(MetricsError):
    pass


class LengthMismatch(MetricsError):
    pass


class TooShort(MetricsError):
    pass


class ConfusionMatrix:
    __slots__ = ("tp", "fp", "tn", "fn")

    def __init__(self):
        self.tp = 0
        self.fp = 0
        self.tn = 0
        self.fn = 0

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def update(self, predicted, actual):
        if predicted:
            if actual:
                self.tp += 1
            else:
                self.fp += 1
        else:
            if actual:
                self.fn += 1
            else:
                self.tn += 1

    def scores(self):
        total = self.total
        if total == 0:
            raise EmptyMatrix("no outcomes recorded")
        accuracy = (self.tp + self.tn) / total
        precision = self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0
        recall = self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return {"accuracy": accuracy, "precision": precision,
                "recall": recall, "f1": f1}

    def counts(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


class WindowedSeries:
    """Non-overlapping windows of labeled outcomes with per-window scores.

    ``update`` returns the completed row when its call closes a window,
    otherwise None. Rows carry the seq of the window's first outcome.
    """

    def __init__(self, window_size=1000):
        self.window_size = window_size
        self.rows = []
        self._window = ConfusionMatrix()
        self._start_seq = None

    def update(self, predicted, actual, seq):
        if self._start_seq is None:
            self._start_seq = seq
        self._window.update(predicted, actual)
        if self._window.total >= self.window_size:
            scores = self._window.scores()
            row = {"start_seq": self._start_seq,
                   "accuracy": scores["accuracy"], "f1": scores["f1"]}
            self.rows.append(row)
            self._window = ConfusionMatrix()
            self._start_seq = None
            return row
        return None

    @property
    def accuracy_series(self):
        return [r["accuracy"] for r in self.rows]

    @property
    def f1_series(self):
        return [r["f1"] for r in self.rows]


def student_t_two_tailed(t, df):
    """Two-tailed p for Student's t via the regularized incomplete beta."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def paired_t_test(a, b):
    """Paired t-test of two equal-length series.

    Returns {t, p_value, n, degenerate}. Zero-variance differences are a
    declared convention rather than an error: t = 0 and p = 1 when the mean
    difference is zero too, otherwise p = 0 with the degenerate flag set.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"series lengths differ: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise TooShort(f"need at least 2 pairs, got {n}")
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    ss = sum((d - mean) ** 2 for d in diffs)
    if ss == 0.0:
        if mean == 0.0:
            return {"t": 0.0, "p_value": 1.0, "n": n, "degenerate": True}
        t = math.inf if mean > 0 else -math.inf
        return {"t": t, "p_value": 0.0, "n": n, "degenerate": True}
    sd = math.sqrt(ss / (n - 1))
    t = mean / (sd / math.sqrt(n))
    return {"t": t, "p_value": student_t_two_tailed(t, n - 1), "n": n,
            "degenerate": False}
