"""Pure-Python kernels.

These classes implement the numeric inner loops of the pipeline: sketch
counter updates, per-class Gaussian sufficient statistics, the adaptive
windowing change detector and a Fenwick tree for order statistics. A
compiled twin lives in ``_core.pyx`` with the same API and, operation by
operation, the same floating-point evaluation order, so both backends
produce identical results and can be swapped freely.
"""

import math

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15

# CmsKernel.add status codes
CMS_OK = 0
CMS_OVERFLOW = 1
CMS_UNDERFLOW = 2

_UINT32_MAX = 0xFFFFFFFF
_LOG_2PI = math.log(2.0 * math.pi)


def mix64(x):
    """SplitMix-style 64-bit scramble used to derive seeds and hash inputs."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


class CmsKernel:
    """Counter-matrix operations for a count-min sketch.

    Operates on caller-owned storage: ``counters`` is a (depth, width)
    uint32 array, ``seeds`` one odd 64-bit multiplier per row. Row index
    for a key is the high half of ``seed * (key + 1) mod 2^64`` reduced
    modulo the width, i.e. a multiply-shift hash that works for any width.
    """

    __slots__ = ("counters", "seeds", "depth", "width")

    def __init__(self, counters, seeds):
        self.counters = counters
        self.seeds = [int(s) for s in seeds]
        self.depth = counters.shape[0]
        self.width = counters.shape[1]

    def _index(self, d, key):
        h = (self.seeds[d] * ((key + 1) & MASK64)) & MASK64
        return (h >> 32) % self.width

    def add(self, key, delta):
        """Apply +/-delta to every mapped counter, or change nothing.

        Returns CMS_OK, or CMS_OVERFLOW / CMS_UNDERFLOW when any mapped
        counter would leave the uint32 range; the matrix is untouched then.
        """
        counters = self.counters
        idxs = [self._index(d, key) for d in range(self.depth)]
        if delta > 0:
            for d, i in enumerate(idxs):
                if counters[d, i] > _UINT32_MAX - delta:
                    return CMS_OVERFLOW
        else:
            for d, i in enumerate(idxs):
                if counters[d, i] < -delta:
                    return CMS_UNDERFLOW
        for d, i in enumerate(idxs):
            counters[d, i] = int(counters[d, i]) + delta
        return CMS_OK

    def estimate(self, key):
        counters = self.counters
        best = -1
        for d in range(self.depth):
            v = int(counters[d, self._index(d, key)])
            if best < 0 or v < best:
                best = v
        return best


class ClassGaussians:
    """Per-class, per-feature Welford statistics over a fixed feature count.

    ``stats`` is caller-owned with shape (2, n_features, 3) holding
    (weight, mean, m2) per class/feature. The class weight is identical
    across features of one class because features update together.
    """

    __slots__ = ("stats", "n_features")

    def __init__(self, stats):
        self.stats = stats
        self.n_features = stats.shape[1]

    def update(self, cls, values, weight):
        stats = self.stats
        for f in range(self.n_features):
            n = stats[cls, f, 0] + weight
            delta = values[f] - stats[cls, f, 1]
            mean = stats[cls, f, 1] + delta * weight / n
            stats[cls, f, 0] = n
            stats[cls, f, 1] = mean
            stats[cls, f, 2] += weight * delta * (values[f] - mean)

    def loglik(self, values, var_floor):
        """Joint Gaussian log-likelihood of ``values`` under each class.

        A class with no observed weight contributes 0 so that priors alone
        decide; single-observation classes fall back to the variance floor.
        """
        out = [0.0, 0.0]
        stats = self.stats
        for cls in (0, 1):
            n = stats[cls, 0, 0]
            if n <= 0.0:
                continue
            total = 0.0
            for f in range(self.n_features):
                var = stats[cls, f, 2] / n
                if var < var_floor:
                    var = var_floor
                d = values[f] - stats[cls, f, 1]
                total += -0.5 * (_LOG_2PI + math.log(var)) - (d * d) / (2.0 * var)
            out[cls] = total
        return out[0], out[1]


class Adwin:
    """Adaptive-window mean-change detector over a 0/1 (or real) stream.

    Keeps an exponential histogram: level ``r`` buckets each summarize
    2^r observations, at most ``max_buckets``+1 per level. Every
    ``min_clock`` insertions the window is scanned from its oldest bucket;
    whenever some prefix/suffix split has a mean difference above the
    delta-dependent cut threshold, the oldest bucket is dropped. ``add``
    returns True when anything was dropped.
    """

    _ROWS = 28  # level capacity; supports windows beyond 5 * 2^27 items

    def __init__(self, delta=0.002, max_buckets=5, min_clock=32,
                 min_window=10, min_subwindow=5):
        self.delta = delta
        self.max_buckets = max_buckets
        self.min_clock = min_clock
        self.min_window = min_window
        self.min_subwindow = min_subwindow
        self.reset()

    def reset(self):
        slots = self.max_buckets + 1
        self._sum = [[0.0] * slots for _ in range(self._ROWS)]
        self._var = [[0.0] * slots for _ in range(self._ROWS)]
        self._cnt = [0] * self._ROWS
        self._last_row = 0
        self.time = 0
        self.width = 0
        self.total = 0.0
        self.variance = 0.0

    def mean(self):
        return self.total / self.width if self.width > 0 else 0.0

    def add(self, value):
        self.time += 1
        self._insert(value)
        return self._reduce()

    # -- exponential histogram maintenance -------------------------------

    def _insert(self, value):
        row_sum = self._sum[0]
        row_var = self._var[0]
        k = self._cnt[0]
        row_sum[k] = value
        row_var[k] = 0.0
        self._cnt[0] = k + 1
        if self.width > 0:
            mean = self.total / self.width
            self.variance += self.width * (value - mean) * (value - mean) / (self.width + 1)
        self.width += 1
        self.total += value
        self._compress()

    def _compress(self):
        r = 0
        while r < self._ROWS:
            if self._cnt[r] != self.max_buckets + 1:
                break
            if r + 1 == self._ROWS:
                # Out of levels (windows beyond design capacity): drop the
                # oldest pair instead of growing. Unreachable in practice.
                self._drop_oldest()
                break
            if r + 1 > self._last_row:
                self._last_row = r + 1
            n_part = float(1 << r)
            s = self._sum[r]
            v = self._var[r]
            mean1 = s[0] / n_part
            mean2 = s[1] / n_part
            merged_sum = s[0] + s[1]
            merged_var = v[0] + v[1] + n_part * n_part * (mean1 - mean2) * (mean1 - mean2) / (n_part + n_part)
            nxt = self._cnt[r + 1]
            self._sum[r + 1][nxt] = merged_sum
            self._var[r + 1][nxt] = merged_var
            self._cnt[r + 1] = nxt + 1
            self._pop_front(r, 2)
            if self._cnt[r + 1] <= self.max_buckets:
                break
            r += 1

    def _pop_front(self, row, k):
        s = self._sum[row]
        v = self._var[row]
        cnt = self._cnt[row]
        for i in range(k, cnt):
            s[i - k] = s[i]
            v[i - k] = v[i]
        for i in range(cnt - k, cnt):
            s[i] = 0.0
            v[i] = 0.0
        self._cnt[row] = cnt - k

    def _drop_oldest(self):
        """Remove the oldest bucket (front of the deepest populated row)."""
        row = self._last_row
        n_drop = 1 << row
        s = self._sum[row][0]
        v = self._var[row][0]
        self.width -= n_drop
        self.total -= s
        if self.width > 0:
            mean_drop = s / n_drop
            d = mean_drop - self.total / self.width
            inc = v + n_drop * self.width * d * d / (n_drop + self.width)
            self.variance -= inc
            if self.variance < 0.0:
                self.variance = 0.0
        else:
            self.variance = 0.0
        self._pop_front(row, 1)
        if self._cnt[row] == 0 and row > 0:
            self._last_row = row - 1
        return n_drop

    # -- change detection --------------------------------------------------

    def _cut_threshold(self, n0, n1):
        msub = self.min_subwindow
        m = 1.0 / (n0 - msub + 1) + 1.0 / (n1 - msub + 1)
        d = math.log(2.0 * math.log(self.width) / self.delta)
        var_w = self.variance / self.width
        return math.sqrt(2.0 * m * var_w * d) + (2.0 / 3.0) * m * d

    def _reduce(self):
        if self.time % self.min_clock != 0 or self.width <= self.min_window:
            return False
        changed = False
        reducing = True
        while reducing:
            reducing = False
            n0 = 0.0
            s0 = 0.0
            done = False
            for row in range(self._last_row, -1, -1):
                cnt = self._cnt[row]
                size = float(1 << row)
                for b in range(cnt):
                    if row == 0 and b == cnt - 1:
                        done = True
                        break
                    n0 += size
                    s0 += self._sum[row][b]
                    n1 = self.width - n0
                    if n0 > self.min_subwindow + 1 and n1 > self.min_subwindow + 1:
                        diff = s0 / n0 - (self.total - s0) / n1
                        if abs(diff) > self._cut_threshold(n0, n1):
                            changed = True
                            if self.width > 0:
                                self._drop_oldest()
                                reducing = True
                                done = True
                                break
                if done:
                    break
        return changed


class Fenwick:
    """Binary indexed tree over integer bins, supporting k-th order statistics.

    ``add(i, d)`` adjusts the count of bin ``i``; ``kth(k)`` returns the
    smallest bin whose cumulative count reaches ``k`` (1-based rank).
    """

    __slots__ = ("size", "_tree", "_top")

    def __init__(self, size):
        self.size = size
        self._tree = [0] * (size + 1)
        top = 1
        while top * 2 <= size:
            top *= 2
        self._top = top

    def add(self, index, delta):
        i = index + 1
        tree = self._tree
        while i <= self.size:
            tree[i] += delta
            i += i & (-i)

    def kth(self, k):
        pos = 0
        rem = k
        mask = self._top
        tree = self._tree
        while mask > 0:
            nxt = pos + mask
            if nxt <= self.size and tree[nxt] < rem:
                pos = nxt
                rem -= tree[nxt]
            mask >>= 1
        return pos  # bin index (0-based): pos+1 in tree coords minus 1
