# cython: language_level=3
"""Compiled kernels.

Twin of ``_pure``: identical class APIs and, deliberately, an identical
floating-point operation order so both backends produce bit-equal results
(the extension is built without -ffast-math for the same reason). Keep the
two files in sync; the parity tests compare them operation by operation.
"""

from libc.math cimport fabs, log, log2, sqrt

import numpy as np


MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15

CMS_OK = 0
CMS_OVERFLOW = 1
CMS_UNDERFLOW = 2

cdef double _LOG_2PI = log(2.0 * 3.141592653589793)

DEF ADWIN_ROWS = 28
DEF ADWIN_SLOTS = 8  # max_buckets+1 per level, capped (default 5+1)


def mix64(x):
    """SplitMix-style 64-bit scramble used to derive seeds and hash inputs."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


cdef class CmsKernel:
    """Counter-matrix operations for a count-min sketch (see _pure)."""

    cdef unsigned int[:, ::1] _counters
    cdef unsigned long long[::1] _seeds
    cdef Py_ssize_t depth, width
    cdef public object counters
    cdef public object seeds

    def __init__(self, counters, seeds):
        self.counters = counters
        self.seeds = seeds
        self._counters = counters
        self._seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
        self.depth = counters.shape[0]
        self.width = counters.shape[1]

    cdef inline Py_ssize_t _index(self, Py_ssize_t d, unsigned long long key):
        cdef unsigned long long h = self._seeds[d] * (key + 1)
        return <Py_ssize_t>((h >> 32) % <unsigned long long>self.width)

    cpdef int add(self, unsigned long long key, int delta):
        cdef Py_ssize_t d, i
        cdef Py_ssize_t idxs[64]
        if delta > 0:
            for d in range(self.depth):
                i = self._index(d, key)
                idxs[d] = i
                if self._counters[d, i] > <unsigned int>(0xFFFFFFFF - delta):
                    return CMS_OVERFLOW
        else:
            for d in range(self.depth):
                i = self._index(d, key)
                idxs[d] = i
                if self._counters[d, i] < <unsigned int>(-delta):
                    return CMS_UNDERFLOW
        for d in range(self.depth):
            self._counters[d, idxs[d]] = <unsigned int>(
                <long long>self._counters[d, idxs[d]] + delta)
        return CMS_OK

    cpdef long long estimate(self, unsigned long long key):
        cdef long long best = -1
        cdef long long v
        cdef Py_ssize_t d
        for d in range(self.depth):
            v = <long long>self._counters[d, self._index(d, key)]
            if best < 0 or v < best:
                best = v
        return best


cdef class ClassGaussians:
    """Per-class, per-feature Welford statistics (see _pure)."""

    cdef double[:, :, ::1] _stats
    cdef Py_ssize_t n_features
    cdef public object stats

    def __init__(self, stats):
        self.stats = stats
        self._stats = stats
        self.n_features = stats.shape[1]

    cpdef update(self, Py_ssize_t cls, double[::1] values, double weight):
        cdef Py_ssize_t f
        cdef double n, delta, mean
        for f in range(self.n_features):
            n = self._stats[cls, f, 0] + weight
            delta = values[f] - self._stats[cls, f, 1]
            mean = self._stats[cls, f, 1] + delta * weight / n
            self._stats[cls, f, 0] = n
            self._stats[cls, f, 1] = mean
            self._stats[cls, f, 2] += weight * delta * (values[f] - mean)

    cpdef tuple loglik(self, double[::1] values, double var_floor):
        cdef double out0 = 0.0
        cdef double out1 = 0.0
        cdef double total, n, var, d
        cdef Py_ssize_t cls, f
        for cls in range(2):
            n = self._stats[cls, 0, 0]
            if n <= 0.0:
                continue
            total = 0.0
            for f in range(self.n_features):
                var = self._stats[cls, f, 2] / n
                if var < var_floor:
                    var = var_floor
                d = values[f] - self._stats[cls, f, 1]
                total += -0.5 * (_LOG_2PI + log(var)) - (d * d) / (2.0 * var)
            if cls == 0:
                out0 = total
            else:
                out1 = total
        return out0, out1


cdef class Adwin:
    """Adaptive-window mean-change detector (see _pure for the algorithm)."""

    cdef public double delta
    cdef public int max_buckets, min_clock, min_window, min_subwindow
    cdef double _sum[ADWIN_ROWS][ADWIN_SLOTS]
    cdef double _var[ADWIN_ROWS][ADWIN_SLOTS]
    cdef int _cnt[ADWIN_ROWS]
    cdef int _last_row
    cdef public long long time
    cdef public long long width
    cdef public double total
    cdef public double variance

    def __init__(self, double delta=0.002, int max_buckets=5, int min_clock=32,
                 int min_window=10, int min_subwindow=5):
        if max_buckets + 1 > ADWIN_SLOTS:
            raise ValueError(f"max_buckets must be <= {ADWIN_SLOTS - 1}")
        self.delta = delta
        self.max_buckets = max_buckets
        self.min_clock = min_clock
        self.min_window = min_window
        self.min_subwindow = min_subwindow
        self.reset()

    cpdef reset(self):
        cdef Py_ssize_t r, b
        for r in range(ADWIN_ROWS):
            self._cnt[r] = 0
            for b in range(ADWIN_SLOTS):
                self._sum[r][b] = 0.0
                self._var[r][b] = 0.0
        self._last_row = 0
        self.time = 0
        self.width = 0
        self.total = 0.0
        self.variance = 0.0

    cpdef double mean(self):
        return self.total / self.width if self.width > 0 else 0.0

    cpdef bint add(self, double value):
        self.time += 1
        self._insert(value)
        return self._reduce()

    cdef void _insert(self, double value):
        cdef int k = self._cnt[0]
        cdef double mean
        self._sum[0][k] = value
        self._var[0][k] = 0.0
        self._cnt[0] = k + 1
        if self.width > 0:
            mean = self.total / self.width
            self.variance += self.width * (value - mean) * (value - mean) / (self.width + 1)
        self.width += 1
        self.total += value
        self._compress()

    cdef void _compress(self):
        cdef int r = 0
        cdef int nxt, i, cnt
        cdef double n_part, mean1, mean2, merged_sum, merged_var
        while r < ADWIN_ROWS:
            if self._cnt[r] != self.max_buckets + 1:
                break
            if r + 1 == ADWIN_ROWS:
                self._drop_oldest()
                break
            if r + 1 > self._last_row:
                self._last_row = r + 1
            n_part = <double>(1 << r)
            mean1 = self._sum[r][0] / n_part
            mean2 = self._sum[r][1] / n_part
            merged_sum = self._sum[r][0] + self._sum[r][1]
            merged_var = (self._var[r][0] + self._var[r][1]
                          + n_part * n_part * (mean1 - mean2) * (mean1 - mean2)
                          / (n_part + n_part))
            nxt = self._cnt[r + 1]
            self._sum[r + 1][nxt] = merged_sum
            self._var[r + 1][nxt] = merged_var
            self._cnt[r + 1] = nxt + 1
            self._pop_front(r, 2)
            if self._cnt[r + 1] <= self.max_buckets:
                break
            r += 1

    cdef void _pop_front(self, int row, int k):
        cdef int cnt = self._cnt[row]
        cdef int i
        for i in range(k, cnt):
            self._sum[row][i - k] = self._sum[row][i]
            self._var[row][i - k] = self._var[row][i]
        for i in range(cnt - k, cnt):
            self._sum[row][i] = 0.0
            self._var[row][i] = 0.0
        self._cnt[row] = cnt - k

    cdef long long _drop_oldest(self):
        cdef int row = self._last_row
        cdef long long n_drop = <long long>1 << row
        cdef double s = self._sum[row][0]
        cdef double v = self._var[row][0]
        cdef double mean_drop, d, inc
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

    cdef double _cut_threshold(self, double n0, double n1):
        cdef double m = (1.0 / (n0 - self.min_subwindow + 1)
                         + 1.0 / (n1 - self.min_subwindow + 1))
        cdef double d = log(2.0 * log(<double>self.width) / self.delta)
        cdef double var_w = self.variance / self.width
        return sqrt(2.0 * m * var_w * d) + (2.0 / 3.0) * m * d

    cdef bint _reduce(self):
        cdef bint changed = False
        cdef bint reducing = True
        cdef bint done
        cdef int row, b, cnt
        cdef double n0, s0, n1, diff, size
        if self.time % self.min_clock != 0 or self.width <= self.min_window:
            return False
        while reducing:
            reducing = False
            n0 = 0.0
            s0 = 0.0
            done = False
            for row in range(self._last_row, -1, -1):
                cnt = self._cnt[row]
                size = <double>(1 << row)
                for b in range(cnt):
                    if row == 0 and b == cnt - 1:
                        done = True
                        break
                    n0 += size
                    s0 += self._sum[row][b]
                    n1 = self.width - n0
                    if n0 > self.min_subwindow + 1 and n1 > self.min_subwindow + 1:
                        diff = s0 / n0 - (self.total - s0) / n1
                        if fabs(diff) > self._cut_threshold(n0, n1):
                            changed = True
                            if self.width > 0:
                                self._drop_oldest()
                                reducing = True
                                done = True
                                break
                if done:
                    break
        return changed


cdef class Fenwick:
    """Binary indexed tree with k-th order statistic (see _pure)."""

    cdef long long[::1] _tree
    cdef public Py_ssize_t size
    cdef Py_ssize_t _top
    cdef object _buf

    def __init__(self, Py_ssize_t size):
        self.size = size
        self._buf = np.zeros(size + 1, dtype=np.int64)
        self._tree = self._buf
        cdef Py_ssize_t top = 1
        while top * 2 <= size:
            top *= 2
        self._top = top

    cpdef add(self, Py_ssize_t index, long long delta):
        cdef Py_ssize_t i = index + 1
        while i <= self.size:
            self._tree[i] += delta
            i += i & (-i)

    cpdef Py_ssize_t kth(self, long long k):
        cdef Py_ssize_t pos = 0
        cdef long long rem = k
        cdef Py_ssize_t mask = self._top
        cdef Py_ssize_t nxt
        while mask > 0:
            nxt = pos + mask
            if nxt <= self.size and self._tree[nxt] < rem:
                pos = nxt
                rem -= self._tree[nxt]
            mask >>= 1
        return pos
