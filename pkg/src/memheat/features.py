"""Per-access feature extraction.

Each record is turned into six numeric features plus two categoricals:

* data flow: signed-log address delta, log operation size, an 8-bit
  multiplicative-hash page bucket (locality grouping without letting a
  learner memorize absolute addresses),
* control flow: signed-log pc delta and the operation type,
* system state: slow-tier bandwidth share, thrashing rate and migration
  CPU share copied from the most recent tier snapshot.

Deltas are tracked per thread, otherwise interleaved threads would destroy
stride signal. Raw deltas span 40+ bits, hence the signed log2 transform:
sign(d) * log2(1 + |d|) keeps them on a bounded scale for the learners.
"""

import math

import numpy as np

_BUCKET_MULT = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1

# Numeric feature slots (FeatureVector.num indices).
F_ADDR_DELTA = 0
F_PC_DELTA = 1
F_SIZE = 2
F_SLOW_BAND = 3
F_PINGPONG = 4
F_CPU = 5
NUM_FEATURES = 6

# Categorical feature ids used by tree split selection.
CAT_OP = 6
CAT_BUCKET = 7
TOTAL_FEATURES = 8

FEATURE_NAMES = (
    "addr_delta_log", "pc_delta_log", "size_log",
    "slow_band_rate", "pingpong_rate", "cpu_rate",
    "op_type", "page_bucket",
)


def signed_log2(delta):
    if delta >= 0:
        return math.log2(1.0 + delta)
    return -math.log2(1.0 - delta)


def page_bucket(page_id):
    """Stable 8-bit bucket of a page id (top byte of a 64-bit product)."""
    return ((page_id * _BUCKET_MULT) & _MASK64) >> 56


class FeatureVector:
    """Numeric slots plus the two categorical values.

    ``vals`` keeps the six numbers as a plain tuple, which tree routing
    indexes cheaply; ``num`` is the same data as an ndarray for the
    statistics kernels.
    """

    __slots__ = ("num", "vals", "op", "bucket")

    def __init__(self, values, op, bucket):
        self.vals = values
        self.num = np.array(values)
        self.op = op
        self.bucket = bucket

    @property
    def addr_delta_log(self):
        return self.vals[F_ADDR_DELTA]

    @property
    def pc_delta_log(self):
        return self.vals[F_PC_DELTA]

    @property
    def size_log(self):
        return self.vals[F_SIZE]

    @property
    def slow_band_rate(self):
        return self.vals[F_SLOW_BAND]

    @property
    def pingpong_rate(self):
        return self.vals[F_PINGPONG]

    @property
    def cpu_rate(self):
        return self.vals[F_CPU]

    def __repr__(self):
        shown = ", ".join(f"{n}={v:.4g}" for n, v in zip(FEATURE_NAMES, self.vals))
        return f"FeatureVector({shown}, op={self.op}, bucket={self.bucket})"


class ExtractorState:
    """Remembers each thread's previous address and pc for the deltas."""

    __slots__ = ("last",)

    def __init__(self):
        self.last = {}  # tid -> (addr, pc)


def extract(record, sys_state, state, page_shift=12):
    """Build the feature vector for one record and advance the delta state.

    ``sys_state`` is a (slow_band_rate, pingpong_rate, cpu_rate) triple from
    the latest tier snapshot. A thread's first record gets zero deltas.
    """
    prev = state.last.get(record.tid)
    if prev is None:
        d_addr = 0.0
        d_pc = 0.0
    else:
        d_addr = signed_log2(record.addr - prev[0])
        d_pc = signed_log2(record.pc - prev[1])
    state.last[record.tid] = (record.addr, record.pc)
    values = (d_addr, d_pc, math.log2(1.0 + record.size),
              sys_state[0], sys_state[1], sys_state[2])
    return FeatureVector(values, int(record.op), page_bucket(record.addr >> page_shift))
