"""Count-min sketch over page ids, used as a sliding-window heat counter.

A depth x width matrix of uint32 counters with one hash function per row.
Incrementing bumps every mapped counter; the estimate for a key is the
minimum over its mapped counters, which can only overestimate the true
count. The pipeline pairs every increment (on queue entry) with a later
decrement (on queue exit), so the sketch tracks counts *within the
evaluation window* rather than all-time totals. Updates are plain rather
than conservative: conservative update would break the exact pairing that
decrements rely on.
"""

import numpy as np

from .kernels import (CMS_OVERFLOW, CMS_UNDERFLOW, GOLDEN64, CmsKernel,
                      mix64)

DEFAULT_DEPTH = 4
DEFAULT_WIDTH = 2048


class SketchError(Exception):
    pass


class CounterOverflow(SketchError):
    """A counter would exceed 32 bits; the window is misconfigured."""


class CounterUnderflow(SketchError):
    """A decrement without a matching increment; a pairing bug, not data."""


def row_seeds(master_seed, depth):
    """Odd 64-bit multiply-shift constants derived from the master seed."""
    return np.array([mix64(master_seed + d * GOLDEN64) | 1 for d in range(depth)],
                    dtype=np.uint64)


class CountMinSketch:
    def __init__(self, depth=DEFAULT_DEPTH, width=DEFAULT_WIDTH, seed=0):
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        if width < 2:
            raise ValueError(f"width must be >= 2, got {width}")
        self.depth = depth
        self.width = width
        self.seed = seed
        self.counters = np.zeros((depth, width), dtype=np.uint32)
        self.row_seeds = row_seeds(seed, depth)
        self._kernel = CmsKernel(self.counters, self.row_seeds)

    def increment(self, page_id):
        status = self._kernel.add(page_id, 1)
        if status == CMS_OVERFLOW:
            raise CounterOverflow(f"counter overflow incrementing page {page_id:#x}")

    def decrement(self, page_id):
        status = self._kernel.add(page_id, -1)
        if status == CMS_UNDERFLOW:
            raise CounterUnderflow(f"decrement of page {page_id:#x} without matching increment")

    def estimate(self, page_id):
        return self._kernel.estimate(page_id)

    def row_index(self, d, page_id):
        """Slot of ``page_id`` in row ``d`` (exposed for collision tests)."""
        h = (int(self.row_seeds[d]) * ((page_id + 1) & ((1 << 64) - 1))) & ((1 << 64) - 1)
        return (h >> 32) % self.width
