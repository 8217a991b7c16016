"""Adaptive-window drift detector.

The detector keeps a variable-length window of recent 0/1 error bits in
exponential-histogram buckets and shrinks the window whenever two
sub-windows have statistically different means at confidence ``delta``.
The heavy lifting lives in the kernel backend; this module pins the public
name and the functional entry point.
"""

from ..kernels import Adwin as AdwinDetector


def adwin_update(detector, error_bit):
    """Feed one observation; returns True when old data was dropped (drift)."""
    return detector.add(error_bit)


__all__ = ["AdwinDetector", "adwin_update"]
