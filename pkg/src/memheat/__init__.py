"""Online hot/cold memory-page classification over access traces.

The pipeline predicts a page's heat class the moment an access arrives,
defers the ground-truth label by a fixed-capacity FIFO window, reads the
realized heat from a count-min sketch on exit, labels it against a
dynamically tuned percentile threshold, and feeds the label back into the
online learner. See the README for the CLI and configuration surface.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
