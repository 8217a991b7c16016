"""Common classifier interface.

``predict`` must be side-effect free; ``learn`` is strictly incremental,
seeing each instance exactly once with no access to the past stream.
"""

from abc import ABC, abstractmethod


class OnlineClassifier(ABC):

    @abstractmethod
    def predict(self, fv):
        """Return (label, hot_score) with hot_score in [0, 1]."""

    @abstractmethod
    def learn(self, fv, label):
        """Absorb one labeled instance."""
