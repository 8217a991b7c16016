"""Online classifiers trained one labeled instance at a time."""

from .base import OnlineClassifier
from .bayes import GaussianStat, NaiveBayes
from .adwin import AdwinDetector, adwin_update
from .hoeffding import HoeffdingAdaptiveTree, HatConfig, hoeffding_bound
from .forest import AdaptiveRandomForest, ArfConfig

__all__ = [
    "OnlineClassifier", "GaussianStat", "NaiveBayes",
    "AdwinDetector", "adwin_update",
    "HoeffdingAdaptiveTree", "HatConfig", "hoeffding_bound",
    "AdaptiveRandomForest", "ArfConfig",
]
