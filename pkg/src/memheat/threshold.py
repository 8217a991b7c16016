"""Dynamic percentile-threshold tuning and the two-tier memory model.

The labeling threshold is the percentile ``p`` of recent exit heats. Every
period the tuner moves ``p`` using three signals from the simulated tier
model: the share of bytes served by the slow tier, the amount of recent
tier thrashing (ping-pong migrations) and the cpu share attributed to
migration work. ``p`` falls when the slow tier serves too much traffic
(admit more data as hot) and rises when thrashing grows (admit less).

Two readings of the update rule are provided. ``as_written`` multiplies by
(1 + ratio)^alpha, which doubles ``p`` every period at steady state (ratio
1) and drifts to the upper clamp; ``relative_change`` uses the ratio's
change from 1 instead and is neutral at steady state. The latter is the
default, the former is kept for fidelity testing. The cpu-pressure branch
(halve ``p``, floor at p_min) likewise has an inverted alternative behind
``cpu_cap_raises``.
"""

from collections import OrderedDict
from dataclasses import dataclass

HOT_TIER = 1
COLD_TIER = 0


class ThresholdError(Exception):
    pass


@dataclass(slots=True)
class ThresholdConfig:
    p_init: float | None = None  # derived from tier capacities when None
    p_min: float = 0.05
    p_max: float = 0.99
    alpha: float = 1.0  # exponent on the ping-pong term of the update rule
    beta: float = 1.0   # exponent on the slow-bandwidth term
    theta_max: float = 0.8
    period: int = 10_000
    mode: str = "relative_change"  # or "as_written"
    cpu_cap_raises: bool = False
    hot_capacity_pages: int = 8192
    cold_capacity_pages: int = 24576

    def initial_p(self):
        if self.p_init is not None:
            return self.p_init
        total = self.hot_capacity_pages + self.cold_capacity_pages
        return self.cold_capacity_pages / total

    def validate(self):
        p0 = self.initial_p()
        if not (0.0 <= self.p_min <= p0 <= self.p_max <= 1.0):
            raise ThresholdError(
                f"need 0 <= p_min <= p_init <= p_max <= 1, got "
                f"{self.p_min}, {p0}, {self.p_max}")
        if self.period < 1:
            raise ThresholdError("period must be >= 1")
        if self.mode not in ("relative_change", "as_written"):
            raise ThresholdError(f"unknown mode {self.mode!r}")
        if self.hot_capacity_pages < 1 or self.cold_capacity_pages < 1:
            raise ThresholdError("tier capacities must be >= 1 page")


@dataclass(slots=True)
class ThresholdState:
    p: float
    # Reference thrashing level for the ratio term. Captured once, at the
    # first update that observes any ping-pong at all (floor 1): windows
    # before the tier model has activity would otherwise pin the baseline
    # at the floor and blow the ratio up for the rest of the run.
    baseline_pingpong: float | None = None


@dataclass(slots=True)
class SystemSnapshot:
    slow_band_rate: float = 0.0
    pingpong_dis: int = 0
    cpu_rate: float = 0.0
    error_bound: float = 0.0  # captured for completeness, not consumed


def update_threshold(state, config, snapshot):
    """Advance ``state.p`` one period from the snapshot; returns the new p."""
    if state.baseline_pingpong is None and snapshot.pingpong_dis > 0:
        state.baseline_pingpong = float(max(snapshot.pingpong_dis, 1))
    if snapshot.cpu_rate > config.theta_max:
        if config.cpu_cap_raises:
            p = min(max(config.p_max, 2.0 * state.p), 1.0)
        else:
            p = min(config.p_min, state.p / 2.0)
    else:
        if state.baseline_pingpong is None:
            ratio = 1.0  # no thrashing observed yet: the term stays neutral
        else:
            ratio = snapshot.pingpong_dis / state.baseline_pingpong
        if config.mode == "as_written":
            d = ratio
        else:
            d = max(ratio - 1.0, -0.9)
        p = state.p * (1.0 + d) ** config.alpha / (1.0 + snapshot.slow_band_rate) ** config.beta
        p = min(p, config.p_max)
        p = max(p, config.p_min)
    state.p = p
    return p


# ---------------------------------------------------------------------------
# Tier model
# ---------------------------------------------------------------------------

class CpuSource:
    """Cpu-share signal: a constant, a scripted schedule, or a migration proxy."""

    def __init__(self, kind="constant", value=0.2, values=None, cost_factor=1.0):
        if kind not in ("constant", "schedule", "proxy"):
            raise ThresholdError(f"unknown cpu source kind {kind!r}")
        if kind == "schedule" and not values:
            raise ThresholdError("schedule cpu source needs values")
        self.kind = kind
        self.value = value
        self.values = list(values) if values else []
        self.cost_factor = cost_factor
        self._calls = 0

    def read(self, migrations, period):
        self._calls += 1
        if self.kind == "constant":
            return self.value
        if self.kind == "schedule":
            idx = min(self._calls - 1, len(self.values) - 1)
            return self.values[idx]
        if period <= 0:
            return 0.0
        return min(1.0, migrations / period * self.cost_factor)


class TierModel:
    """Label-driven page placement across a hot and a cold tier.

    Pages start cold. A Hot label promotes (evicting the least recently
    labeled-hot resident when the hot tier is full, which counts as a
    migration for the evicted page); a Cold label demotes. Bytes are
    accounted to the tier the page occupied when the access was applied. A
    page migrating in opposite directions inside one snapshot window bumps
    the ping-pong count.
    """

    def __init__(self, hot_capacity_pages):
        self.hot_capacity = hot_capacity_pages
        self.hot_pages = OrderedDict()  # page -> None, order = hot-label recency
        self._last_move = {}  # page -> (window_index, direction)
        self.window_index = 0
        self.bytes_hot = 0
        self.bytes_cold = 0
        self.migrations = 0
        self.pingpongs = 0
        self.accesses = 0

    def _migrate(self, page, direction):
        self.migrations += 1
        prev = self._last_move.get(page)
        if prev is not None and prev[0] == self.window_index and prev[1] != direction:
            self.pingpongs += 1
        self._last_move[page] = (self.window_index, direction)

    def apply(self, page, label, size):
        self.accesses += 1
        in_hot = page in self.hot_pages
        if in_hot:
            self.bytes_hot += size
        else:
            self.bytes_cold += size
        if label and not in_hot:
            if len(self.hot_pages) >= self.hot_capacity:
                evicted, _ = self.hot_pages.popitem(last=False)
                self._migrate(evicted, COLD_TIER)
            self.hot_pages[page] = None
            self._migrate(page, HOT_TIER)
        elif label and in_hot:
            self.hot_pages.move_to_end(page)
        elif not label and in_hot:
            del self.hot_pages[page]
            self._migrate(page, COLD_TIER)

    def snapshot_window(self, cpu_source):
        """Close the window: emit a snapshot and reset the accumulators."""
        total = self.bytes_hot + self.bytes_cold
        snap = SystemSnapshot(
            slow_band_rate=self.bytes_cold / max(total, 1),
            pingpong_dis=self.pingpongs,
            cpu_rate=cpu_source.read(self.migrations, self.accesses),
            error_bound=0.0,
        )
        self.bytes_hot = 0
        self.bytes_cold = 0
        self.migrations = 0
        self.pingpongs = 0
        self.accesses = 0
        self.window_index += 1
        return snap
