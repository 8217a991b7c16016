"""JSON configuration schemas for the generator and the pipeline.

Parsing is strict: unknown keys are rejected everywhere so a typo in a
config file fails loudly instead of silently running with defaults.
"""

import json
from dataclasses import dataclass, field

from .threshold import ThresholdConfig
from .trace import GeneratorConfig, InvalidConfig, Pattern, PhaseSpec

LEARNER_NAMES = ("nb", "hat", "arf", "lru2q")


def _check_keys(d, allowed, where):
    unknown = set(d) - set(allowed)
    if unknown:
        raise InvalidConfig(f"{where}: unknown keys {sorted(unknown)}")


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: invalid JSON at line {exc.lineno} "
                            f"column {exc.colno}: {exc.msg}") from None


# ---------------------------------------------------------------------------
# Generator config
# ---------------------------------------------------------------------------

_PHASE_KEYS = ("pattern", "length", "working_set_pages", "stride_bytes",
               "zipf_s", "pc_pool", "write_ratio", "access_size", "base_addr")


def generator_config_from_dict(d):
    _check_keys(d, ("phases", "master_seed", "page_size_log2"), "generator config")
    phases_raw = d.get("phases")
    if not isinstance(phases_raw, list) or not phases_raw:
        raise InvalidConfig("generator config: phases must be a non-empty list")
    phases = []
    for i, p in enumerate(phases_raw):
        _check_keys(p, _PHASE_KEYS, f"phase {i}")
        if "pattern" not in p or "length" not in p or "working_set_pages" not in p:
            raise InvalidConfig(f"phase {i}: pattern, length and working_set_pages are required")
        try:
            pattern = Pattern(p["pattern"])
        except ValueError:
            raise InvalidConfig(f"phase {i}: unknown pattern {p['pattern']!r}") from None
        kwargs = {k: p[k] for k in _PHASE_KEYS[1:] if k in p}
        phases.append(PhaseSpec(pattern=pattern, **kwargs))
    cfg = GeneratorConfig(phases=phases,
                          master_seed=int(d.get("master_seed", 0)),
                          page_size_log2=int(d.get("page_size_log2", 12)))
    cfg.validate()
    return cfg


def load_generator_config(path):
    return generator_config_from_dict(_load_json(path))


# ---------------------------------------------------------------------------
# Pipeline config
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class SketchConfig:
    depth: int = 4
    width: int = 2048
    seed: int | None = None  # derived from the pipeline seed when None


@dataclass(slots=True)
class QueueConfig:
    capacity: int = 65_536
    exit_window: int = 1024
    min_fill: int = 64


@dataclass(slots=True)
class LearnerConfig:
    name: str = "arf"
    params: dict = field(default_factory=dict)


@dataclass(slots=True)
class PipelineConfig:
    seed: int = 0
    page_size_log2: int = 12
    sampling_rate: float = 1.0
    sketch: SketchConfig = field(default_factory=SketchConfig)
    queue: QueueConfig = field(default_factory=QueueConfig)
    threshold: ThresholdConfig = field(default_factory=ThresholdConfig)
    cpu_source: dict = field(default_factory=lambda: {"kind": "constant", "value": 0.2})
    learner: LearnerConfig = field(default_factory=LearnerConfig)

    def validate(self):
        if not 0.0 < self.sampling_rate <= 1.0:
            raise InvalidConfig(f"sampling_rate {self.sampling_rate} outside (0, 1]")
        if self.sketch.depth < 1 or self.sketch.width < 2:
            raise InvalidConfig("sketch needs depth >= 1 and width >= 2")
        if self.queue.capacity < 1:
            raise InvalidConfig("queue capacity must be >= 1")
        if self.queue.exit_window < 1 or self.queue.min_fill < 1:
            raise InvalidConfig("exit_window and min_fill must be >= 1")
        if self.learner.name not in LEARNER_NAMES:
            raise InvalidConfig(f"unknown learner {self.learner.name!r}; "
                                f"expected one of {LEARNER_NAMES}")
        try:
            self.threshold.validate()
        except Exception as exc:
            raise InvalidConfig(f"threshold: {exc}") from None


_THRESHOLD_KEYS = ("p_init", "p_min", "p_max", "alpha", "beta", "theta_max",
                   "period", "mode", "cpu_cap_raises", "hot_capacity_pages",
                   "cold_capacity_pages")
_CPU_SOURCE_KEYS = ("kind", "value", "values", "cost_factor")

_LEARNER_PARAM_KEYS = {
    "nb": ("var_floor",),
    "hat": ("grace_period", "split_delta", "tie_tau", "drift_delta",
            "swap_delta", "max_leaves"),
    "arf": ("trees", "poisson_lambda", "warning_delta", "drift_delta",
            "subset_size", "acc_window", "weight_floor", "detectors",
            "grace_period", "split_delta", "tie_tau", "hat_drift_delta",
            "swap_delta", "max_leaves"),
    "lru2q": ("k_in", "k_am", "k_out", "a1in_counts_hot"),
}


def pipeline_config_from_dict(d):
    _check_keys(d, ("seed", "page_size_log2", "sampling_rate", "sketch",
                    "queue", "threshold", "learner"), "pipeline config")
    cfg = PipelineConfig()
    cfg.seed = int(d.get("seed", 0))
    cfg.page_size_log2 = int(d.get("page_size_log2", 12))
    cfg.sampling_rate = float(d.get("sampling_rate", 1.0))

    sk = d.get("sketch", {})
    _check_keys(sk, ("depth", "width", "seed"), "sketch")
    cfg.sketch = SketchConfig(depth=int(sk.get("depth", 4)),
                              width=int(sk.get("width", 2048)),
                              seed=sk.get("seed"))

    qu = d.get("queue", {})
    _check_keys(qu, ("capacity", "exit_window", "min_fill"), "queue")
    cfg.queue = QueueConfig(capacity=int(qu.get("capacity", 65_536)),
                            exit_window=int(qu.get("exit_window", 1024)),
                            min_fill=int(qu.get("min_fill", 64)))

    th = dict(d.get("threshold", {}))
    cpu = th.pop("cpu_source", {"kind": "constant", "value": 0.2})
    _check_keys(th, _THRESHOLD_KEYS, "threshold")
    _check_keys(cpu, _CPU_SOURCE_KEYS, "threshold.cpu_source")
    cfg.threshold = ThresholdConfig(**th)
    cfg.cpu_source = dict(cpu)

    le = d.get("learner", {})
    name = le.get("name", "arf")
    if name not in LEARNER_NAMES:
        raise InvalidConfig(f"unknown learner {name!r}; expected one of {LEARNER_NAMES}")
    _check_keys(le, ("name",) + _LEARNER_PARAM_KEYS[name], f"learner {name}")
    params = {k: v for k, v in le.items() if k != "name"}
    cfg.learner = LearnerConfig(name=name, params=params)

    cfg.validate()
    return cfg


def load_pipeline_config(path):
    return pipeline_config_from_dict(_load_json(path))
