import json

import pytest

from memheat.config import (generator_config_from_dict, load_generator_config,
                            load_pipeline_config, pipeline_config_from_dict)
from memheat.trace import InvalidConfig, Pattern


GEN = {
    "master_seed": 5,
    "page_size_log2": 12,
    "phases": [
        {"pattern": "zipf_hotspot", "length": 100, "working_set_pages": 32,
         "zipf_s": 1.1},
        {"pattern": "sequential", "length": 50, "working_set_pages": 8},
    ],
}


class TestGeneratorConfig:
    def test_parses(self):
        cfg = generator_config_from_dict(GEN)
        assert cfg.master_seed == 5
        assert cfg.phases[0].pattern == Pattern.ZIPF_HOTSPOT
        assert cfg.phases[1].length == 50

    def test_unknown_phase_key_rejected(self):
        bad = json.loads(json.dumps(GEN))
        bad["phases"][0]["working_set"] = 4
        with pytest.raises(InvalidConfig):
            generator_config_from_dict(bad)

    def test_unknown_top_key_rejected(self):
        bad = dict(GEN, sampling=0.5)
        with pytest.raises(InvalidConfig):
            generator_config_from_dict(bad)

    def test_unknown_pattern(self):
        bad = json.loads(json.dumps(GEN))
        bad["phases"][0]["pattern"] = "spiral"
        with pytest.raises(InvalidConfig):
            generator_config_from_dict(bad)

    def test_missing_required_field(self):
        with pytest.raises(InvalidConfig):
            generator_config_from_dict({"phases": [{"pattern": "sequential"}]})

    def test_empty_phases(self):
        with pytest.raises(InvalidConfig):
            generator_config_from_dict({"phases": []})

    def test_load_reports_json_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"phases": [,]}')
        with pytest.raises(InvalidConfig) as exc:
            load_generator_config(path)
        assert "line" in str(exc.value)


class TestPipelineConfig:
    def test_defaults(self):
        cfg = pipeline_config_from_dict({})
        assert cfg.queue.capacity == 65_536
        assert cfg.queue.exit_window == 1024
        assert cfg.queue.min_fill == 64
        assert cfg.sketch.depth == 4 and cfg.sketch.width == 2048
        assert cfg.sampling_rate == 1.0
        assert cfg.learner.name == "arf"
        assert abs(cfg.threshold.initial_p() - 0.75) < 1e-12

    def test_unknown_keys_rejected_everywhere(self):
        for bad in (
            {"sampling": 0.5},
            {"sketch": {"rows": 4}},
            {"queue": {"cap": 9}},
            {"threshold": {"gamma": 1.0}},
            {"threshold": {"cpu_source": {"type": "constant"}}},
            {"learner": {"name": "nb", "trees": 3}},
        ):
            with pytest.raises(InvalidConfig):
                pipeline_config_from_dict(bad)

    def test_unknown_learner(self):
        with pytest.raises(InvalidConfig):
            pipeline_config_from_dict({"learner": {"name": "svm"}})

    def test_sampling_bounds(self):
        with pytest.raises(InvalidConfig):
            pipeline_config_from_dict({"sampling_rate": 0.0})
        with pytest.raises(InvalidConfig):
            pipeline_config_from_dict({"sampling_rate": 1.5})

    def test_learner_params_pass_through(self):
        cfg = pipeline_config_from_dict(
            {"learner": {"name": "arf", "trees": 3, "poisson_lambda": None,
                         "subset_size": 8, "detectors": False}})
        assert cfg.learner.params["trees"] == 3
        assert cfg.learner.params["poisson_lambda"] is None

    def test_threshold_passthrough(self):
        cfg = pipeline_config_from_dict(
            {"threshold": {"p_min": 0.2, "p_max": 0.8, "period": 500,
                           "cpu_source": {"kind": "schedule", "values": [0.1, 0.9]}}})
        assert cfg.threshold.p_min == 0.2
        assert cfg.cpu_source == {"kind": "schedule", "values": [0.1, 0.9]}

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"seed": 9, "learner": {"name": "hat"}}))
        cfg = load_pipeline_config(path)
        assert cfg.seed == 9 and cfg.learner.name == "hat"
