import json
from pathlib import Path

import pytest

from memheat.cli import main

GEN_CFG = {
    "master_seed": 4,
    "phases": [
        {"pattern": "zipf_hotspot", "length": 2500, "working_set_pages": 64,
         "zipf_s": 1.2, "pc_pool": 8},
        {"pattern": "sequential", "length": 2500, "working_set_pages": 16,
         "access_size": 64},
    ],
}

PIPE_CFG = {
    "seed": 2,
    "sketch": {"depth": 4, "width": 128},
    "queue": {"capacity": 128, "exit_window": 64, "min_fill": 8},
    "threshold": {"period": 200, "hot_capacity_pages": 16,
                  "cold_capacity_pages": 48},
    "learner": {"name": "nb"},
}


@pytest.fixture
def workspace(tmp_path):
    gen = tmp_path / "gen.json"
    gen.write_text(json.dumps(GEN_CFG))
    pipe = tmp_path / "pipe.json"
    pipe.write_text(json.dumps(PIPE_CFG))
    trace = tmp_path / "trace.csv"
    assert main(["generate", "--config", str(gen), "--out", str(trace),
                 "--quiet"]) == 0
    return tmp_path


class TestGenerate:
    def test_deterministic_output(self, workspace):
        gen = workspace / "gen.json"
        t2 = workspace / "t2.csv"
        assert main(["generate", "--config", str(gen), "--out", str(t2),
                     "--quiet"]) == 0
        assert t2.read_bytes() == (workspace / "trace.csv").read_bytes()

    def test_line_count(self, workspace):
        lines = (workspace / "trace.csv").read_text().splitlines()
        assert len(lines) == 5001
        assert lines[0] == "seq,tid,pc,addr,size,op"

    def test_malformed_json_exit_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        assert main(["generate", "--config", str(bad),
                     "--out", str(tmp_path / "x.csv"), "--quiet"]) == 3

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["generate", "--config", str(tmp_path / "none.json"),
                     "--out", str(tmp_path / "x.csv"), "--quiet"]) == 1

    def test_seed_override_changes_output(self, workspace):
        gen = workspace / "gen.json"
        t3 = workspace / "t3.csv"
        assert main(["generate", "--config", str(gen), "--out", str(t3),
                     "--seed", "99", "--quiet"]) == 0
        assert t3.read_bytes() != (workspace / "trace.csv").read_bytes()


class TestReplay:
    def test_report_and_timeline(self, workspace):
        report = workspace / "report.json"
        timeline = workspace / "timeline.csv"
        rc = main(["replay", str(workspace / "trace.csv"),
                   "--config", str(workspace / "pipe.json"),
                   "--report", str(report), "--timeline", str(timeline),
                   "--quiet"])
        assert rc == 0
        rep = json.loads(report.read_text())
        assert rep["learner"] == "nb"
        assert rep["records"] == 5000
        assert rep["labeled"] == 5000 - 128
        head = timeline.read_text().splitlines()[0]
        assert head == "start_seq,accuracy,f1,p,slow_band_rate,pingpong"

    def test_byte_identical_reports(self, workspace):
        out = []
        for name in ("r1.json", "r2.json"):
            path = workspace / name
            assert main(["replay", str(workspace / "trace.csv"),
                         "--config", str(workspace / "pipe.json"),
                         "--report", str(path), "--quiet"]) == 0
            out.append(path.read_bytes())
        assert out[0] == out[1]

    def test_trace_shorter_than_queue(self, workspace, tmp_path):
        cfg = dict(PIPE_CFG)
        cfg["queue"] = {"capacity": 50_000, "exit_window": 64, "min_fill": 8}
        p = tmp_path / "bigq.json"
        p.write_text(json.dumps(cfg))
        report = tmp_path / "r.json"
        rc = main(["replay", str(workspace / "trace.csv"), "--config", str(p),
                   "--report", str(report), "--quiet"])
        assert rc == 0
        rep = json.loads(report.read_text())
        assert rep["labeled"] == 0
        assert rep["accuracy"] is None
        assert "note" in rep

    def test_malformed_trace_exit_2(self, workspace, capsys):
        bad = workspace / "bad.csv"
        bad.write_text("seq,tid,pc,addr,size,op\n0,0,0x1,0x2,8,Q\n")
        rc = main(["replay", str(bad), "--config", str(workspace / "pipe.json"),
                   "--quiet"])
        assert rc == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_trace_exit_1(self, workspace):
        rc = main(["replay", str(workspace / "nope.csv"),
                   "--config", str(workspace / "pipe.json"), "--quiet"])
        assert rc == 1

    def test_unknown_config_key_exit_3(self, workspace, tmp_path):
        p = tmp_path / "weird.json"
        p.write_text(json.dumps(dict(PIPE_CFG, bogus=1)))
        rc = main(["replay", str(workspace / "trace.csv"), "--config", str(p),
                   "--quiet"])
        assert rc == 3


class TestCompare:
    def test_two_learners_with_ttest(self, workspace):
        report = workspace / "cmp.json"
        rc = main(["compare", str(workspace / "trace.csv"),
                   "--config", str(workspace / "pipe.json"),
                   "--learners", "lru2q,nb", "--report", str(report),
                   "--quiet"])
        assert rc == 0
        rep = json.loads(report.read_text())
        assert rep["learners"] == ["lru2q", "nb"]
        assert len(rep["runs"]) == 2
        assert rep["ttests"][0]["vs"] == "nb"
        assert rep["ttests"][0]["n"] >= 2

    def test_single_learner_usage_error(self, workspace):
        assert main(["compare", str(workspace / "trace.csv"),
                     "--config", str(workspace / "pipe.json"),
                     "--learners", "arf", "--quiet"]) == 4

    def test_self_comparison_is_null(self, workspace):
        report = workspace / "self.json"
        rc = main(["compare", str(workspace / "trace.csv"),
                   "--config", str(workspace / "pipe.json"),
                   "--learners", "nb,nb", "--report", str(report), "--quiet"])
        assert rc == 0
        rep = json.loads(report.read_text())
        tt = rep["ttests"][0]
        assert tt["t"] == 0.0 and tt["p_value"] == 1.0
        assert rep["runs"][0]["confusion"] == rep["runs"][1]["confusion"]


class TestBatchVsOnline:
    def test_split_one_is_usage_error(self, workspace):
        assert main(["batch-vs-online", str(workspace / "trace.csv"),
                     "--config", str(workspace / "pipe.json"),
                     "--split", "1.0", "--quiet"]) == 4

    def test_report_structure(self, workspace):
        report = workspace / "bv.json"
        rc = main(["batch-vs-online", str(workspace / "trace.csv"),
                   "--config", str(workspace / "pipe.json"),
                   "--split", "0.8", "--report", str(report), "--quiet"])
        assert rc == 0
        rep = json.loads(report.read_text())
        assert rep["split"] == 0.8
        assert rep["online"]["labeled"] == rep["frozen"]["labeled"]

    def test_no_drift_small_gap(self, tmp_path):
        """Single stationary phase: freezing costs at most a few points."""
        gen = tmp_path / "gen.json"
        gen.write_text(json.dumps({
            "master_seed": 8,
            "phases": [{"pattern": "zipf_hotspot", "length": 40_000,
                        "working_set_pages": 256, "zipf_s": 1.3, "pc_pool": 8}],
        }))
        trace = tmp_path / "t.csv"
        assert main(["generate", "--config", str(gen), "--out", str(trace),
                     "--quiet"]) == 0
        pipe = tmp_path / "pipe.json"
        pipe.write_text(json.dumps({
            "seed": 2,
            "sketch": {"depth": 4, "width": 512},
            "queue": {"capacity": 2048, "exit_window": 256, "min_fill": 16},
            "threshold": {"period": 2000, "hot_capacity_pages": 64,
                          "cold_capacity_pages": 192, "p_min": 0.6,
                          "p_max": 0.95, "alpha": 0.5, "beta": 0.5},
            "learner": {"name": "hat"},
        }))
        report = tmp_path / "bv.json"
        rc = main(["batch-vs-online", str(trace), "--config", str(pipe),
                   "--split", "0.8", "--report", str(report), "--quiet"])
        assert rc == 0
        rep = json.loads(report.read_text())
        assert rep["post_split_gap_accuracy"] is not None
        assert abs(rep["post_split_gap_accuracy"]) <= 0.03


class TestUsage:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == 4

    def test_missing_required_flag(self):
        assert main(["generate"]) == 4
