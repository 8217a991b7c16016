"""Command-line harness.

Subcommands:

* ``generate``        write a synthetic trace from a generator config
* ``replay``          run one pipeline over a trace, emit report + timeline
* ``compare``         run several learners over the same trace with shared
                      labeling and paired t-tests against the first learner
* ``batch-vs-online`` online learner vs one frozen at a split point
* ``bench``           run the bundled benchmark and print pass/fail lines

Exit codes: 0 success, 1 I/O error, 2 malformed trace, 3 invalid config,
4 usage error. Reports are JSON, timelines CSV; both are byte-identical
across runs with the same seed (timing goes to stderr, never into files).
"""

import argparse
import json
import sys
import time
from importlib import resources

from .config import (generator_config_from_dict, load_generator_config,
                     load_pipeline_config, pipeline_config_from_dict)
from .metrics import paired_t_test
from .pipeline import Pipeline
from .trace import (InvalidConfig, MalformedLine, TraceBuffer, TraceError,
                    generate_trace, write_trace)

EXIT_OK = 0
EXIT_IO = 1
EXIT_TRACE = 2
EXIT_CONFIG = 3
EXIT_USAGE = 4

BENCH_LEARNERS = ("arf", "lru2q", "hat", "nb")
BENCH_RUNTIME_LIMIT = 600.0  # seconds
BENCH_DRIFT_FRACTION = 0.85  # last phase boundary of the bundled benchmark


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _say(args, message):
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _write_timeline(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("start_seq,accuracy,f1,p,slow_band_rate,pingpong\n")
        for r in rows:
            fh.write(f"{r['start_seq']},{r['accuracy']:.6f},{r['f1']:.6f},"
                     f"{r['p']:.6f},{r['slow_band_rate']:.6f},{r['pingpong']}\n")


def _load_pipeline_cfg(args):
    cfg = load_pipeline_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _run_pipeline(buffer, cfg, learner_name=None, freeze_at=None):
    if learner_name is not None:
        cfg.learner.name = learner_name
        cfg.learner.params = {}
    pipe = Pipeline(cfg)
    if freeze_at is None:
        pipe.run(buffer.records())
    else:
        for i, rec in enumerate(buffer.records()):
            if i == freeze_at:
                pipe.learning_enabled = False
            pipe.process(rec)
    return pipe


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args):
    cfg = load_generator_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    n = write_trace(args.out, generate_trace(cfg))
    _say(args, f"wrote {n} records to {args.out}")
    return EXIT_OK


def cmd_replay(args):
    cfg = _load_pipeline_cfg(args)
    buffer = TraceBuffer.from_file(args.trace).sampled(cfg.sampling_rate, cfg.seed)
    t0 = time.monotonic()
    pipe = _run_pipeline(buffer, cfg)
    _say(args, f"replayed {pipe.records_processed} records with "
               f"{cfg.learner.name} in {time.monotonic() - t0:.1f}s")
    report = pipe.report()
    if args.report:
        _write_json(args.report, report)
    if args.timeline:
        _write_timeline(args.timeline, pipe.window_rows)
    return EXIT_OK


def _compare(buffer, cfg, learners, quiet=False):
    runs = []
    series = {}
    for name in learners:
        t0 = time.monotonic()
        pipe = _run_pipeline(buffer, cfg, learner_name=name)
        if not quiet:
            print(f"  {name}: {pipe.records_processed} records in "
                  f"{time.monotonic() - t0:.1f}s", file=sys.stderr)
        runs.append(pipe.report())
        series[name] = pipe.windows.accuracy_series
    ttests = []
    first = learners[0]
    for name in learners[1:]:
        if len(series[first]) >= 2:
            tt = paired_t_test(series[first], series[name])
            ttests.append({"vs": name, "t": tt["t"], "p_value": tt["p_value"],
                           "n": tt["n"], "degenerate": tt["degenerate"]})
    return {"learners": list(learners), "runs": runs, "ttests": ttests}


def cmd_compare(args):
    learners = [s.strip() for s in args.learners.split(",") if s.strip()]
    if len(learners) < 2:
        raise UsageError("compare needs at least 2 learners")
    cfg = _load_pipeline_cfg(args)
    buffer = TraceBuffer.from_file(args.trace).sampled(cfg.sampling_rate, cfg.seed)
    report = _compare(buffer, cfg, learners, quiet=getattr(args, "quiet", False))
    if args.report:
        _write_json(args.report, report)
    return EXIT_OK


def cmd_batch_vs_online(args):
    if not 0.0 < args.split < 1.0:
        raise UsageError(f"split must be strictly between 0 and 1, got {args.split}")
    cfg = _load_pipeline_cfg(args)
    buffer = TraceBuffer.from_file(args.trace).sampled(cfg.sampling_rate, cfg.seed)
    cutoff = int(args.split * len(buffer))
    if cutoff < 1 or cutoff >= len(buffer):
        raise UsageError(f"split {args.split} leaves no records on one side")
    cutoff_seq = int(buffer.seq[cutoff])

    _say(args, f"online pipeline ({cfg.learner.name}, {len(buffer)} records)")
    online = _run_pipeline(buffer, cfg)
    _say(args, f"frozen pipeline (learning stops at record {cutoff})")
    frozen = _run_pipeline(buffer, cfg, freeze_at=cutoff)

    on_rows = [r for r in online.window_rows if r["start_seq"] >= cutoff_seq]
    fr_rows = [r for r in frozen.window_rows if r["start_seq"] >= cutoff_seq]
    gap = None
    if on_rows and len(on_rows) == len(fr_rows):
        mean_on = sum(r["accuracy"] for r in on_rows) / len(on_rows)
        mean_fr = sum(r["accuracy"] for r in fr_rows) / len(fr_rows)
        gap = mean_on - mean_fr
    report = {
        "split": args.split,
        "records": len(buffer),
        "cutoff_seq": cutoff_seq,
        "post_split_gap_accuracy": gap,
        "online": online.report(),
        "frozen": frozen.report(),
    }
    if args.report:
        _write_json(args.report, report)
    return EXIT_OK


def bundled_config_text(name):
    return (resources.files("memheat") / "data" / name).read_text(encoding="utf-8")


def run_bench(seed, workdir, report_path=None, quiet=False):
    """Generate the bundled benchmark and score the acceptance checks."""
    import os

    gen_cfg_dict = json.loads(bundled_config_text("benchmark_generator.json"))
    pipe_cfg_dict = json.loads(bundled_config_text("benchmark_pipeline.json"))
    gen_cfg_dict["master_seed"] = seed
    pipe_cfg_dict["seed"] = seed
    gen_cfg = generator_config_from_dict(gen_cfg_dict)

    trace_path = os.path.join(workdir, "benchmark.csv")
    if not quiet:
        print(f"generating benchmark trace ({sum(p.length for p in gen_cfg.phases)}"
              f" records) ...", file=sys.stderr)
    write_trace(trace_path, generate_trace(gen_cfg))

    cfg = pipeline_config_from_dict(pipe_cfg_dict)
    buffer = TraceBuffer.from_file(trace_path).sampled(cfg.sampling_rate, cfg.seed)
    t0 = time.monotonic()
    compare_report = _compare(buffer, cfg, BENCH_LEARNERS, quiet=quiet)
    elapsed = time.monotonic() - t0
    if not quiet:
        print(f"benchmark comparison took {elapsed:.1f}s", file=sys.stderr)

    acc = {}
    f1 = {}
    for run in compare_report["runs"]:
        acc[run["learner"]] = run["accuracy"]
        f1[run["learner"]] = run["f1"]
    tt = next((t for t in compare_report["ttests"] if t["vs"] == "lru2q"), None)

    ordering_ok = acc["arf"] > acc["hat"] > acc["nb"]
    margin_ok = acc["arf"] - acc["lru2q"] >= 0.10
    bands_ok = acc["arf"] >= 0.85 and f1["arf"] >= 0.75
    runtime_ok = elapsed <= BENCH_RUNTIME_LIMIT
    c1 = ordering_ok and margin_ok and bands_ok and runtime_ok
    c2 = (tt is not None and tt["n"] >= 30 and tt["p_value"] < 0.05)

    criteria = [
        {"id": 1, "name": "classifier ordering and accuracy bands",
         "passed": bool(c1),
         "details": {"accuracy": acc, "f1": f1, "ordering_ok": ordering_ok,
                     "margin_ok": margin_ok, "bands_ok": bands_ok,
                     "runtime_ok": runtime_ok}},
        {"id": 2, "name": "paired t-test arf vs lru2q significant",
         "passed": bool(c2),
         "details": tt if tt is not None else {}},
    ]
    report = {"seed": seed, "criteria": criteria, "compare": compare_report}
    if report_path:
        _write_json(report_path, report)
    for c in criteria:
        print(f"criterion {c['id']} ({c['name']}): "
              f"{'PASS' if c['passed'] else 'FAIL'}")
    return report


def cmd_bench(args):
    import os
    import tempfile

    workdir = args.workdir
    if workdir is None:
        workdir = tempfile.mkdtemp(prefix="memheat-bench-")
    else:
        os.makedirs(workdir, exist_ok=True)
    report_path = args.report or os.path.join(workdir, "bench_report.json")
    run_bench(args.seed, workdir, report_path, quiet=getattr(args, "quiet", False))
    _say(args, f"report written to {report_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

def _build_parser():
    parser = _Parser(prog="memheat",
                     description="hot/cold page classification over access traces")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--config", required=config_required,
                       help="path to the JSON config")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("generate", help="write a synthetic trace")
    common(p)
    p.add_argument("--out", required=True, help="output trace path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("replay", help="replay a trace through one pipeline")
    common(p)
    p.add_argument("trace", help="input trace file")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--timeline", help="CSV timeline path")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("compare", help="run several learners on one trace")
    common(p)
    p.add_argument("trace")
    p.add_argument("--learners", required=True,
                   help="comma-separated learner names (first is the t-test anchor)")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("batch-vs-online",
                       help="compare continual learning against a frozen model")
    common(p)
    p.add_argument("trace")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_batch_vs_online)

    p = sub.add_parser("bench", help="run the bundled benchmark, print pass/fail")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workdir", help="directory for the trace and reports")
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedLine as exc:
        print(f"malformed trace: {exc}", file=sys.stderr)
        return EXIT_TRACE
    except InvalidConfig as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
