"""Command-line front end.

    semipinch run --technique semiswipe --targets 4 --trials 15 --seed 42 --out out/
    semipinch run --all-techniques --targets 2,4,6 --trials 15 --trace-out traces/
    semipinch replay traces/semiswipe_t4_000.trace.jsonl
    semipinch report out/trials.csv

Exit codes: 0 success, 2 config/usage, 3 I/O, 4 data integrity.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import runner
from .config import build_config, digest_of, engine_dict, load_config_file
from .errors import (
    ClockError,
    ConfigError,
    IncompleteTrial,
    IntegrityError,
    ParseError,
    SchemaError,
    VersionError,
)
from .metrics import trial_metrics
from .pinch import PinchThresholds
from .scene import Scene
from .session import Session, events_to_csv, events_to_jsonl
from .techniques import TechniqueId, TechniqueParams
from .trace import read_trace

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 2, 3, 4

log = logging.getLogger("semipinch")


def _split_dotted(extra: list[str]) -> dict:
    """Turn leftover ``--section.key value`` / ``--section.key=value`` args into overrides."""
    out = {}
    it = iter(extra)
    for arg in it:
        if not arg.startswith("--") or "." not in arg:
            raise ConfigError(f"unrecognized argument {arg!r}")
        key = arg[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            value = next(it, None)
            if value is None:
                raise ConfigError(f"{arg} needs a value")
        out[key.replace("-", "_")] = value
    return out


def cmd_run(args, extra: list[str]) -> int:
    file_data = load_config_file(args.config) if args.config else {}
    overrides = {
        "techniques": "all" if args.all_techniques else args.technique,
        "targets": args.targets,
        "trials": args.trials,
        "seed": args.seed,
        "out": args.out,
        "trace_out": args.trace_out,
        "jobs": args.jobs,
        **_split_dotted(extra),
    }
    config = build_config(file_data, overrides)
    results = runner.simulate(config)
    digest = config.digest()
    try:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / "trials.csv").write_text(runner.trials_csv(results, digest), encoding="utf-8")
        (config.out / "blocks.csv").write_text(runner.blocks_csv(results, digest), encoding="utf-8")
        if config.trace_out is not None:
            for r in results:
                runner.write_bundle(config.trace_out, r)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    done = sum(r.metrics is not None for r in results)
    print(f"{len(results)} trials ({done} completed) -> {config.out / 'trials.csv'}")
    return EXIT_OK


def cmd_replay(args, extra: list[str]) -> int:
    if extra:
        raise ConfigError(f"unrecognized arguments: {' '.join(extra)}")
    trace = read_trace(args.trace)
    header = trace.header
    if header is None:
        raise IntegrityError("trace has no header; cannot reconstruct scene and engine config")
    cfg = header["config"]
    if digest_of(cfg) != header.get("config_digest") and not args.force:
        raise IntegrityError("trace config does not match its embedded digest (use --force to override)")
    scene = Scene.from_dict(header["scene"])
    if scene.digest() != header.get("scene_digest") and not args.force:
        raise IntegrityError("trace scene does not match its embedded digest (use --force to override)")

    technique = TechniqueId.parse(cfg["technique"])
    pinch = PinchThresholds(**cfg["pinch"])
    params = TechniqueParams(**cfg["params"])
    if args.config:
        local = build_config(load_config_file(args.config), {"techniques": technique.value})
        pinch, params = local.pinch, local.params
        if digest_of(engine_dict(technique, pinch, params)) != header.get("engine_digest") and not args.force:
            raise IntegrityError("--config engine settings differ from the trace's (use --force to override)")

    session = Session(scene, technique, params, pinch)
    events = session.run(trace.frames)
    body = events_to_csv(events) if args.format == "csv" else events_to_jsonl(events)
    try:
        metrics = trial_metrics(events, trace.frames, scene).to_dict()
    except IncompleteTrial as exc:
        metrics = {"error": str(exc)}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"events.{args.format}").write_text(body, encoding="utf-8")
        (out / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(body)
    print(json.dumps(metrics))
    return EXIT_OK


def cmd_report(args, extra: list[str]) -> int:
    if extra:
        raise ConfigError(f"unrecognized arguments: {' '.join(extra)}")
    rows = []
    for path in args.csv:
        rows.extend(runner.read_trials_csv(path))
    sys.stdout.write(runner.report_table(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semipinch", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate trials and write metric CSVs")
    run.add_argument("--technique", help="technique id, comma list, or 'all'")
    run.add_argument("--all-techniques", action="store_true")
    run.add_argument("--targets", help="target counts, e.g. 2,4,6")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--config", help="TOML config file; flags win")
    run.add_argument("--out", help="directory for trials.csv and blocks.csv (default: out)")
    run.add_argument("--trace-out", help="directory for per-trial trace and event bundles")
    run.add_argument("--jobs", type=int, help="worker processes")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("replay", help="feed a trace through the engine")
    rep.add_argument("trace")
    rep.add_argument("--config", help="override engine settings; refused on digest mismatch")
    rep.add_argument("--force", action="store_true", help="ignore digest mismatches")
    rep.add_argument("--out", help="write events and metrics.json here instead of stdout")
    rep.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    rep.set_defaults(func=cmd_replay)

    report = sub.add_parser("report", help="summarize per-trial CSVs as a markdown table")
    report.add_argument("csv", nargs="+")
    report.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, extra)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ClockError, VersionError, SchemaError, IntegrityError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
