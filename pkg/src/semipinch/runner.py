"""Factorial trial sweeps, CSV artifacts and summary tables."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, get_type_hints

from .agent import TrialRun, run_trial
from .config import EngineConfig, digest_of, engine_dict, trial_seeds
from .errors import EmptyBlock, IncompleteTrial, SchemaError
from .metrics import TRIAL_METRIC_FIELDS, BlockMetrics, TrialMetrics, block_metrics, trial_metrics
from .scene import Scene, generate
from .session import events_to_jsonl
from .techniques import TechniqueId
from .trace import format_trace

log = logging.getLogger(__name__)

TRIALS_SCHEMA = "trials/v1"
BLOCKS_SCHEMA = "blocks/v1"

TRIAL_COLUMNS = (
    "technique",
    "target_count",
    "trial",
    "scene_seed",
    "agent_seed",
    "completed",
    *TRIAL_METRIC_FIELDS,
    "config_digest",
)

BLOCK_COLUMNS = (
    "technique",
    "target_count",
    "trials",
    "valid_trials",
    "mean_tct",
    "success_rate",
    "inverse_efficiency",
    "mean_accidental_ratio",
    "mean_error_rate",
    "mean_hand_movement",
    "mean_hand_rotation",
    "config_digest",
)


@dataclass(frozen=True)
class TrialSpec:
    technique: TechniqueId
    target_count: int
    trial: int
    scene_seed: int
    agent_seed: int


@dataclass
class TrialResult:
    spec: TrialSpec
    scene: Scene
    run: TrialRun
    metrics: Optional[TrialMetrics]
    header: dict


def plan(config: EngineConfig) -> list[TrialSpec]:
    specs = []
    for tech in config.techniques:
        for n in config.targets:
            for i in range(config.trials):
                s_seed, a_seed = trial_seeds(config.seed, tech, n, i)
                specs.append(TrialSpec(tech, n, i, s_seed, a_seed))
    return specs


def trial_header(config: EngineConfig, spec: TrialSpec, scene: Scene) -> dict:
    trial_cfg = {
        **engine_dict(spec.technique, config.pinch, config.params),
        "scene": asdict(replace(config.scene, target_count=spec.target_count, seed=spec.scene_seed)),
        "agent": replace(config.agent, seed=spec.agent_seed).to_dict(),
        "trial": spec.trial,
    }
    return {
        "config": trial_cfg,
        "config_digest": digest_of(trial_cfg),
        "engine_digest": digest_of(engine_dict(spec.technique, config.pinch, config.params)),
        "run_digest": config.digest(),
        "scene": scene.to_dict(),
        "scene_digest": scene.digest(),
    }


def execute(config: EngineConfig, spec: TrialSpec) -> TrialResult:
    scene = generate(replace(config.scene, target_count=spec.target_count, seed=spec.scene_seed))
    agent = replace(config.agent, seed=spec.agent_seed)
    run = run_trial(scene, spec.technique, agent, config.params, config.pinch)
    try:
        m = trial_metrics(run.events, run.frames, scene)
    except IncompleteTrial:
        log.warning("trial %s/%d/%d did not complete", spec.technique.value, spec.target_count, spec.trial)
        m = None
    return TrialResult(spec, scene, run, m, trial_header(config, spec, scene))


def _execute_packed(args):
    return execute(*args)


def simulate(config: EngineConfig) -> list[TrialResult]:
    """Run every planned trial; results come back in plan order."""
    specs = plan(config)
    if config.jobs == 1:
        return [execute(config, s) for s in specs]
    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        return list(pool.map(_execute_packed, [(config, s) for s in specs]))


def bundle_stem(spec: TrialSpec) -> str:
    return f"{spec.technique.value}_t{spec.target_count}_{spec.trial:03d}"


def write_bundle(directory: Path, result: TrialResult) -> tuple[Path, Path]:
    directory.mkdir(parents=True, exist_ok=True)
    stem = bundle_stem(result.spec)
    trace_path = directory / f"{stem}.trace.jsonl"
    events_path = directory / f"{stem}.events.jsonl"
    trace_path.write_text(format_trace(result.run.frames, result.header), encoding="utf-8")
    events_path.write_text(events_to_jsonl(result.run.events), encoding="utf-8")
    return trace_path, events_path


# -- CSV --------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(rows: Iterable[Sequence], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def trial_row(result: TrialResult, digest: str) -> list:
    s = result.spec
    m = result.metrics
    metric_cells = [getattr(m, f) for f in TRIAL_METRIC_FIELDS] if m else [None] * len(TRIAL_METRIC_FIELDS)
    return [s.technique.value, s.target_count, s.trial, s.scene_seed, s.agent_seed, m is not None, *metric_cells, digest]


def trials_csv(results: Sequence[TrialResult], digest: str) -> str:
    return _csv((trial_row(r, digest) for r in results), TRIAL_COLUMNS)


def group_blocks(rows: Iterable[tuple[str, int, Optional[TrialMetrics]]]) -> list[tuple[str, int, list[Optional[TrialMetrics]]]]:
    """Group per-trial metrics by (technique, target_count) in technique order."""
    groups: dict[tuple[str, int], list] = {}
    for tech, n, m in rows:
        groups.setdefault((tech, n), []).append(m)
    order = [t.value for t in TechniqueId]

    def key(k):
        tech, n = k
        return (order.index(tech) if tech in order else len(order), tech, n)

    return [(t, n, groups[(t, n)]) for t, n in sorted(groups, key=key)]


def block_row(tech: str, n: int, trials: list[Optional[TrialMetrics]], digest: str) -> list:
    done = [m for m in trials if m is not None]
    try:
        b = block_metrics(done, tech, n)
    except EmptyBlock:
        return [tech, n, len(trials), 0, None, None, None, None, None, None, None, digest]
    return [
        tech, n, len(trials), b.valid_trials, b.mean_tct, b.success_rate, b.inverse_efficiency,
        b.mean_accidental_ratio, b.mean_error_rate, b.mean_hand_movement, b.mean_hand_rotation, digest,
    ]


def blocks_csv(results: Sequence[TrialResult], digest: str) -> str:
    grouped = group_blocks((r.spec.technique.value, r.spec.target_count, r.metrics) for r in results)
    return _csv((block_row(t, n, ms, digest) for t, n, ms in grouped), BLOCK_COLUMNS)


_METRIC_TYPES = {f: get_type_hints(TrialMetrics)[f] for f in TRIAL_METRIC_FIELDS}


def _parse_bool(text: str) -> bool:
    return text.strip().lower() == "true"


def read_trials_csv(path) -> list[tuple[str, int, Optional[TrialMetrics]]]:
    """Load a per-trial CSV back into (technique, target_count, metrics) rows."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRIAL_COLUMNS:
            raise SchemaError(f"{path}: columns do not match {TRIALS_SCHEMA}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRIAL_COLUMNS):
                raise SchemaError(f"{path}: line {lineno} has {len(row)} cells, expected {len(TRIAL_COLUMNS)}")
            rec = dict(zip(TRIAL_COLUMNS, row))
            try:
                m = None
                if _parse_bool(rec["completed"]):
                    kw = {}
                    for f, typ in _METRIC_TYPES.items():
                        kw[f] = _parse_bool(rec[f]) if typ is bool else typ(rec[f])
                    m = TrialMetrics(**kw)
                out.append((rec["technique"], int(rec["target_count"]), m))
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}") from None
        return out


def _fmt(x: Optional[float], digits: int = 2) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return f"{x:.{digits}f}"


def report_table(rows: Iterable[tuple[str, int, Optional[TrialMetrics]]]) -> str:
    """Markdown table of per-condition means (technique x target count)."""
    labels = {t.value: t.label for t in TechniqueId}
    lines = [
        "| technique | targets | trials | valid | TCT (s) | ASR (%) | ER (%) | IE (s) | movement (m) | rotation (deg) |",
        "|---|---|---|---|---|---|---|---|---|---|",
    ]
    for tech, n, ms in group_blocks(rows):
        done = [m for m in ms if m is not None]
        try:
            b = block_metrics(done, tech, n)
            cells = [
                str(b.valid_trials), _fmt(b.mean_tct), _fmt(b.mean_accidental_ratio), _fmt(b.mean_error_rate),
                _fmt(b.inverse_efficiency), _fmt(b.mean_hand_movement, 3), _fmt(b.mean_hand_rotation, 1),
            ]
        except EmptyBlock:
            cells = ["0"] + ["-"] * 6
        lines.append(f"| {labels.get(tech, tech)} | {n} | {len(ms)} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
