"""JSONL trace files: one header line, then one input frame per line.

Frame line layout (schema v1)::

    {"ts": 0.0111,
     "gaze": {"ox": .., "oy": .., "oz": .., "dx": .., "dy": .., "dz": ..},
     "dh":  {"thumb": [x, y, z], "index": [..], "palm": [..], "quat": [w, x, y, z], "tracked": true},
     "ndh": {...}}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .core import GazeRay, HandPose, InputFrame, Orientation, Vec3
from .errors import ClockError, ParseError, VersionError

TRACE_SCHEMA = "semipinch.trace/v1"


@dataclass
class Trace:
    header: Optional[dict] = None
    frames: list[InputFrame] = field(default_factory=list)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def hand_to_dict(h: HandPose) -> dict:
    return {
        "thumb": list(h.thumb_tip),
        "index": list(h.index_tip),
        "palm": list(h.palm_center),
        "quat": list(h.palm_orientation),
        "tracked": h.tracked,
    }


def frame_to_dict(f: InputFrame) -> dict:
    g = f.gaze
    return {
        "ts": f.timestamp,
        "gaze": {
            "ox": g.origin.x, "oy": g.origin.y, "oz": g.origin.z,
            "dx": g.direction.x, "dy": g.direction.y, "dz": g.direction.z,
        },
        "dh": hand_to_dict(f.dominant),
        "ndh": hand_to_dict(f.non_dominant),
    }


def _vec(v) -> Vec3:
    if len(v) != 3:
        raise ValueError("expected 3 components")
    return Vec3(float(v[0]), float(v[1]), float(v[2]))


def hand_from_dict(d: dict) -> HandPose:
    q = d["quat"]
    if len(q) != 4:
        raise ValueError("quat needs 4 components")
    return HandPose(
        _vec(d["thumb"]),
        _vec(d["index"]),
        _vec(d["palm"]),
        Orientation(*(float(x) for x in q)),
        bool(d["tracked"]),
    )


def frame_from_dict(d: dict) -> InputFrame:
    g = d["gaze"]
    return InputFrame(
        float(d["ts"]),
        GazeRay(Vec3(float(g["ox"]), float(g["oy"]), float(g["oz"])), Vec3(float(g["dx"]), float(g["dy"]), float(g["dz"]))),
        hand_from_dict(d["dh"]),
        hand_from_dict(d["ndh"]),
    )


def format_trace(frames: Iterable[InputFrame], header: Optional[dict] = None) -> str:
    lines = []
    if header is not None:
        lines.append(_dumps({"schema": TRACE_SCHEMA, **{k: v for k, v in header.items() if k != "schema"}}))
    lines.extend(_dumps(frame_to_dict(f)) for f in frames)
    return "".join(line + "\n" for line in lines)


def write_trace(path, frames: Iterable[InputFrame], header: Optional[dict] = None) -> None:
    Path(path).write_text(format_trace(frames, header), encoding="utf-8")


def parse_trace(text: str) -> Trace:
    trace = Trace()
    last_ts = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise ParseError("expected a JSON object", lineno)
        if "schema" in obj:
            if lineno != 1 or trace.header is not None:
                raise ParseError("header must be the first line", lineno)
            if obj["schema"] != TRACE_SCHEMA:
                raise VersionError(f"unsupported trace schema {obj['schema']!r} (expected {TRACE_SCHEMA})")
            trace.header = obj
            continue
        try:
            frame = frame_from_dict(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad frame record ({exc!r})", lineno) from None
        if last_ts is not None and frame.timestamp <= last_ts:
            raise ClockError(f"line {lineno}: timestamp {frame.timestamp!r} does not follow {last_ts!r}")
        last_ts = frame.timestamp
        trace.frames.append(frame)
    return trace


def read_trace(path) -> Trace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))
