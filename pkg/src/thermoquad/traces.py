"""Trace/summary serialization and the run manifest.

Traces are CSV with a fixed, versioned column order, one row per 50 Hz
step. Floats are written with ``repr`` (shortest round-trip), so reading a
trace back recovers bit-identical values; summaries are JSON with sorted
keys. Every output directory carries a manifest recording the config
checksum, seed, subcommand, and package version, which is enough to
reproduce the directory exactly.
"""

from __future__ import annotations

import json
import time as _time
from pathlib import Path

import numpy as np

from .config import MOTOR_LABELS
from .harness import EpisodeRecord, REWARD_KEYS

TRACE_FORMAT = "thermoquad-trace-v1"
SUMMARY_FORMAT = "thermoquad-summary-v1"

TEMP_COLUMNS = [f"temp_{label}" for label in MOTOR_LABELS] + [
    "temp_COMPUTER", "temp_AMBIENT"]
HEAT_COLUMNS = [f"heat_{label}" for label in MOTOR_LABELS] + [
    "heat_COMPUTER", "heat_AMBIENT"]
ACTION_NOM_COLUMNS = [f"a_nom_{label}" for label in MOTOR_LABELS]
ACTION_RES_COLUMNS = [f"a_res_{label}" for label in MOTOR_LABELS]
REWARD_COLUMNS = [f"reward_{name}" for name in REWARD_KEYS]

TRACE_COLUMNS = (
    ["time_s"]
    + TEMP_COLUMNS
    + ["cmd_vx", "cmd_vy", "cmd_yaw", "cmdmod_vx", "cmdmod_vy", "cmdmod_yaw",
       "ach_vx", "ach_vy", "ach_yaw", "pos_x", "pos_y", "intended_x",
       "intended_y"]
    + ACTION_NOM_COLUMNS
    + ACTION_RES_COLUMNS
    + HEAT_COLUMNS
    + ["clip_count", "tracking_err", "engagement"]
    + REWARD_COLUMNS
)


def _fmt(x) -> str:
    return repr(float(x))


def write_record_trace(rec: EpisodeRecord, path: str | Path) -> None:
    """Write a full episode record as a trace CSV."""
    rows = []
    T = rec.time.shape[0]
    for t in range(T):
        rows.append(_record_row(rec, t))
    _write_trace_rows(rows, path)


def _record_row(rec: EpisodeRecord, t: int) -> list[float]:
    row = [rec.time[t]]
    row += list(rec.temps[t])
    row += list(rec.cmd[t]) + list(rec.cmd_mod[t]) + list(rec.v_achieved[t])
    row += list(rec.pos[t]) + list(rec.pos_intended[t])
    row += list(rec.a_nom[t]) + list(rec.a_res[t]) + list(rec.heat[t])
    row += [rec.clip_count[t], rec.tracking_err[t], rec.engagement[t]]
    row += [rec.rewards[name][t] for name in REWARD_KEYS]
    return row


def trace_row_from_dict(d: dict) -> list[float]:
    """Flatten one harness trace-row dict into the fixed column order."""
    row = [d["t"]]
    row += list(d["temps"])
    row += list(d["cmd"]) + list(d["cmd_mod"]) + list(d["v_achieved"])
    row += list(d["pos"]) + list(d["pos_intended"])
    row += list(d["a_nom"]) + list(d["a_res"]) + list(d["heat"])
    row += [d["clip_count"], d["tracking_err"], d["engagement"]]
    row += [d["rewards"][name] for name in REWARD_KEYS]
    return row


def _write_trace_rows(rows: list[list[float]], path: str | Path) -> None:
    lines = [f"# format: {TRACE_FORMAT}", ",".join(TRACE_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_dict_trace(rows: list[dict], path: str | Path) -> None:
    _write_trace_rows([trace_row_from_dict(d) for d in rows], path)


def read_trace(path: str | Path) -> dict[str, np.ndarray]:
    """Read a trace CSV back into column arrays (bit-exact floats)."""
    lines = Path(path).read_text().strip().split("\n")
    if not lines or not lines[0].startswith("# format:"):
        raise ValueError(f"{path}: missing trace format line")
    fmt = lines[0].split(":", 1)[1].strip()
    if fmt != TRACE_FORMAT:
        raise ValueError(f"{path}: unsupported trace format {fmt!r}")
    header = lines[1].split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[2:]])
    if data.size == 0:
        data = np.zeros((0, len(header)))
    return {name: data[:, k] for k, name in enumerate(header)}


def write_summary(summary: dict, path: str | Path) -> None:
    """Deterministic JSON summary: sorted keys, repr floats, no timestamps."""
    payload = {"format": SUMMARY_FORMAT}
    payload.update(summary)
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def read_summary(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def experiment_summary(result: dict) -> dict:
    """Strip non-serializable parts (traces) from an experiment result."""
    return {k: v for k, v in result.items() if k != "traces"}


def write_fig_scatter(agents: list[dict], path: str | Path) -> None:
    """Per-agent (tracking error, max temp) scatter data for plotting."""
    lines = ["agent,payload_kg,ambient_c,tracking_error,max_motor_temp_c,"
             "overheated,outcome"]
    for a in agents:
        lines.append(
            f"{a['agent']},{_fmt(a['payload_kg'])},{_fmt(a['ambient_c'])},"
            f"{_fmt(a['tracking_error'])},{_fmt(a['max_motor_temp_c'])},"
            f"{int(a['overheated'])},{a['outcome']}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(
    out_dir: str | Path,
    subcommand: str,
    seed: int | None,
    config_text: str,
    flags: dict,
    version: str,
) -> None:
    """Manifest + exact config echo: enough to reproduce the directory."""
    from .config import config_checksum

    manifest = {
        "subcommand": subcommand,
        "seed": seed,
        "config_sha256": config_checksum(config_text),
        "flags": flags,
        "version": version,
        "timestamp_unix": int(_time.time()),
    }
    Path(out_dir, "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    Path(out_dir, "config_used.yaml").write_text(config_text)
