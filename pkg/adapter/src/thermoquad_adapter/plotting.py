"""Plot helpers for the primary CSV outputs (traces and batch scatter)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from thermoquad.config import MOTOR_LABELS  # noqa: E402
from thermoquad.traces import read_trace  # noqa: E402


def plot_trace(trace_csv: str | Path, out_png: str | Path,
               t_max_c: float = 60.0) -> None:
    """Motor temperatures, commanded vs achieved velocity, and reward."""
    tr = read_trace(trace_csv)
    t = tr["time_s"]
    fig, axes = plt.subplots(3, 1, figsize=(9, 9), sharex=True)

    for label in MOTOR_LABELS:
        axes[0].plot(t, tr[f"temp_{label}"], lw=0.8, label=label)
    axes[0].axhline(t_max_c, color="red", ls="--", lw=1.0)
    axes[0].set_ylabel("motor temp [C]")
    axes[0].legend(ncol=4, fontsize=6, loc="upper left")

    axes[1].plot(t, tr["cmd_vx"], "k--", lw=1.0, label="cmd vx")
    axes[1].plot(t, tr["ach_vx"], "C0", lw=1.0, label="achieved vx")
    axes[1].plot(t, tr["cmd_vy"], "k:", lw=1.0, label="cmd vy")
    axes[1].plot(t, tr["ach_vy"], "C1", lw=1.0, label="achieved vy")
    axes[1].set_ylabel("velocity [m/s]")
    axes[1].legend(fontsize=7)

    axes[2].plot(t, tr["reward_total"], "C2", lw=0.8, label="total")
    axes[2].plot(t, tr["reward_thermal_safety"], "C3", lw=0.8, label="thermal")
    axes[2].set_ylabel("reward")
    axes[2].set_xlabel("time [s]")
    axes[2].legend(fontsize=7)

    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)


def plot_scatter(scatter_csv: str | Path, out_png: str | Path,
                 t_max_c: float = 60.0) -> None:
    """Tracking error vs max motor temperature, one dot per agent."""
    rows = Path(scatter_csv).read_text().strip().split("\n")
    header = rows[0].split(",")
    ix = {name: k for k, name in enumerate(header)}
    err, temp, hot = [], [], []
    for line in rows[1:]:
        parts = line.split(",")
        err.append(float(parts[ix["tracking_error"]]))
        temp.append(float(parts[ix["max_motor_temp_c"]]))
        hot.append(parts[ix["overheated"]] == "1")
    err, temp, hot = np.array(err), np.array(temp), np.array(hot)

    fig, ax = plt.subplots(figsize=(6, 5))
    ax.scatter(err[~hot], temp[~hot], s=14, c="C0", label="within limit")
    if hot.any():
        ax.scatter(err[hot], temp[hot], s=14, c="C3", label="overheated")
    ax.axhline(t_max_c, color="red", ls="--", lw=1.0)
    ax.set_xlabel("mean velocity tracking error [m/s]")
    ax.set_ylabel("max motor temperature [C]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)
