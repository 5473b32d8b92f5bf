"""Figure rendering for benchmark reports.

Two figures accompany each bench run: a derivative view of the combined
signal with the extracted envelopes (showing that only the joint frame
breaks them), and a per-configuration comparison of filtered outputs
around the joint.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchResult
from .channel import derivative_tracks

_ZOOM_BEFORE = 45
_ZOOM_AFTER = 90


def _zoom(result: BenchResult) -> slice:
    joint = result.benchmark.joint_frame
    n = len(result.benchmark.combined)
    return slice(max(0, joint - _ZOOM_BEFORE), min(n, joint + _ZOOM_AFTER))


def save_derivative_figure(result: BenchResult, path: str | Path) -> Path:
    """Signal, velocity, acceleration and jerk with their envelopes.

    Dashed horizontal lines are the per-order bounds; the vertical line
    marks the joint frame.
    """
    bm = result.benchmark
    bounds = result.bounds
    v, a, j = derivative_tracks(bm.combined)
    t = bm.combined.times
    rows = [
        ("signal", t, bm.combined.values, bounds.x_min, bounds.x_max),
        ("velocity", t[1:], v, bounds.v_min, bounds.v_max),
        ("acceleration", t[2:], a, bounds.a_min, bounds.a_max),
        ("jerk", t[3:], j, bounds.j_min, bounds.j_max),
    ]
    window = _zoom(result)
    t_joint = t[bm.joint_frame]
    fig, axes = plt.subplots(4, 1, figsize=(9, 10), sharex=True)
    for ax, (label, tt, track, lo, hi) in zip(axes, rows):
        offset = len(t) - len(tt)
        sl = slice(max(window.start - offset, 0), max(window.stop - offset, 0))
        ax.plot(tt[sl], track[sl], lw=1.0, color="tab:blue")
        ax.axhline(lo, ls="--", lw=0.8, color="tab:gray")
        ax.axhline(hi, ls="--", lw=0.8, color="tab:gray")
        ax.axvline(t_joint, lw=0.8, color="tab:red")
        ax.set_ylabel(label)
    axes[-1].set_xlabel("time [s]")
    fig.suptitle("Combined signal derivatives vs extracted envelopes")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_comparison_figure(result: BenchResult, path: str | Path) -> Path:
    """Raw vs filtered output for every configuration, zoomed at the joint."""
    bm = result.benchmark
    window = _zoom(result)
    t = bm.combined.times[window]
    raw = bm.combined.values[window]
    runs = [r for r in result.runs if r.name != "Raw Combined"]
    if not runs:
        runs = result.runs
    ncols = 2
    nrows = (len(runs) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(10, 2.6 * nrows), sharex=True, sharey=True, squeeze=False
    )
    t_joint = bm.combined.times[bm.joint_frame]
    for ax, run in zip(axes.flat, runs):
        ax.plot(t, raw, lw=0.9, color="tab:gray", label="raw")
        ax.plot(t, run.output.values[window], lw=1.1, color="tab:blue", label="filtered")
        act = run.active[window].astype(bool)
        if act.any():
            ax.fill_between(t, *ax.get_ylim(), where=act, color="tab:orange", alpha=0.15)
        ax.axvline(t_joint, lw=0.8, color="tab:red")
        ax.set_title(run.name, fontsize=10)
    for ax in axes.flat[len(runs):]:
        ax.set_visible(False)
    axes[0][0].legend(fontsize=8, loc="upper left")
    for ax in axes[-1]:
        ax.set_xlabel("time [s]")
    fig.suptitle("Filter outputs around the joint frame")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
