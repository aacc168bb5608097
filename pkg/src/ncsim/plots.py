"""SVG figure rendering for sweep summaries and trajectories.

All figures are written as SVG with a pinned hash salt and no creation
date, so re-rendering the same data produces byte-identical files; golden
files in the test suite rely on this.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("svg", force=False)
import matplotlib.pyplot as plt

from .experiment import SweepSummary
from .hybrid_sim import Trajectory

__all__ = ["emit_plots", "tbar_plot", "state_overlay_plot"]

_SVG_SALT = "ncsim"


def _save(fig, path) -> None:
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def _deterministic_rc():
    rc = {
        "svg.hashsalt": _SVG_SALT,
        "svg.fonttype": "path",
        "figure.figsize": (6.0, 3.6),
        "axes.grid": True,
        "grid.alpha": 0.3,
    }
    return plt.rc_context(rc)


def tbar_plot(summary: SweepSummary, path) -> None:
    """Average transmission interval (ms) versus the deadband, one line per
    (protocol, policy) pair present in the summary."""
    with _deterministic_rc():
        fig, ax = plt.subplots()
        groups: Dict[tuple, list] = {}
        for row in summary.rows:
            groups.setdefault((row.protocol, row.lambda_mode), []).append(row)
        for (kind, mode), rows in sorted(groups.items()):
            ds = [r.deadband for r in rows]
            tb = [1000.0 * r.tbar_mean for r in rows]
            ax.plot(ds, tb, marker="o", label=f"{kind} ({mode} lambda)")
        ax.set_xlabel("deadband d")
        ax.set_ylabel("average transmission interval [ms]")
        ax.legend()
        fig.tight_layout()
        _save(fig, path)


def state_overlay_plot(
    traj_solid: Trajectory,
    traj_dashed: Trajectory,
    label_solid: str,
    label_dashed: str,
    path,
    n_states: int = 2,
) -> None:
    """First plant states over time for two runs (solid versus dashed), one
    subplot per state."""
    with _deterministic_rc():
        fig, axes = plt.subplots(n_states, 1, sharex=True, figsize=(6.0, 2.2 * n_states))
        if n_states == 1:
            axes = [axes]
        for i, ax in enumerate(axes):
            ax.plot(traj_solid.ts, traj_solid.xs[:, i], "-", label=label_solid)
            ax.plot(traj_dashed.ts, traj_dashed.xs[:, i], "--", label=label_dashed)
            ax.set_ylabel(f"x{i+1}")
        axes[-1].set_xlabel("t [s]")
        axes[0].legend()
        fig.tight_layout()
        _save(fig, path)


def emit_plots(
    summary: SweepSummary,
    trajectories: Optional[Dict[str, Trajectory]],
    outdir,
) -> List[str]:
    """Render the sweep figures into ``outdir`` and return the file paths.

    ``trajectories`` optionally maps labels to showcase runs; when at least
    two are given, the first two (label order) are overlaid solid/dashed.
    An empty summary produces no files and a warning.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: List[str] = []
    if not summary.rows:
        warnings.warn("empty sweep summary: no plots emitted")
        return written

    tbar_path = outdir / "tbar_vs_d.svg"
    tbar_plot(summary, tbar_path)
    written.append(str(tbar_path))

    if trajectories and len(trajectories) >= 2:
        labels = list(trajectories)[:2]
        kind = trajectories[labels[0]].protocol_kind
        overlay_path = outdir / f"states_{kind}.svg"
        state_overlay_plot(
            trajectories[labels[0]],
            trajectories[labels[1]],
            labels[0],
            labels[1],
            overlay_path,
        )
        written.append(str(overlay_path))
    return written
