"""Figure rendering for the CLI report path.

Figures are written next to the delimited output; the file suffix picks
the matplotlib backend format (the CLI uses .svg).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import CrosscheckResult, SweepResult, TrajectoryPanel


def render_sweep(result: SweepResult, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    counts = np.arange(result.fidelity.shape[1])
    mesh = ax.pcolormesh(
        counts, result.h_b, result.fidelity, shading="nearest", vmin=0.0, vmax=1.0
    )
    fig.colorbar(mesh, ax=ax, label="fidelity to thermal target")
    ax.set_xlabel("collision number")
    ax.set_ylabel(r"ancilla half-gap $h_b$ (rad/ns)")
    ax.set_title("thermalization vs ancilla frequency")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_panel(result: TrajectoryPanel, path: str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, traj in zip(result.labels, result.trajectories):
        ax.plot(traj.times, traj.fidelity, label=label, linewidth=1.2)
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("fidelity to thermal target")
    ax.set_ylim(0.0, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_crosscheck(result: CrosscheckResult, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(result.times, result.trace_distance, linewidth=1.2)
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("trace distance between engines")
    ax.set_title("collision engine vs master equation")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
