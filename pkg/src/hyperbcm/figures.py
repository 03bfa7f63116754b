"""Matplotlib rendering for experiment reports.

Every experiment writes its delimited output first; these helpers render a
companion figure next to it. The Agg backend keeps rendering headless.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.figsize": (7.0, 4.4),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
}


def _save(fig, path: Path, provenance: dict | None = None) -> None:
    metadata = None
    if provenance is not None:
        metadata = {"Description": json.dumps(provenance, sort_keys=True)}
    fig.savefig(path, bbox_inches="tight", metadata=metadata)
    plt.close(fig)


def trajectory_figure(
    path: Path,
    times: np.ndarray,
    states: np.ndarray,
    community_of: np.ndarray | None = None,
    max_lines: int = 400,
    title: str = "Opinion trajectories",
    provenance: dict | None = None,
) -> None:
    """One line per node; large node counts are subsampled for legibility."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        n = states.shape[1]
        if n > max_lines:
            keep = np.linspace(0, n - 1, max_lines).astype(int)
        else:
            keep = np.arange(n)
        if community_of is not None:
            cmap = plt.get_cmap("tab10")
            colors = [cmap(int(community_of[i]) % 10) for i in keep]
        else:
            colors = [plt.get_cmap("viridis")(v) for v in np.linspace(0, 1, keep.size)]
        for color, i in zip(colors, keep):
            ax.plot(times, states[:, i], lw=0.6, alpha=0.5, color=color)
        ax.set_xlabel("step")
        ax.set_ylabel("opinion")
        ax.set_title(title)
        _save(fig, path, provenance)


def sweep_figure(
    path: Path,
    sigmas: np.ndarray,
    mean_t: np.ndarray,
    std_t: np.ndarray,
    confidence_bound: float,
    cutoff: int,
    provenance: dict | None = None,
) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(sigmas, mean_t, color="black", lw=1.2, label="mean convergence time")
        ax.fill_between(
            sigmas, np.maximum(mean_t - std_t, 1.0), mean_t + std_t, color="tab:blue", alpha=0.3
        )
        ax.axvline(confidence_bound**0.5, color="red", ls="--", lw=1.0, label="std = sqrt(bound)")
        ax.axhline(cutoff, color="gray", ls=":", lw=1.0, label="cutoff")
        ax.set_yscale("log")
        ax.set_xlabel("initial opinion standard deviation")
        ax.set_ylabel("empirical convergence time")
        ax.legend(loc="best", fontsize=8)
        _save(fig, path, provenance)


def estar_figure(
    path: Path,
    node_counts: np.ndarray,
    expected_sizes: np.ndarray,
    slope: float,
    intercept: float,
    provenance: dict | None = None,
) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(node_counts, expected_sizes, ".", ms=3, label="estimate")
        ax.plot(
            node_counts,
            slope * node_counts + intercept,
            color="red",
            lw=1.0,
            label=f"fit: {slope:.4f} N + {intercept:.2f}",
        )
        ax.set_xlabel("number of nodes")
        ax.set_ylabel("expected size of first concordant hyperedge")
        ax.legend(loc="best", fontsize=8)
        _save(fig, path, provenance)


def jumps_figure(
    path: Path,
    rows_by_sigma: dict[float, tuple[np.ndarray, np.ndarray]],
    fits: dict[float, tuple[float, float]],
    provenance: dict | None = None,
) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        cmap = plt.get_cmap("tab10")
        for idx, (sigma, (mean_sizes, mean_jumps)) in enumerate(sorted(rows_by_sigma.items())):
            color = cmap(idx % 10)
            ax.plot(mean_sizes, mean_jumps, ".", ms=3, alpha=0.6, color=color)
            slope, intercept = fits[sigma]
            grid = np.linspace(mean_sizes.min(), mean_sizes.max(), 50)
            ax.plot(
                grid,
                slope * grid + intercept,
                lw=1.2,
                color=color,
                label=f"std={sigma:g}: slope {slope:.4f}",
            )
        ax.set_xlabel("mean hyperedge size")
        ax.set_ylabel("mean opinion jumps in the first step")
        ax.legend(loc="best", fontsize=8)
        _save(fig, path, provenance)


def census_figure(
    path: Path,
    cluster_counts: np.ndarray,
    provenance: dict | None = None,
) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        values, counts = np.unique(cluster_counts, return_counts=True)
        ax.bar(values, counts, width=0.6, color="tab:blue")
        ax.set_xlabel("opinion clusters in the limit state")
        ax.set_ylabel("trials")
        ax.set_xticks(values)
        _save(fig, path, provenance)
