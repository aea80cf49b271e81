"""Figure rendering for experiment results.

Renders accuracy curves (mean with a standard-deviation band per shift
mode) and the improvement-versus-entropy scatter to PNG files. Uses the
Agg backend so rendering works headless; output bytes depend only on the
results and matplotlib version, keeping reruns identical.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiment import ExperimentResult, ImprovementTable, sweep_curves

_DPI = 150


def render_curves(results: list[ExperimentResult], path) -> Path:
    """One panel per dataset: test accuracy vs training fraction per mode."""
    if not results:
        raise ValueError("no results to render")
    path = Path(path)
    k = len(results)
    ncols = min(k, 2)
    nrows = math.ceil(k / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(5.2 * ncols, 3.6 * nrows), squeeze=False
    )
    for ax in axes.ravel()[k:]:
        ax.set_visible(False)
    for ax, result in zip(axes.ravel(), results):
        rows = sweep_curves(result)
        for mode_idx, mode in enumerate(result.plan.modes):
            mode_rows = [r for r in rows if r.mode == mode]
            # duplicate mode names would double rows; slice by position
            if len(mode_rows) != len(result.plan.fractions):
                mode_rows = rows[mode_idx :: len(result.plan.modes)]
            x = np.array([r.fraction for r in mode_rows])
            mean = np.array([r.mean_accuracy for r in mode_rows])
            std = np.array([r.std_accuracy for r in mode_rows])
            label = f"{mode} shift"
            (line,) = ax.plot(x, mean, marker="o", markersize=3, label=label)
            ax.fill_between(
                x, mean - std, mean + std, alpha=0.2, color=line.get_color()
            )
        ax.set_title(result.plan.name)
        ax.set_xlabel("training fraction")
        ax.set_ylabel("test accuracy")
        ax.set_ylim(0.0, 1.0)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_improvement(table: ImprovementTable, path) -> Path:
    """Improvement against edge entropy, one labeled point per dataset."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ents = [r.edge_entropy for r in table.rows]
    imps = [r.improvement for r in table.rows]
    ax.scatter(ents, imps, zorder=3)
    for r in table.rows:
        ax.annotate(
            r.dataset,
            (r.edge_entropy, r.improvement),
            textcoords="offset points",
            xytext=(6, 4),
            fontsize=8,
        )
    ax.axhline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax.set_xlabel("edge entropy")
    ax.set_ylabel(f"improvement at {table.fraction:g} training")
    if table.spearman is not None:
        ax.set_title(f"spearman rank correlation {table.spearman:+.3f}")
    else:
        ax.set_title("spearman rank correlation undefined")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
