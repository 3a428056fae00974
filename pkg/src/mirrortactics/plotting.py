"""Matplotlib figure rendering for training logs and metric reports.

Figures are written next to the delimited outputs; everything uses the Agg
backend so the CLI works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_training_curves(rows: list[dict], path: str | Path) -> Path:
    """Cumulative-reward and loss curves for one training run."""
    path = Path(path)
    steps = [r["step"] for r in rows]
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    panels = [
        ("mean_cum_reward", "mean cumulative reward"),
        ("gail_loss", "discriminator loss"),
        ("bc_loss", "behavioral cloning loss"),
        ("entropy", "policy entropy"),
    ]
    for ax, (key, label) in zip(axes.flat, panels):
        ax.plot(steps, [r[key] for r in rows], linewidth=1.2)
        ax.set_xlabel("steps")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_metric_comparison(
    table: dict[str, dict[str, float]], metric_keys: list[str], path: str | Path
) -> Path:
    """Grouped bar chart: one panel per metric, one bar per source."""
    path = Path(path)
    sources = list(table)
    n = len(metric_keys)
    cols = 2
    rows_n = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows_n, cols, figsize=(5 * cols, 3 * rows_n), squeeze=False)
    x = np.arange(len(sources))
    for i, key in enumerate(metric_keys):
        ax = axes[i // cols][i % cols]
        values = [table[s][key] for s in sources]
        ax.bar(x, values, color=plt.cm.tab10.colors[: len(sources)])
        ax.set_xticks(x)
        ax.set_xticklabels(sources, rotation=20, ha="right", fontsize=8)
        ax.set_title(key.replace("_", " "), fontsize=10)
        ax.grid(True, axis="y", alpha=0.3)
    for j in range(n, rows_n * cols):
        axes[j // cols][j % cols].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
