"""Standalone SVG report figures (scatter and histogram comparisons)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "enercomp"

import matplotlib.pyplot as plt
import numpy as np


def scatter_svg(path: str | Path, truth: np.ndarray, predicted: np.ndarray,
                title: str, unit: str, annotation: str = "") -> None:
    """Truth (x) vs prediction (y) with the identity diagonal."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    lo = float(min(truth.min(), predicted.min()))
    hi = float(max(truth.max(), predicted.max()))
    pad = 0.05 * (hi - lo or 1.0)
    ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad],
            linestyle="--", color="grey", linewidth=1)
    ax.scatter(truth, predicted, s=12, alpha=0.6, edgecolors="none")
    ax.set_xlabel(f"simulated [{unit}]")
    ax.set_ylabel(f"predicted [{unit}]")
    ax.set_title(title)
    if annotation:
        ax.text(0.03, 0.97, annotation, transform=ax.transAxes,
                va="top", fontsize=9)
    ax.set_xlim(lo - pad, hi + pad)
    ax.set_ylim(lo - pad, hi + pad)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def error_hist_svg(path: str | Path, errors_by_model: dict[str, np.ndarray],
                   title: str, unit: str, bins: int = 30) -> None:
    """Signed prediction errors, one overlaid histogram per model."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    allv = np.concatenate(list(errors_by_model.values()))
    edges = np.linspace(allv.min(), allv.max(), bins + 1)
    for label, err in errors_by_model.items():
        ax.hist(err, bins=edges, alpha=0.5, label=label)
    ax.axvline(0.0, color="grey", linewidth=1)
    ax.set_xlabel(f"prediction - simulation [{unit}]")
    ax.set_ylabel("count")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def distribution_svg(path: str | Path, edges: list[float],
                     counts_all: list[int], counts_low: list[int] | None,
                     title: str, xlabel: str) -> None:
    """Full design set vs low-energy subset, step histograms."""
    fig, ax = plt.subplots(figsize=(4.5, 3.0))
    centers = 0.5 * (np.asarray(edges[:-1]) + np.asarray(edges[1:]))
    ax.step(centers, counts_all, where="mid", label="all designs")
    if counts_low is not None:
        ax.step(centers, counts_low, where="mid", linestyle="--",
                label="low energy")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
