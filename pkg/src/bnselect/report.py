"""File output for verification runs: delimited tables plus rendered charts."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def write_rows(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def gap_chart(path, values, *, title, ylabel, threshold=None) -> Path:
    """One bar per instance on a log scale, with an optional pass line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(8, 4))
    floor = 1e-17
    shown = [max(v, floor) for v in values]
    ax.bar(range(len(shown)), shown, color="#4878a8", width=0.9)
    ax.set_yscale("log")
    if threshold is not None:
        ax.axhline(threshold, color="#c04040", linestyle="--",
                   label=f"tolerance {threshold:g}")
        ax.legend(loc="upper right")
    ax.set_xlabel("instance")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def recovery_chart(path, truths, recovered, *, title) -> Path:
    """Recovered values against ground truth, with the identity line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], color="#999999", linewidth=1)
    ax.scatter(truths, recovered, s=14, color="#4878a8", alpha=0.7)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("true stratum weight")
    ax.set_ylabel("recovered root")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def verdict_chart(path, labels, rates, *, title) -> Path:
    """Share of consistent verdicts per instance family."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(labels, rates, color=["#4878a8", "#c08a40"][:len(labels)])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction judged compatible")
    ax.set_title(title)
    for i, r in enumerate(rates):
        ax.text(i, r + 0.02, f"{r:.2f}", ha="center")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
