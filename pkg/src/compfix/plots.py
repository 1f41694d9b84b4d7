"""SVG figures from an evaluation report: class sizes and per-class hit rates."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _rates(row):
    n = max(row["n"], 1)
    return row["pred_hits"] / n, row["rep_hits"] / n


def write_plots(report: dict, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    plt.rcParams["svg.hashsalt"] = "compfix"  # stable element IDs

    counts = sorted(report.get("class_counts", []), reverse=True)[:500]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(counts)), counts, width=1.0, color="#4c72b0")
    ax.set_xlabel("repair class (by popularity)")
    ax.set_ylabel("training programs")
    ax.set_yscale("log")
    ax.set_title("class sizes")
    fig.tight_layout()
    written.append(out / "class_sizes.svg")
    fig.savefig(written[-1], metadata={"Date": None})
    plt.close(fig)

    rows = [r for r in report.get("per_class", []) if r["class_id"] is not None]
    popular = [r for r in rows if r["class_id"] < 120]
    if popular:
        ids = [r["class_id"] for r in popular]
        pred, rep = zip(*(_rates(r) for r in popular))
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.plot(ids, pred, "o", label="prediction hit rate")
        ax.plot(ids, rep, "x", label="repair hit rate")
        ax.axvline(59.5, color="grey", lw=0.8, ls="--")
        ax.set_xlabel("class ID (0-59 head, 60-119 torso)")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(loc="lower left")
        fig.tight_layout()
        written.append(out / "per_class_hits.svg")
        fig.savefig(written[-1], metadata={"Date": None})
        plt.close(fig)

    if rows:
        sizes = [r["train_count"] for r in rows]
        pred, rep = zip(*(_rates(r) for r in rows))
        fig, axes = plt.subplots(1, 2, figsize=(8, 3.3), sharey=True)
        for ax, vals, name in ((axes[0], pred, "prediction"), (axes[1], rep, "repair")):
            ax.scatter(sizes, vals, s=12)
            ax.set_xscale("log")
            ax.set_xlabel("training points in class")
            ax.set_title(f"{name} hit rate")
        axes[0].set_ylim(-0.05, 1.05)
        fig.tight_layout()
        written.append(out / "hits_vs_train_size.svg")
        fig.savefig(written[-1], metadata={"Date": None})
        plt.close(fig)
    return written
