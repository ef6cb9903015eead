"""Figures written next to the CSV outputs."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from statistics import median

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (5.5, 3.6),
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}

MARKERS = {"agnostic": "o", "group_realizable": "s", "approximation": "^", "passive": "x"}


def _save(fig, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps the bytes reproducible
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_run_figures(rows, out_dir) -> list[Path]:
    """Median label totals against eps, and per-seed excess, one series per algorithm."""
    out_dir = Path(out_dir)
    labels = defaultdict(lambda: defaultdict(list))
    excess = defaultdict(list)
    for r in rows:
        labels[r["algorithm"]][float(r["eps"])].append(int(r["total_labels"]))
        excess[r["algorithm"]].append((float(r["eps"]), float(r["excess"])))
    written = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for algo, by_eps in sorted(labels.items()):
            xs = sorted(by_eps)
            ax.plot(xs, [max(median(by_eps[x]), 1) for x in xs], marker=MARKERS.get(algo, "."), label=algo)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.invert_xaxis()
        ax.set_xlabel("target excess eps")
        ax.set_ylabel("label queries (median over seeds)")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, out_dir / "labels_vs_eps.png")
        written.append(out_dir / "labels_vs_eps.png")

        fig, ax = plt.subplots()
        for algo, pts in sorted(excess.items()):
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], marker=MARKERS.get(algo, "."), label=algo, s=14)
        eps_vals = sorted({float(r["eps"]) for r in rows})
        ax.plot(eps_vals, eps_vals, color="0.5", lw=0.8, ls="--", label="excess = eps")
        ax.set_xlabel("target excess eps")
        ax.set_ylabel("true excess max-group loss")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, out_dir / "excess.png")
        written.append(out_dir / "excess.png")
    return written


def plot_comparison(rows, path) -> Path:
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        names = [f"{r['algorithm']}\neps={r['eps']}" for r in rows]
        ax.bar(range(len(rows)), [float(r["ratio_median"]) for r in rows], color="0.35")
        ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
        ax.set_xticks(range(len(rows)), names, fontsize=7)
        ax.set_yscale("log")
        ax.set_ylabel("active / passive labels (median)")
        fig.tight_layout()
        _save(fig, path)
    return path
