"""Figures for the ``--figures`` option of the CLI (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .charges import ChargeLedger  # noqa: E402


def charge_figure(ledger: ChargeLedger, path: Path, title: str = "final charges") -> Path:
    """Bar chart of initial and final charge per vertex."""
    verts = sorted(ledger.initial)
    fin = ledger.final
    fig, ax = plt.subplots(figsize=(max(4.0, 0.25 * len(verts)), 3.2))
    xs = range(len(verts))
    ax.bar([x - 0.2 for x in xs], [float(ledger.initial[v]) for v in verts], 0.4, label="initial")
    colors = ["tab:red" if fin[v] < 0 else "tab:green" for v in verts]
    ax.bar([x + 0.2 for x in xs], [float(fin[v]) for v in verts], 0.4, color=colors, label="final")
    ax.axhline(0, color="black", linewidth=0.6)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(v) for v in verts], fontsize=6, rotation=90)
    ax.set_xlabel("vertex")
    ax.set_ylabel("charge")
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def bench_figure(rows: Sequence[dict], path: Path) -> Path:
    """Runtime against vertex count, one series per method."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for method in sorted({r["method"] for r in rows}):
        pts = sorted((r["n"], r["seconds"]) for r in rows if r["method"] == method)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o", markersize=3, label=method)
    ax.set_xlabel("vertices")
    ax.set_ylabel("seconds")
    ax.set_yscale("symlog", linthresh=1e-3)
    ax.legend(fontsize=7)
    ax.set_title("solver runtime")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path
