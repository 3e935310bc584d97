"""Drawing: one 1200x800 PNG per figure spec."""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .csvio import load_csv
from .figures import FigureSpec

_DPI = 100
_SIZE = (12.0, 8.0)  # inches at 100 dpi -> 1200x800 px


def render(spec: FigureSpec, out_dir: Path) -> Path:
    """Render the figure and return the written PNG path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    datasets = [(label, load_csv(path)) for label, path in spec.curves]

    fig, axes = plt.subplots(len(spec.panels), 1, sharex=True,
                             figsize=_SIZE, dpi=_DPI, squeeze=False)
    axes = axes[:, 0]
    for ax, panel in zip(axes, spec.panels):
        drew_reference = False
        for label, cols in datasets:
            t = cols["t"]
            if t.size == 0:
                warnings.warn(f"{spec.figure_id}: empty CSV for '{label}', "
                              "drawing empty axes")
                continue
            ax.plot(t, cols[panel.channel], label=label, linewidth=1.2)
            if panel.reference and not drew_reference:
                ax.plot(t, cols[panel.reference], "k--", linewidth=1.0,
                        drawstyle="steps-post", label="reference")
                drew_reference = True
        ax.set_ylabel(panel.ylabel)
        ax.grid(True, alpha=0.3)
        if any(cols["t"].size for _, cols in datasets):
            ax.legend(loc="best", fontsize=9)
    axes[-1].set_xlabel("time [s]")
    axes[0].set_title(spec.title)
    fig.tight_layout()

    out_path = out_dir / f"{spec.figure_id}.png"
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path
