"""Static figures: Baire array heat strips and base-reduction error curves.

Figures go through the Agg canvas directly (no pyplot state) and PNG
metadata is stripped, so the same input gives byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.image import imsave

from .baire import DigitArray
from .formats import write_error_trace

# red -> violet, one colour per decimal digit
PALETTE = np.array(
    [
        (230, 25, 25),
        (245, 130, 32),
        (250, 200, 40),
        (240, 240, 60),
        (150, 210, 60),
        (40, 170, 70),
        (40, 190, 190),
        (40, 110, 220),
        (70, 50, 170),
        (150, 40, 180),
    ],
    dtype=np.uint8,
)

PNG_METADATA = {"Software": None}


def palette_for(base: int) -> np.ndarray:
    """``base`` colours spread evenly over the 10-colour rainbow."""
    if not 2 <= base <= len(PALETTE):
        raise ValueError(f"no palette for base {base}")
    picks = np.rint(np.arange(base) * (len(PALETTE) - 1) / (base - 1)).astype(int)
    return PALETTE[picks]


def heatstrip_pixels(A: DigitArray) -> np.ndarray:
    """J x I x 3 image; level 1 is the bottom row, objects run left to right."""
    colours = palette_for(A.base)
    return colours[A.digits.T[::-1]]


def emit_heatstrip(A: DigitArray, path) -> Path:
    path = Path(path)
    imsave(path, heatstrip_pixels(A), format="png", metadata=PNG_METADATA)
    return path


def emit_error_curves(trace, csv_path, png_path=None):
    """Write the trace as CSV and, if ``png_path`` is given, a two-curve line plot."""
    if len(trace) == 0:
        raise ValueError("empty error trace")
    write_error_trace(csv_path, trace)
    if png_path is None:
        return Path(csv_path), None
    fig = Figure(figsize=(6, 4), dpi=100)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    ax.plot(trace.bases, trace.err_vs_original, "o-", color="black", label="vs original")
    ax.plot(trace.bases, trace.err_vs_previous, "s-", color="red", label="vs previous")
    ax.set_xlabel("base m")
    ax.set_ylabel("mean squared error (normalized)")
    ax.set_xlim(max(trace.bases) + 0.5, min(trace.bases) - 0.5)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(png_path, format="png", metadata=PNG_METADATA)
    return Path(csv_path), Path(png_path)


def emit_histogram_plot(hist, path) -> Path:
    """Grouped bars of digit frequency per level."""
    hist = np.asarray(hist, dtype=np.float64)
    n_levels, base = hist.shape
    freq = hist / hist.sum(axis=1, keepdims=True)
    fig = Figure(figsize=(7, 4), dpi=100)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    width = 0.8 / n_levels
    x = np.arange(base)
    for j in range(n_levels):
        ax.bar(x + j * width, freq[j], width=width, label=f"level {j + 1}")
    ax.set_xticks(x + 0.4 - width / 2, [str(v) for v in range(base)])
    ax.set_xlabel("digit")
    ax.set_ylabel("frequency")
    ax.legend(frameon=False, fontsize="small", ncol=2)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=PNG_METADATA)
    return Path(path)
