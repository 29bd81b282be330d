"""Matplotlib settings for report figures.

SVG output is made reproducible by fixing the id hash salt, dropping the
creation date, and emitting text as paths.
"""

from __future__ import annotations

import contextlib

import matplotlib as mpl

SERIES_COLORS = ("#4c72b0", "#dd8452")

RC = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "axes.grid.axis": "y",
    "grid.alpha": 0.3,
    "svg.fonttype": "path",
    "svg.hashsalt": "hazardgrid",
    "figure.dpi": 100,
}

SVG_METADATA = {"Date": None, "Creator": None}


def figure_size(n_days: int) -> tuple[float, float]:
    width = min(max(3.5, 0.6 * n_days + 1.5), 16.0)
    return (width, 3.2)


@contextlib.contextmanager
def report_style():
    with mpl.rc_context(RC):
        yield
