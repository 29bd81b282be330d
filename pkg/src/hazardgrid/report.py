"""CSV outputs, manifest digests, and box-plot SVG charts."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .errors import SchemaError
from .hazards import HazardType, hazard_sort_key
from .plotstyle import SERIES_COLORS, SVG_METADATA, figure_size, report_style
from .resilience import ScenarioResult, ShedStats, StudySummary

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
MANIFEST_FILE = "manifest.json"

RESULTS_HEADER = ["hazard", "day", "k", "pre_shed_mwh", "post_shed_mwh", "pre_outages", "post_outages", "overlap"]
_STAT_FIELDS = ["min", "q1", "median", "q3", "max", "mean"]
SUMMARY_HEADER = (
    ["hazard", "day", "scenarios", "daily_demand_mwh"]
    + [f"pre_{s}" for s in _STAT_FIELDS]
    + [f"post_{s}" for s in _STAT_FIELDS]
    + [
        "mean_delta_mwh",
        "pre_shed_fraction",
        "post_shed_fraction",
        "mean_pre_outages",
        "scenarios_with_overlap",
        "fully_prevented",
    ]
)


def _num(x: float | int | None) -> str:
    if x is None:
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


def results_to_csv(results: Iterable[ScenarioResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for r in sorted(results, key=lambda r: r.key):
        w.writerow(
            [
                r.hazard.value,
                r.day,
                r.k,
                _num(r.pre_shed),
                _num(r.post_shed),
                r.pre_outage_count,
                _num(r.post_outage_count),
                _num(r.overlap_count),
            ]
        )
    return buf.getvalue()


def read_results(text: str) -> list[ScenarioResult]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header != RESULTS_HEADER:
        raise SchemaError(f"bad results header {header!r}", locator="row 1")

    def opt(v: str, kind):
        return kind(v) if v != "" else None

    out = []
    for n, row in enumerate(rows, start=2):
        if not row:
            continue
        try:
            hazard, day, k, pre, post, pre_n, post_n, overlap = row
            out.append(
                ScenarioResult(
                    HazardType.parse(hazard),
                    int(day),
                    int(k),
                    float(pre),
                    opt(post, float),
                    int(pre_n),
                    opt(post_n, int),
                    opt(overlap, int),
                )
            )
        except (ValueError, SchemaError) as exc:
            raise SchemaError(f"bad results row: {exc}", locator=f"row {n}") from None
    return out


def summary_to_csv(summary: StudySummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for d in summary.days:
        post = [getattr(d.post, s) for s in _STAT_FIELDS] if d.post is not None else [None] * len(_STAT_FIELDS)
        w.writerow(
            [d.hazard.value, d.day, d.scenarios, _num(d.daily_demand_mwh)]
            + [_num(getattr(d.pre, s)) for s in _STAT_FIELDS]
            + [_num(v) for v in post]
            + [
                _num(d.mean_delta),
                _num(d.pre_shed_fraction),
                _num(d.post_shed_fraction),
                _num(d.mean_pre_outages),
                d.scenarios_with_overlap,
                d.fully_prevented,
            ]
        )
    return buf.getvalue()


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_results(
    results: Iterable[ScenarioResult],
    summary: StudySummary,
    out_dir: str | Path,
    extra_files: Mapping[str, str] | None = None,
) -> dict[str, str]:
    """Write results, summary, any extra text files, and a digest manifest.

    Returns ``{file name: sha256}`` for every file written, manifest included.
    """
    out = Path(out_dir)
    files = {RESULTS_FILE: results_to_csv(results), SUMMARY_FILE: summary_to_csv(summary)}
    for name, text in (extra_files or {}).items():
        if name in files or name == MANIFEST_FILE:
            raise ValueError(f"extra file name {name!r} collides with a standard output")
        files[name] = text

    digests: dict[str, str] = {}
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name in sorted(files):
            data = files[name].encode("utf-8")
            (out / name).write_bytes(data)
            digests[name] = _sha256(data)
        manifest = {"files": [{"name": n, "sha256": digests[n]} for n in sorted(digests)]}
        data = (json.dumps(manifest, indent=2) + "\n").encode("utf-8")
        (out / MANIFEST_FILE).write_bytes(data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write study outputs: {exc.strerror}", exc.filename) from exc
    digests[MANIFEST_FILE] = _sha256(data)
    return digests


@dataclass(frozen=True)
class ChartSpec:
    """Per-day sample vectors for one or two series (e.g. pre and post)."""

    title: str
    day_labels: tuple[str, ...]
    series: dict[str, tuple[tuple[float, ...], ...]]
    y_label: str = "Load shed (MWh)"

    def __post_init__(self):
        if not self.day_labels:
            raise ValueError("chart needs at least one day")
        if not 1 <= len(self.series) <= 2:
            raise ValueError("chart takes one or two series")
        for name, per_day in self.series.items():
            if len(per_day) != len(self.day_labels):
                raise ValueError(f"series {name!r} has {len(per_day)} days, expected {len(self.day_labels)}")
            for samples in per_day:
                if any(not math.isfinite(v) or v < 0 for v in samples):
                    raise ValueError(f"series {name!r} has negative or non-finite samples")


def box_stats(samples: Sequence[float]) -> dict[str, float]:
    """Whiskers at min/max, box at inclusive linear quartiles."""
    s = ShedStats.of(samples)
    return {"whislo": s.min, "q1": s.q1, "med": s.median, "q3": s.q3, "whishi": s.max, "mean": s.mean}


def draw_distribution_chart(spec: ChartSpec) -> Figure:
    n_days = len(spec.day_labels)
    fig = Figure(figsize=figure_size(n_days))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot()
    names = list(spec.series)
    width = 0.6 if len(names) == 1 else 0.32
    offsets = [0.0] if len(names) == 1 else [-0.18, 0.18]
    x = np.arange(n_days, dtype=float)
    handles = []
    for name, offset, color in zip(names, offsets, SERIES_COLORS):
        stats = [box_stats(samples) for samples in spec.series[name]]
        for st in stats:
            st["fliers"] = []
        art = ax.bxp(
            stats,
            positions=x + offset,
            widths=width,
            patch_artist=True,
            showfliers=False,
            manage_ticks=False,
            boxprops={"facecolor": color, "alpha": 0.75},
            medianprops={"color": "black"},
        )
        handles.append((art["boxes"][0], name))
    ax.set_xticks(x)
    ax.set_xticklabels(spec.day_labels)
    ax.set_xlim(-0.6, n_days - 0.4)
    ax.set_xlabel("Day")
    ax.set_ylabel(spec.y_label)
    ax.set_title(spec.title)
    if len(names) > 1:
        ax.legend([h for h, _ in handles], [n for _, n in handles], loc="upper right")
    fig.tight_layout()
    return fig


def render_distribution_chart(spec: ChartSpec) -> str:
    """Self-contained SVG with one box-and-whisker glyph per day and series."""
    with report_style():
        fig = draw_distribution_chart(spec)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata=SVG_METADATA)
    return buf.getvalue()


def study_charts(results: Iterable[ScenarioResult]) -> dict[str, ChartSpec]:
    """Shed and outage-count charts per hazard, over days with any outage."""
    by_hazard: dict[HazardType, dict[int, list[ScenarioResult]]] = {}
    for r in sorted(results, key=lambda r: r.key):
        by_hazard.setdefault(r.hazard, {}).setdefault(r.day, []).append(r)

    charts: dict[str, ChartSpec] = {}
    for hazard in sorted(by_hazard, key=hazard_sort_key):
        days = {d: rows for d, rows in by_hazard[hazard].items() if any(r.pre_outage_count for r in rows)}
        if not days:
            continue
        labels = tuple(str(d) for d in days)
        series = {"pre": tuple(tuple(r.pre_shed for r in rows) for rows in days.values())}
        if all(r.post_shed is not None for rows in days.values() for r in rows):
            series["post"] = tuple(tuple(r.post_shed for r in rows) for rows in days.values())
        charts[f"shed_{hazard.value}.svg"] = ChartSpec(f"Daily load shed: {hazard.value}", labels, series)
        counts = {"outaged lines": tuple(tuple(float(r.pre_outage_count) for r in rows) for rows in days.values())}
        charts[f"outages_{hazard.value}.svg"] = ChartSpec(
            f"Outaged lines per scenario: {hazard.value}", labels, counts, y_label="Lines outaged"
        )
    return charts


def render_study_charts(results: Iterable[ScenarioResult]) -> dict[str, str]:
    return {name: render_distribution_chart(spec) for name, spec in study_charts(results).items()}
