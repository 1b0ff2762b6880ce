"""Composition diagnostics for a selection against its source table.

The report rebins the selected subset with the full table's histogram, counts
class membership, and measures how much of the subset sits in the tail ends
of the full entropy distribution.  Deciles for the tail-mass statistic are
the ten equal-width segments of the full data's log10-entropy span; the
statistic is the subset fraction falling in the lowest and highest segments
that hold at least one full-data example.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ValidationError
from .histogram import bin_of, build_histogram, transformed_entropies
from .types import Histogram, Selection, StatsTable


@dataclass(frozen=True)
class Report:
    subset_size: int
    full_hist: Histogram
    subset_hist: Histogram
    class_counts: tuple[int, ...]
    class_ratios: tuple[float, ...]
    tail_low_fraction: float
    tail_high_fraction: float

    @property
    def tail_mass(self) -> float:
        return self.tail_low_fraction + self.tail_high_fraction


def subset_table(stats: StatsTable, sel: Selection) -> StatsTable:
    try:
        return stats.subset(sel.ids)
    except ValidationError as exc:
        raise ConsistencyError(f"selection does not match the stats table: {exc}") from exc


def subset_histogram(full_hist: Histogram, subset: StatsTable) -> Histogram:
    """Histogram of the subset over the full table's exact binning."""
    heights = [0] * full_hist.n_bins
    for e in subset.entropies:
        heights[bin_of(float(e), full_hist)] += 1
    return Histogram(
        bin_width=full_hist.bin_width,
        origin=full_hist.origin,
        heights=tuple(heights),
        floor=full_hist.floor,
        total=len(subset),
    )


def tail_fractions(stats: StatsTable, subset: StatsTable, floor: float) -> tuple[float, float]:
    """Subset fractions in the lowest and highest non-empty full-data deciles."""
    full_t = transformed_entropies(stats, floor)
    sub_t = transformed_entropies(subset, floor)
    lo, hi = float(full_t.min()), float(full_t.max())
    if hi == lo:
        # Degenerate span: every example shares one decile.
        return 1.0, 0.0
    width = (hi - lo) / 10.0

    def decile(values: np.ndarray) -> np.ndarray:
        return np.clip(((values - lo) / width).astype(np.int64), 0, 9)

    full_deciles = decile(full_t)
    low_decile = int(full_deciles.min())
    high_decile = int(full_deciles.max())
    sub_deciles = decile(sub_t)
    low = float(np.mean(sub_deciles == low_decile))
    high = float(np.mean(sub_deciles == high_decile)) if high_decile != low_decile else 0.0
    return low, high


def build_report(
    stats: StatsTable, sel: Selection, bin_width: float, floor: float
) -> Report:
    subset = subset_table(stats, sel)
    full_hist = build_histogram(stats, bin_width=bin_width, floor=floor)
    sub_hist = subset_histogram(full_hist, subset)
    counts = np.bincount(subset.labels, minlength=stats.class_count)
    ratios = counts / counts.sum()
    low, high = tail_fractions(stats, subset, floor)
    return Report(
        subset_size=len(subset),
        full_hist=full_hist,
        subset_hist=sub_hist,
        class_counts=tuple(int(c) for c in counts),
        class_ratios=tuple(float(r) for r in ratios),
        tail_low_fraction=low,
        tail_high_fraction=high,
    )


def render_figures(report: Report, prefix: str) -> list[str]:
    """Write the report's histogram and class-ratio figures as PNG files.

    Returns the paths written.  Rendering is deterministic: identical reports
    produce byte-identical files.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    full, sub = report.full_hist, report.subset_hist
    centers = [full.left_edge(b) + full.bin_width / 2 for b in range(full.n_bins)]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(centers, full.heights, width=full.bin_width, color="#9ecae1", label="full data")
    ax.bar(centers, sub.heights, width=full.bin_width, color="#08519c", label="selection")
    ax.set_xlabel("log10(entropy)")
    ax.set_ylabel("examples per bin")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    hist_path = f"{prefix}.hist.png"
    fig.savefig(hist_path, dpi=120)
    plt.close(fig)
    paths.append(hist_path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(range(len(report.class_ratios)), report.class_ratios, color="#08519c")
    ax.set_xlabel("class")
    ax.set_ylabel("share of selection")
    ax.set_xticks(range(len(report.class_ratios)))
    fig.tight_layout()
    classes_path = f"{prefix}.classes.png"
    fig.savefig(classes_path, dpi=120)
    plt.close(fig)
    paths.append(classes_path)

    return paths
