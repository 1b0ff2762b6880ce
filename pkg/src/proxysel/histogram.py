"""Log-scale entropy histograms and the tail-weighted selection probabilities.

The histogram bins log10(max(entropy, floor)) into uniform half-open bins
[left, right).  Three per-bin weight schemes turn bin heights into selection
probabilities; all of them divide a bin's weight by its height, so examples
in thinly populated bins (the tails of the entropy distribution) are
preferred over examples near the mode:

  W1: (max_height - height + 1), normalized over non-empty bins.
  W2: uniform over non-empty bins.
  W3: 1 / height, normalized over non-empty bins.

Empty bins are not part of the effective histogram: they carry zero weight,
are excluded from every normalizing sum, and do not count toward the number
of bins B used by W2.
"""

from __future__ import annotations

import numpy as np

from .errors import ConsistencyError, ValidationError
from .types import Histogram, ProbabilityTable, StatsTable, WeightScheme

DEFAULT_BIN_WIDTH = 0.25
DEFAULT_FLOOR = 1e-12


def build_histogram(
    stats: StatsTable,
    bin_width: float = DEFAULT_BIN_WIDTH,
    floor: float = DEFAULT_FLOOR,
) -> Histogram:
    """Bin every example's clamped log10 entropy into uniform-width bins.

    The first bin is anchored at ``bin_width * floor(min / bin_width)`` so
    the lowest value always lands in bin 0; the bin range ends at the bin
    holding the highest value.  Interior bins may be empty.
    """
    if len(stats) == 0:
        raise ValidationError("cannot build a histogram from an empty table")
    if not (bin_width > 0):
        raise ValidationError(f"bin_width must be > 0, got {bin_width}")
    if not (floor > 0):
        raise ValidationError(f"floor must be > 0, got {floor}")

    raw = _raw_bin_indices(stats.entropies, bin_width, floor)
    base = int(raw.min())
    indices = raw - base
    heights = np.bincount(indices, minlength=int(indices.max()) + 1)
    return Histogram(
        bin_width=float(bin_width),
        origin=bin_width * base,
        heights=tuple(int(h) for h in heights),
        floor=float(floor),
        total=len(stats),
    )


def bin_of(entropy_value: float, hist: Histogram) -> int:
    """Index of the bin holding the given entropy (clamped to the built range).

    Bins are half-open, so a value on a bin's exact left edge belongs to that
    bin.  Values below or above the built range map to the first or last bin.
    """
    value = np.asarray([entropy_value], dtype=np.float64)
    raw = _raw_bin_indices(value, hist.bin_width, hist.floor)
    return int(np.clip(raw[0] - _base_index(hist), 0, hist.n_bins - 1))


def bin_weights(hist: Histogram, scheme: WeightScheme) -> np.ndarray:
    """Weight of every bin under the given scheme; empty bins weigh 0.

    Weights over the non-empty bins sum to 1.
    """
    heights = np.asarray(hist.heights, dtype=np.float64)
    occupied = heights > 0
    if not np.any(occupied):
        raise ValidationError("histogram has no occupied bins")
    weights = np.zeros_like(heights)
    if scheme is WeightScheme.W1:
        mass = heights[occupied].max() - heights[occupied] + 1.0
        weights[occupied] = mass / mass.sum()
    elif scheme is WeightScheme.W2:
        weights[occupied] = 1.0 / occupied.sum()
    elif scheme is WeightScheme.W3:
        mass = 1.0 / heights[occupied]
        weights[occupied] = mass / mass.sum()
    else:  # pragma: no cover - exhaustive enum
        raise ValidationError(f"unknown weight scheme {scheme!r}")
    return weights


def selection_weight(bin_index: int, hist: Histogram, scheme: WeightScheme) -> float:
    """Weight of one bin under the given scheme (0.0 for an empty bin)."""
    if not (0 <= bin_index < hist.n_bins):
        raise ValidationError(f"bin index {bin_index} out of range [0, {hist.n_bins})")
    return float(bin_weights(hist, scheme)[bin_index])


def selection_probabilities(
    stats: StatsTable, hist: Histogram, scheme: WeightScheme
) -> ProbabilityTable:
    """Per-example selection probability: weight of the example's bin divided
    by the bin's height, normalized to sum to 1 over the table.

    Examples sharing a bin receive exactly equal probability.  The histogram
    must have been built from this table (same floor and width); an example
    mapping to an empty bin means it was not.
    """
    if len(stats) == 0:
        raise ValidationError("cannot compute probabilities for an empty table")
    if hist.total != len(stats):
        raise ConsistencyError(
            f"histogram was built from {hist.total} examples but the table has {len(stats)}"
        )
    heights = np.asarray(hist.heights, dtype=np.float64)
    raw = _raw_bin_indices(stats.entropies, hist.bin_width, hist.floor)
    indices = raw - _base_index(hist)
    if np.any(indices < 0) or np.any(indices >= hist.n_bins):
        bad = int(stats.ids[(indices < 0) | (indices >= hist.n_bins)][0])
        raise ConsistencyError(f"example id {bad} falls outside the histogram range")
    if np.any(heights[indices] == 0):
        bad = int(stats.ids[heights[indices] == 0][0])
        raise ConsistencyError(f"example id {bad} maps to an empty histogram bin")

    per_bin = bin_weights(hist, scheme) / np.where(heights > 0, heights, 1.0)
    mass = per_bin[indices]
    return ProbabilityTable(stats.ids, mass / mass.sum())


def transformed_entropies(stats: StatsTable, floor: float) -> np.ndarray:
    """log10 of the floor-clamped entropies; the histogram axis."""
    if not (floor > 0):
        raise ValidationError(f"floor must be > 0, got {floor}")
    return np.log10(np.maximum(stats.entropies, floor))


def _raw_bin_indices(entropies: np.ndarray, bin_width: float, floor: float) -> np.ndarray:
    transformed = np.log10(np.maximum(entropies, floor))
    return np.floor(transformed / bin_width).astype(np.int64)


def _base_index(hist: Histogram) -> int:
    # origin was stored as bin_width * base; recover the exact integer.
    return int(round(hist.origin / hist.bin_width))
