"""Predictive distributions and per-example entropy from logit tables.

Entropy is Shannon entropy in nats (natural log), so a uniform distribution
over d classes scores ln(d) and a saturated one-hot prediction scores 0.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .types import LogitsTable, StatsTable

# Probabilities this small contribute 0 under the 0*ln(0) convention; the cut
# avoids -inf leaking out of denormal underflow.
_ZERO_PROB = 1e-300

_DIST_SUM_TOLERANCE = 1e-9


def predictive_distribution(logits) -> np.ndarray:
    """Softmax of a logit vector, computed with max-subtraction.

    Subtracting the maximum first keeps the exponentials in range and makes
    the result invariant under adding a constant to every component.
    """
    arr = np.asarray(logits, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValidationError(f"logits must be a vector of dimension >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("logits must be finite")
    return _softmax_rows(arr[None, :])[0]


def entropy(probs) -> float:
    """Shannon entropy -sum(p * ln p) of a probability vector, in nats."""
    arr = np.asarray(probs, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValidationError(f"probabilities must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValidationError("probability components must lie in [0, 1]")
    total = float(arr.sum())
    if abs(total - 1.0) > _DIST_SUM_TOLERANCE:
        raise ValidationError(f"probabilities must sum to 1 within 1e-9, got {total!r}")
    return float(_entropy_rows(arr[None, :])[0])


def compute_entropy_table(logits: LogitsTable) -> StatsTable:
    """Entropy of every row's predictive distribution, as a StatsTable.

    Ids and labels are copied through; the output is sorted by id.  An empty
    logits table yields an empty stats table.
    """
    if len(logits) == 0:
        return StatsTable([])
    probs = _softmax_rows(logits.logits)
    entropies = _entropy_rows(probs)
    return StatsTable.from_arrays(logits.ids, logits.labels, entropies)


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=1, keepdims=True)


def _entropy_rows(probs: np.ndarray) -> np.ndarray:
    contrib = np.zeros_like(probs)
    mask = probs > _ZERO_PROB
    contrib[mask] = -probs[mask] * np.log(probs[mask])
    values = contrib.sum(axis=1)
    # Float round-off can nudge a near-uniform row an ulp past ln(d); the
    # mathematical range is [0, ln d], so clamp.
    return np.minimum(values, math.log(probs.shape[1]))
