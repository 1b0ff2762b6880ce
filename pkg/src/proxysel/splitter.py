"""Partition a selection into train and validation halves.

``allshuffle`` shuffles the selected ids and cuts; ``disjoint`` sorts them
by entropy and assigns one end to train.  The train share is
round(ratio * k) with halves rounded up, so ratio 0.5 over an odd k gives
train the extra example.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .types import Selection, SplitResult, StatsTable


def train_share(k: int, ratio: float) -> int:
    """round(ratio * k), rounding .5 up."""
    if not (0.0 < ratio < 1.0):
        raise ValidationError(f"ratio must lie in (0, 1), got {ratio}")
    return int(np.floor(ratio * k + 0.5))


def split_allshuffle(
    sel: Selection, stats: StatsTable, ratio: float = 0.5, seed: int = 0
) -> SplitResult:
    """Shuffle the selected ids, then cut at round(ratio * k).

    Draw pattern: one uniform double per selected id, in selection order;
    sorting the keys yields the shuffle.
    """
    from .selectors import _generator  # shared randomness contract

    stats.positions_of(sel.ids)  # selection must be valid against the table
    n_train = train_share(sel.k, ratio)
    rng = _generator(seed)
    keys = rng.random(sel.k)
    order = np.argsort(keys, kind="stable")
    shuffled = [sel.ids[i] for i in order]
    return SplitResult(
        train=tuple(shuffled[:n_train]),
        val=tuple(shuffled[n_train:]),
        mode="allshuffle",
        ratio=float(ratio),
    )


def split_disjoint(
    sel: Selection, stats: StatsTable, ratio: float = 0.5, low_to_train: bool = False
) -> SplitResult:
    """Assign one end of the entropy ordering to train, the other to val.

    The selected ids are sorted by ascending entropy (ties by ascending id).
    With ``low_to_train`` the first round(ratio * k) ids form the train half;
    otherwise the train half comes from the top of the ordering.  Fully
    deterministic; no seed is consumed.
    """
    n_train = train_share(sel.k, ratio)
    pos = stats.positions_of(sel.ids)
    order = np.lexsort((stats.ids[pos], stats.entropies[pos]))
    ranked = [sel.ids[i] for i in order]
    if low_to_train:
        train, val = ranked[:n_train], ranked[n_train:]
    else:
        cut = sel.k - n_train
        train, val = ranked[cut:], ranked[:cut]
    return SplitResult(train=tuple(train), val=tuple(val), mode="disjoint", ratio=float(ratio))
