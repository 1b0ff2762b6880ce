"""Domain types shared by every module.

All types are immutable once constructed and validate their invariants at
construction time, raising :class:`~proxysel.errors.ValidationError` with a
message naming the violated rule.  Tables are array-backed (numpy) and keep
their rows sorted by ascending example id; ids are caller-assigned integers
(typically the row index of the source dataset) and are never renumbered, so
any selection can be joined back to the original data.

Entropy values are stored in nats.  Histograms live on the base-10 log of
the nat-valued entropy.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ValidationError

SPLIT_MODES = ("allshuffle", "disjoint")


def format_real(x: float) -> str:
    """Canonical text form of a real: 17 significant digits, round-trip exact."""
    return format(float(x), ".17g")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ExampleStat:
    """Per-example record: id, class label, entropy (nats), and optional extras.

    ``forget_count`` is the number of times the example flipped from being
    classified correctly to incorrectly over a training run.  ``feature`` is
    the embedding used by distance-based selection.
    """

    id: int
    label: int
    entropy: float
    forget_count: int | None = None
    feature: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValidationError(f"id must be non-negative, got {self.id}")
        if self.label < 0:
            raise ValidationError(f"label must be non-negative, got {self.label} (id {self.id})")
        if not np.isfinite(self.entropy) or self.entropy < 0:
            raise ValidationError(
                f"entropy must be a finite non-negative real, got {self.entropy!r} (id {self.id})"
            )
        if self.forget_count is not None and self.forget_count < 0:
            raise ValidationError(
                f"forget_count must be non-negative, got {self.forget_count} (id {self.id})"
            )
        if self.feature is not None:
            if len(self.feature) < 1:
                raise ValidationError(f"feature vector must have dimension >= 1 (id {self.id})")
            if not all(np.isfinite(v) for v in self.feature):
                raise ValidationError(f"feature vector contains a non-finite value (id {self.id})")


class StatsTable:
    """Ordered collection of :class:`ExampleStat`, sorted by ascending id.

    ``class_count`` defaults to ``max(label) + 1`` when not given.  Optional
    columns (forget counts, features) are all-or-none: a table where only
    some rows carry them is rejected, naming the first id that lacks one.
    """

    __slots__ = ("ids", "labels", "entropies", "forget_counts", "features", "class_count")

    def __init__(self, stats: Iterable[ExampleStat], class_count: int | None = None):
        rows = list(stats)
        ids = np.array([s.id for s in rows], dtype=np.int64)
        labels = np.array([s.label for s in rows], dtype=np.int64)
        entropies = np.array([s.entropy for s in rows], dtype=np.float64)

        forget = None
        have_forget = [s.forget_count is not None for s in rows]
        if any(have_forget):
            if not all(have_forget):
                missing = rows[have_forget.index(False)].id
                raise ValidationError(
                    f"forget_count present for some rows but missing for id {missing}"
                )
            forget = np.array([s.forget_count for s in rows], dtype=np.int64)

        features = None
        have_feat = [s.feature is not None for s in rows]
        if any(have_feat):
            if not all(have_feat):
                missing = rows[have_feat.index(False)].id
                raise ValidationError(f"feature present for some rows but missing for id {missing}")
            dims = {len(s.feature) for s in rows}
            if len(dims) > 1:
                raise ValidationError(f"feature vectors must share one dimension, got {sorted(dims)}")
            features = np.array([s.feature for s in rows], dtype=np.float64)

        self._init(ids, labels, entropies, forget, features, class_count)

    @classmethod
    def from_arrays(
        cls,
        ids: np.ndarray,
        labels: np.ndarray,
        entropies: np.ndarray,
        forget_counts: np.ndarray | None = None,
        features: np.ndarray | None = None,
        class_count: int | None = None,
    ) -> "StatsTable":
        table = cls.__new__(cls)
        table._init(
            np.asarray(ids, dtype=np.int64),
            np.asarray(labels, dtype=np.int64),
            np.asarray(entropies, dtype=np.float64),
            None if forget_counts is None else np.asarray(forget_counts, dtype=np.int64),
            None if features is None else np.asarray(features, dtype=np.float64),
            class_count,
        )
        return table

    def _init(self, ids, labels, entropies, forget, features, class_count) -> None:
        n = len(ids)
        if not (len(labels) == len(entropies) == n):
            raise ValidationError("ids, labels and entropies must have equal length")
        if forget is not None and len(forget) != n:
            raise ValidationError("forget_counts length must match ids")
        if features is not None:
            if features.ndim != 2 or features.shape[0] != n:
                raise ValidationError("features must be one fixed-dimension vector per row")
            if features.shape[1] < 1:
                raise ValidationError("feature dimension must be >= 1")
            if not np.all(np.isfinite(features)):
                raise ValidationError("feature vectors contain a non-finite value")

        order = np.argsort(ids, kind="stable")
        ids = ids[order]
        labels = labels[order]
        entropies = entropies[order]
        forget = None if forget is None else forget[order]
        features = None if features is None else features[order]

        if n > 0:
            if np.any(ids[:-1] == ids[1:]):
                dup = int(ids[:-1][ids[:-1] == ids[1:]][0])
                raise ValidationError(f"ids must be unique, id {dup} appears more than once")
            if np.any(ids < 0):
                raise ValidationError("ids must be non-negative")
            if not np.all(np.isfinite(entropies)) or np.any(entropies < 0):
                bad = int(ids[~(np.isfinite(entropies) & (entropies >= 0))][0])
                raise ValidationError(f"entropy must be finite and >= 0 (id {bad})")
            if forget is not None and np.any(forget < 0):
                bad = int(ids[forget < 0][0])
                raise ValidationError(f"forget_count must be >= 0 (id {bad})")

        if class_count is None:
            class_count = int(labels.max()) + 1 if n > 0 else 1
        if class_count < 1:
            raise ValidationError(f"class_count must be >= 1, got {class_count}")
        if n > 0 and (np.any(labels < 0) or np.any(labels >= class_count)):
            bad = int(ids[(labels < 0) | (labels >= class_count)][0])
            raise ValidationError(f"label out of range [0, {class_count}) (id {bad})")

        self.ids = _readonly(ids)
        self.labels = _readonly(labels)
        self.entropies = _readonly(entropies)
        self.forget_counts = None if forget is None else _readonly(forget)
        self.features = None if features is None else _readonly(features)
        self.class_count = class_count

    @property
    def feature_dim(self) -> int | None:
        return None if self.features is None else int(self.features.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, position: int) -> ExampleStat:
        return ExampleStat(
            id=int(self.ids[position]),
            label=int(self.labels[position]),
            entropy=float(self.entropies[position]),
            forget_count=None if self.forget_counts is None else int(self.forget_counts[position]),
            feature=None if self.features is None else tuple(self.features[position]),
        )

    def __iter__(self) -> Iterator[ExampleStat]:
        for i in range(len(self)):
            yield self[i]

    def positions_of(self, ids: Sequence[int]) -> np.ndarray:
        """Row positions of the given ids; rejects ids not in the table."""
        wanted = np.asarray(ids, dtype=np.int64)
        if len(wanted) > 0 and len(self.ids) == 0:
            raise ValidationError(f"id {int(wanted[0])} not present in the table")
        pos = np.searchsorted(self.ids, wanted)
        bad = (pos >= len(self.ids)) | (self.ids[np.minimum(pos, len(self.ids) - 1)] != wanted)
        if np.any(bad):
            raise ValidationError(f"id {int(wanted[bad][0])} not present in the table")
        return pos

    def subset(self, ids: Sequence[int]) -> "StatsTable":
        """New table restricted to the given ids; keeps class_count."""
        pos = self.positions_of(ids)
        pos = np.sort(pos)
        return StatsTable.from_arrays(
            self.ids[pos],
            self.labels[pos],
            self.entropies[pos],
            None if self.forget_counts is None else self.forget_counts[pos],
            None if self.features is None else self.features[pos],
            class_count=self.class_count,
        )

    def with_forget_counts(self, counts: Mapping[int, int]) -> "StatsTable":
        """Attach forget counts by id; every row must be covered."""
        try:
            attached = np.array([counts[int(i)] for i in self.ids], dtype=np.int64)
        except KeyError as exc:
            raise ValidationError(f"forget_count missing for id {exc.args[0]}") from None
        return StatsTable.from_arrays(
            self.ids, self.labels, self.entropies, attached, self.features, self.class_count
        )

    def with_features(self, vectors: Mapping[int, Sequence[float]]) -> "StatsTable":
        """Attach feature vectors by id; every row must be covered."""
        try:
            rows = [np.asarray(vectors[int(i)], dtype=np.float64) for i in self.ids]
        except KeyError as exc:
            raise ValidationError(f"feature missing for id {exc.args[0]}") from None
        dims = {r.shape for r in rows}
        if len(dims) > 1:
            raise ValidationError("feature vectors must share one dimension")
        features = np.vstack(rows) if rows else None
        return StatsTable.from_arrays(
            self.ids, self.labels, self.entropies, self.forget_counts, features, self.class_count
        )


class LogitsTable:
    """Raw classifier outputs: one (id, label, logit vector) row per example."""

    __slots__ = ("ids", "labels", "logits")

    def __init__(self, ids, labels, logits):
        ids = np.asarray(ids, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        logits = np.asarray(logits, dtype=np.float64)
        if logits.ndim != 2:
            raise ValidationError("logits must be a 2-D array, one row per example")
        if not (len(ids) == len(labels) == logits.shape[0]):
            raise ValidationError("ids, labels and logits must have equal length")
        if logits.shape[1] < 2:
            raise ValidationError(f"logit dimension must be >= 2, got {logits.shape[1]}")
        if len(np.unique(ids)) != len(ids):
            counts = np.unique(ids, return_counts=True)
            dup = int(counts[0][counts[1] > 1][0])
            raise ValidationError(f"ids must be unique, id {dup} appears more than once")
        if np.any(ids < 0):
            raise ValidationError("ids must be non-negative")
        bad = ~np.all(np.isfinite(logits), axis=1)
        if np.any(bad):
            raise ValidationError(f"logits contain a non-finite value (id {int(ids[bad][0])})")
        self.ids = _readonly(ids)
        self.labels = _readonly(labels)
        self.logits = _readonly(logits)

    @property
    def dim(self) -> int:
        return int(self.logits.shape[1])

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class Histogram:
    """Uniform-width binning of log10(entropy), clamped below at ``floor``.

    Bin ``b`` covers ``[origin + b*bin_width, origin + (b+1)*bin_width)`` on
    the log10 axis; ``heights[b]`` is the number of examples in that bin and
    ``total`` is the number of examples binned overall.
    """

    bin_width: float
    origin: float
    heights: tuple[int, ...]
    floor: float
    total: int

    def __post_init__(self) -> None:
        if not (self.bin_width > 0):
            raise ValidationError(f"bin_width must be > 0, got {self.bin_width}")
        if not (self.floor > 0):
            raise ValidationError(f"floor must be > 0, got {self.floor}")
        if len(self.heights) == 0:
            raise ValidationError("histogram must have at least one bin")
        if any(h < 0 for h in self.heights):
            raise ValidationError("bin heights must be non-negative")
        if self.total != sum(self.heights):
            raise ValidationError(
                f"total ({self.total}) must equal the sum of heights ({sum(self.heights)})"
            )

    @property
    def n_bins(self) -> int:
        return len(self.heights)

    def left_edge(self, b: int) -> float:
        return self.origin + b * self.bin_width

    def right_edge(self, b: int) -> float:
        return self.origin + (b + 1) * self.bin_width


class WeightScheme(Enum):
    """Per-bin selection weight variants; see the histogram module."""

    W1 = "w1"
    W2 = "w2"
    W3 = "w3"

    @classmethod
    def parse(cls, text: str) -> "WeightScheme":
        try:
            return cls(text.lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValidationError(f"unknown weight scheme {text!r} (valid: {valid})") from None


class ProbabilityTable:
    """Per-example selection probabilities aligned with a StatsTable.

    Rows are sorted by ascending id, matching the table they describe.
    """

    __slots__ = ("ids", "probabilities")

    SUM_TOLERANCE = 1e-9

    def __init__(self, ids, probabilities):
        ids = np.asarray(ids, dtype=np.int64)
        probs = np.asarray(probabilities, dtype=np.float64)
        if len(ids) != len(probs):
            raise ValidationError("ids and probabilities must have equal length")
        if len(ids) == 0:
            raise ValidationError("probability table must not be empty")
        if len(np.unique(ids)) != len(ids):
            raise ValidationError("ids must be unique")
        if np.any(probs < 0) or np.any(probs > 1) or not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must lie in [0, 1]")
        total = float(probs.sum())
        if abs(total - 1.0) > self.SUM_TOLERANCE:
            raise ValidationError(f"probabilities must sum to 1 within 1e-9, got {total!r}")
        order = np.argsort(ids, kind="stable")
        self.ids = _readonly(ids[order])
        self.probabilities = _readonly(probs[order])

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class MethodSpec:
    """Descriptor of a selection method: name plus the parameters used.

    Parameter values are stored as canonical strings (reals with 17
    significant digits) so a descriptor round-trips through file headers
    unchanged.
    """

    name: str
    params: tuple[tuple[str, str], ...] = ()

    @classmethod
    def make(cls, name: str, **params) -> "MethodSpec":
        canon = []
        for key in sorted(params):
            value = params[key]
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = format_real(value)
            else:
                text = str(value)
            canon.append((key, text))
        return cls(name=name, params=tuple(canon))

    def param(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def describe(self) -> str:
        if not self.params:
            return self.name
        inner = " ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.name} {inner}"


@dataclass(frozen=True)
class Selection:
    """A chosen subset: exactly ``k`` distinct ids, in selection order."""

    method: MethodSpec
    ids: tuple[int, ...]
    k: int
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if len(self.ids) != self.k:
            raise ValidationError(f"selection holds {len(self.ids)} ids but k = {self.k}")
        if len(set(self.ids)) != len(self.ids):
            raise ValidationError("selection contains duplicate ids")


@dataclass(frozen=True)
class SplitResult:
    """Partition of a selection into train and validation id sequences."""

    train: tuple[int, ...]
    val: tuple[int, ...]
    mode: str
    ratio: float

    def __post_init__(self) -> None:
        if self.mode not in SPLIT_MODES:
            raise ValidationError(f"mode must be one of {SPLIT_MODES}, got {self.mode!r}")
        if not (0.0 < self.ratio < 1.0):
            raise ValidationError(f"ratio must lie in (0, 1), got {self.ratio}")
        if set(self.train) & set(self.val):
            raise ValidationError("train and val must be disjoint")
        if len(set(self.train)) != len(self.train) or len(set(self.val)) != len(self.val):
            raise ValidationError("split halves must not contain duplicate ids")


class CorrectnessLog:
    """Per-example correctness history over E training assessments (0/1)."""

    __slots__ = ("ids", "history")

    def __init__(self, ids, history):
        ids = np.asarray(ids, dtype=np.int64)
        history = np.asarray(history, dtype=np.int64)
        if history.ndim != 2:
            raise ValidationError("history must be a 2-D array, one row per example")
        if len(ids) != history.shape[0]:
            raise ValidationError("ids and history must have equal length")
        if history.shape[1] < 1:
            raise ValidationError("history must cover at least one assessment (E >= 1)")
        if len(np.unique(ids)) != len(ids):
            raise ValidationError("ids must be unique")
        if not np.all((history == 0) | (history == 1)):
            raise ValidationError("history entries must be 0 or 1")
        self.ids = _readonly(ids)
        self.history = _readonly(history.astype(np.uint8))

    @property
    def epochs(self) -> int:
        return int(self.history.shape[1])

    def __len__(self) -> int:
        return len(self.ids)
