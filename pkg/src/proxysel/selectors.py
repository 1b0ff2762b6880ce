"""Selection methods producing a Selection of exactly k ids.

Randomness contract
-------------------
Every seeded operation builds a ``numpy.random.Generator`` over the Philox
counter-based bit generator keyed directly with the seed, and consumes draws
in the fixed pattern documented on each function.  Philox's stream for a
given key is identical on every platform, so equal seeds give byte-identical
selections everywhere.  Seeds are integers in [0, 2**64).

Tie-breaking is total and documented: entropy ties fall back to ascending
id; forgetting ties fall back to descending entropy, then ascending id;
k-center argmax ties fall back to ascending id.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import CapacityError, ConsistencyError, ValidationError
from .histogram import DEFAULT_BIN_WIDTH, DEFAULT_FLOOR, build_histogram, selection_probabilities
from .types import (
    CorrectnessLog,
    MethodSpec,
    ProbabilityTable,
    Selection,
    StatsTable,
    WeightScheme,
)

DEFAULT_BETA = 0.9

# Methods that can be applied per class by the class-balanced wrapper.
PER_CLASS_METHODS = ("random", "entropy-top", "entropy-bottom", "forgetting", "tail", "prob")

# Guards the floor of beta*k against the float representation of decimal
# beta (e.g. 0.7 * 10 evaluates to 6.999...96); far smaller than the 1/10^d
# spacing of any reasonable beta, so it never promotes a true non-integer.
_FLOOR_GUARD = 1e-9


def _generator(seed: int) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"seed must be an integer, got {type(seed).__name__}")
    if not (0 <= seed < 2**64):
        raise ValidationError(f"seed must lie in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _require_k(k: int, available: int, what: str = "table") -> None:
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > available:
        raise CapacityError(f"k = {k} exceeds the {available} candidates in the {what}")


def select_random(stats: StatsTable, k: int, seed: int) -> Selection:
    """k ids drawn uniformly without replacement.

    Draw pattern: one uniform double per example in ascending-id order; the
    k smallest keys win (a random permutation read off its first k places).
    """
    _require_k(k, len(stats))
    rng = _generator(seed)
    keys = rng.random(len(stats))
    order = np.argsort(keys, kind="stable")
    ids = tuple(int(i) for i in stats.ids[order[:k]])
    return Selection(method=MethodSpec.make("random"), ids=ids, k=k, seed=seed)


def select_entropy_topk(stats: StatsTable, k: int) -> Selection:
    """The k highest-entropy ids, ordered by rank; ties by ascending id."""
    _require_k(k, len(stats))
    order = np.lexsort((stats.ids, -stats.entropies))
    ids = tuple(int(i) for i in stats.ids[order[:k]])
    return Selection(method=MethodSpec.make("entropy-top"), ids=ids, k=k)


def select_entropy_bottomk(stats: StatsTable, k: int) -> Selection:
    """The k lowest-entropy ids, ordered by rank; ties by ascending id."""
    _require_k(k, len(stats))
    order = np.lexsort((stats.ids, stats.entropies))
    ids = tuple(int(i) for i in stats.ids[order[:k]])
    return Selection(method=MethodSpec.make("entropy-bottom"), ids=ids, k=k)


def count_forgetting_events(log: CorrectnessLog) -> dict[int, int]:
    """Forgetting events per example: transitions from correct (1) to
    incorrect (0) between consecutive assessments."""
    history = log.history
    transitions = (history[:, :-1] == 1) & (history[:, 1:] == 0)
    counts = transitions.sum(axis=1)
    return {int(i): int(c) for i, c in zip(log.ids, counts)}


def select_forgetting(stats: StatsTable, k: int) -> Selection:
    """Top-k ids by forgetting count, descending.

    Ties fall back to descending entropy, then ascending id.  Every example
    must carry a forget count.
    """
    if stats.forget_counts is None:
        first = int(stats.ids[0]) if len(stats) else None
        raise ValidationError(f"forget_count missing for id {first}")
    _require_k(k, len(stats))
    order = np.lexsort((stats.ids, -stats.entropies, -stats.forget_counts))
    ids = tuple(int(i) for i in stats.ids[order[:k]])
    return Selection(method=MethodSpec.make("forgetting"), ids=ids, k=k)


def select_kcenter(
    stats: StatsTable,
    k: int,
    initial_pool: Iterable[int] | None = None,
    seed: int = 0,
) -> Selection:
    """Greedy k-center on feature vectors.

    Repeats k times: pick the example farthest (Euclidean) from the current
    pool, i.e. the argmax over unpooled ids of the min distance to any pool
    member, breaking ties by ascending id; add it to the pool and to the
    output.  The initial pool seeds the distances but is not part of the
    returned selection.  When no pool is given, one id is drawn uniformly
    (draw pattern: a single bounded integer).

    Distances are compared in squared form, which preserves the argmax.
    """
    if stats.features is None:
        first = int(stats.ids[0]) if len(stats) else None
        raise ValidationError(f"feature missing for id {first}")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    n = len(stats)
    pool_ids = sorted(set(int(i) for i in initial_pool)) if initial_pool else []
    if k + max(len(pool_ids), 1) > n:
        raise CapacityError(
            f"k = {k} plus a pool of {max(len(pool_ids), 1)} exceeds the {n} "
            "candidates in the table"
        )
    if pool_ids:
        pool_pos = stats.positions_of(pool_ids)
        used_seed = None
    else:
        rng = _generator(seed)
        pool_pos = np.asarray([int(rng.integers(0, n))], dtype=np.int64)
        used_seed = seed

    features = stats.features
    in_pool = np.zeros(n, dtype=bool)
    in_pool[pool_pos] = True
    min_d2 = np.full(n, np.inf)
    for p in pool_pos:
        min_d2 = np.minimum(min_d2, ((features - features[p]) ** 2).sum(axis=1))

    chosen: list[int] = []
    for _ in range(k):
        candidate_d2 = np.where(in_pool, -np.inf, min_d2)
        j = int(np.argmax(candidate_d2))
        chosen.append(int(stats.ids[j]))
        in_pool[j] = True
        min_d2 = np.minimum(min_d2, ((features - features[j]) ** 2).sum(axis=1))

    pool_desc = ",".join(str(i) for i in pool_ids) if pool_ids else "seeded"
    return Selection(
        method=MethodSpec.make("kcenter", pool=pool_desc),
        ids=tuple(chosen),
        k=k,
        seed=used_seed,
    )


def bottom_share(k: int, beta: float) -> int:
    """floor(beta * k): how many of the k slots go to the low-entropy side."""
    if not (0.0 < beta < 1.0):
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    return int(np.floor(beta * k + _FLOOR_GUARD))


def select_tail_deterministic(stats: StatsTable, k: int, beta: float = DEFAULT_BETA) -> Selection:
    """The floor(beta*k) lowest-entropy ids plus the remaining highest ones.

    Both halves use the bottom-k / top-k tie rules.  If tie-breaking makes
    the halves overlap (only possible when k is close to n), the selection
    is completed by extending from the bottom ranking.
    """
    _require_k(k, len(stats))
    n_bottom = bottom_share(k, beta)
    n_top = k - n_bottom

    bottom_order = np.lexsort((stats.ids, stats.entropies))
    top_order = np.lexsort((stats.ids, -stats.entropies))

    chosen: list[int] = [int(i) for i in stats.ids[bottom_order[:n_bottom]]]
    seen = set(chosen)
    for i in stats.ids[top_order[:n_top]]:
        if int(i) not in seen:
            chosen.append(int(i))
            seen.add(int(i))
    for i in stats.ids[bottom_order[n_bottom:]]:
        if len(chosen) == k:
            break
        if int(i) not in seen:
            chosen.append(int(i))
            seen.add(int(i))

    return Selection(method=MethodSpec.make("tail", beta=beta), ids=tuple(chosen), k=k)


def select_probabilistic(
    stats: StatsTable,
    k: int,
    probs: ProbabilityTable,
    seed: int,
    method: MethodSpec | None = None,
) -> Selection:
    """Weighted sampling without replacement from a probability table.

    The sampled distribution equals successive draws with renormalization
    (draw one id proportional to the remaining probabilities, remove it,
    repeat k times), realized through exponential random keys: each id with
    probability p > 0 gets key ln(u)/p from one uniform draw u, and the k
    largest keys win.  Draw pattern: one uniform double per positive-
    probability id, in ascending-id order.  Scaling all probabilities by a
    positive constant scales every key identically, so only relative masses
    matter.
    """
    if len(probs) != len(stats) or not np.array_equal(probs.ids, stats.ids):
        raise ConsistencyError("probability table is not aligned with the stats table")
    positive = probs.probabilities > 0
    available = int(positive.sum())
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > available:
        raise CapacityError(
            f"k = {k} exceeds the {available} ids with positive selection probability"
        )
    rng = _generator(seed)
    u = rng.random(available)
    with np.errstate(divide="ignore"):
        keys = np.log(u) / probs.probabilities[positive]
    order = np.argsort(-keys, kind="stable")
    ids = tuple(int(i) for i in probs.ids[positive][order[:k]])
    return Selection(
        method=method if method is not None else MethodSpec.make("prob"),
        ids=ids,
        k=k,
        seed=seed,
    )


def run_method(spec: MethodSpec, stats: StatsTable, k: int, seed: int) -> Selection:
    """Dispatch a method descriptor over a stats table.

    For ``prob`` the histogram is built from the given table (parameters
    ``weight``, ``bin_width``, ``floor``; defaults w1 / 0.25 / 1e-12), so
    running it on a sub-table scores that sub-table in isolation.
    """
    name = spec.name
    if name == "random":
        return select_random(stats, k, seed)
    if name == "entropy-top":
        return select_entropy_topk(stats, k)
    if name == "entropy-bottom":
        return select_entropy_bottomk(stats, k)
    if name == "forgetting":
        return select_forgetting(stats, k)
    if name == "tail":
        beta = float(spec.param("beta", str(DEFAULT_BETA)))
        return select_tail_deterministic(stats, k, beta)
    if name == "prob":
        scheme = WeightScheme.parse(spec.param("weight", "w1"))
        bin_width = float(spec.param("bin_width", str(DEFAULT_BIN_WIDTH)))
        floor = float(spec.param("floor", str(DEFAULT_FLOOR)))
        hist = build_histogram(stats, bin_width=bin_width, floor=floor)
        table = selection_probabilities(stats, hist, scheme)
        method = MethodSpec.make("prob", weight=scheme.value, bin_width=bin_width, floor=floor)
        return select_probabilistic(stats, k, table, seed, method=method)
    if name == "kcenter":
        pool_text = spec.param("pool", "seeded")
        pool = None if pool_text == "seeded" else [int(t) for t in pool_text.split(",")]
        return select_kcenter(stats, k, initial_pool=pool, seed=seed)
    raise ValidationError(f"unknown selection method {name!r}")


def select_class_balanced(
    inner_method: MethodSpec, stats: StatsTable, k: int, seed: int
) -> Selection:
    """Apply a per-class-applicable method within every class.

    Each class gets a quota of floor(k / C) slots; the remaining
    ``k - C*floor(k/C)`` slots go one each to the classes with the largest
    candidate pools (ties by ascending class index).  A class smaller than
    its quota is capped at its size and the deficit is redistributed by the
    same largest-pool-first rule.  Every per-class run receives the outer
    seed verbatim, so each class's output equals the inner method applied to
    that class's sub-table in isolation.  Output order: ascending class,
    each class in its inner selection order.
    """
    if inner_method.name not in PER_CLASS_METHODS:
        raise ValidationError(
            f"method {inner_method.name!r} cannot be class-balanced "
            f"(valid: {', '.join(PER_CLASS_METHODS)})"
        )
    c = stats.class_count
    if k < c:
        raise ValidationError(f"k = {k} is below the class count {c}")
    if k > len(stats):
        raise CapacityError(f"k = {k} exceeds the {len(stats)} candidates in the table")

    pools = np.bincount(stats.labels, minlength=c)
    quotas = _balanced_quotas(pools, k)

    ids: list[int] = []
    for label in range(c):
        if quotas[label] == 0:
            continue
        sub = stats.subset(stats.ids[stats.labels == label])
        ids.extend(run_method(inner_method, sub, int(quotas[label]), seed).ids)

    method = MethodSpec(
        name="class-balanced",
        params=(("inner", inner_method.name),) + inner_method.params,
    )
    return Selection(method=method, ids=tuple(ids), k=k, seed=seed)


def _balanced_quotas(pools: np.ndarray, k: int) -> np.ndarray:
    """Per-class quotas summing to k, capped at class sizes."""
    c = len(pools)
    base = k // c
    remainder = k - base * c
    by_pool_size = sorted(range(c), key=lambda label: (-pools[label], label))

    quotas = np.full(c, base, dtype=np.int64)
    for label in by_pool_size[:remainder]:
        quotas[label] += 1
    quotas = np.minimum(quotas, pools)

    while quotas.sum() < k:
        need = int(k - quotas.sum())
        eligible = [label for label in by_pool_size if quotas[label] < pools[label]]
        if not eligible:  # pragma: no cover - k <= sum(pools) is checked upstream
            raise CapacityError("not enough candidates to fill the class quotas")
        for label in eligible[:need]:
            quotas[label] += 1
        quotas = np.minimum(quotas, pools)
    return quotas


def attach_forget_counts(stats: StatsTable, log: CorrectnessLog) -> StatsTable:
    """Stats table with forgetting counts joined in from a correctness log.

    Every stats id must appear in the log; extra log rows are ignored.
    """
    counts = count_forgetting_events(log)
    missing = [int(i) for i in stats.ids if int(i) not in counts]
    if missing:
        raise ConsistencyError(f"correctness log has no row for id {missing[0]}")
    return stats.with_forget_counts(counts)
