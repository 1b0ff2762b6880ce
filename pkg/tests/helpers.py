"""Shared fixtures and independent oracles used across the test suite.

The oracles here are deliberately naive (plain-Python scans, enumeration of
draw orders) so they stay independent of the vectorized implementations they
check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from proxysel import ExampleStat, StatsTable


def make_stats(
    entropies,
    labels=None,
    ids=None,
    forget=None,
    features=None,
    class_count=None,
):
    n = len(entropies)
    ids = list(range(n)) if ids is None else list(ids)
    labels = [0] * n if labels is None else list(labels)
    rows = []
    for i in range(n):
        rows.append(
            ExampleStat(
                id=ids[i],
                label=labels[i],
                entropy=float(entropies[i]),
                forget_count=None if forget is None else int(forget[i]),
                feature=None if features is None else tuple(float(v) for v in features[i]),
            )
        )
    return StatsTable(rows, class_count=class_count)


def sequential_subset_probability(probs, subset) -> float:
    """Probability that successive renormalized draws produce this subset.

    Enumerates every draw order of the subset and sums the exact path
    probabilities; tractable for the tiny instances the tests use.
    """
    total = 0.0
    for perm in itertools.permutations(subset):
        path = 1.0
        remaining = 1.0
        for x in perm:
            path *= probs[x] / remaining
            remaining -= probs[x]
        total += path
    return total


def greedy_kcenter_oracle(ids, features, pool_ids, k):
    """Exhaustive-scan greedy k-center: argmax over candidates of the min
    squared distance to the pool, ties to the lowest id."""
    feature_of = {i: tuple(f) for i, f in zip(ids, features)}
    pool = list(pool_ids)
    out = []
    for _ in range(k):
        best_id = None
        best_d = -math.inf
        for i in sorted(ids):
            if i in pool or i in out:
                continue
            dmin = min(
                sum((a - b) ** 2 for a, b in zip(feature_of[i], feature_of[j]))
                for j in pool + out
            )
            if dmin > best_d:
                best_d = dmin
                best_id = i
        out.append(best_id)
    return out


def forgetting_oracle(sequence) -> int:
    """Pairwise scan counting correct -> incorrect transitions."""
    return sum(
        1 for a, b in zip(sequence[:-1], sequence[1:]) if a == 1 and b == 0
    )


def random_logits_table(seed, n, d, class_count=10):
    from proxysel import LogitsTable

    rng = np.random.Generator(np.random.Philox(key=seed))
    return LogitsTable(
        np.arange(n),
        rng.integers(0, class_count, size=n),
        rng.normal(0.0, 3.0, size=(n, d)),
    )


def run_cli_pipeline(workdir, n=400, figures=True) -> dict[str, bytes]:
    """Drive entropy -> histogram -> select -> split -> report in one folder.

    Returns every produced file's bytes, keyed by file name.
    """
    from proxysel import formats
    from proxysel.cli import main

    workdir.mkdir(parents=True, exist_ok=True)
    formats.write_logits(random_logits_table(42, n, 10), workdir / "logits.csv")

    commands = [
        ["entropy", "--logits", str(workdir / "logits.csv"), "--out", str(workdir / "stats.csv")],
        [
            "histogram",
            "--stats", str(workdir / "stats.csv"),
            "--bin-width", "0.25",
            "--out", str(workdir / "hist.csv"),
        ],
        [
            "select",
            "--stats", str(workdir / "stats.csv"),
            "--method", "prob",
            "--weight", "w1",
            "--k", str(n // 8),
            "--seed", "3",
            "--out", str(workdir / "sel.txt"),
        ],
        [
            "split",
            "--selection", str(workdir / "sel.txt"),
            "--stats", str(workdir / "stats.csv"),
            "--mode", "allshuffle",
            "--ratio", "0.5",
            "--seed", "4",
            "--out-prefix", str(workdir / "split"),
        ],
        [
            "report",
            "--selection", str(workdir / "sel.txt"),
            "--stats", str(workdir / "stats.csv"),
            "--out-prefix", str(workdir / "rep"),
        ],
    ]
    if not figures:
        commands[-1].append("--no-figures")
    for argv in commands:
        code = main(argv)
        assert code == 0, f"command failed: {argv}"
    return {p.name: p.read_bytes() for p in sorted(workdir.iterdir())}
