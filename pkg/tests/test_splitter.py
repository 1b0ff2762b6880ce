"""Train/validation splitting: partition contracts and both strategies."""

import numpy as np
import pytest

from proxysel import MethodSpec, Selection, ValidationError, select_random
from proxysel.splitter import split_allshuffle, split_disjoint, train_share
from helpers import make_stats


def selection_of(ids):
    ids = tuple(int(i) for i in ids)
    return Selection(method=MethodSpec.make("random"), ids=ids, k=len(ids), seed=0)


class TestTrainShare:
    def test_half_rounds_up(self):
        assert train_share(10, 0.5) == 5
        assert train_share(5, 0.5) == 3
        assert train_share(1, 0.5) == 1

    def test_other_ratios(self):
        assert train_share(10, 0.3) == 3
        assert train_share(10, 0.25) == 3  # 2.5 rounds up
        assert train_share(3, 0.9) == 3

    def test_ratio_bounds(self):
        with pytest.raises(ValidationError, match="ratio"):
            train_share(10, 0.0)
        with pytest.raises(ValidationError, match="ratio"):
            train_share(10, 1.0)


class TestAllshuffle:
    def test_partition_contract(self):
        stats = make_stats(np.linspace(0.1, 1.0, 10))
        sel = selection_of(range(10))
        split = split_allshuffle(sel, stats, ratio=0.5, seed=0)
        assert len(split.train) == 5 and len(split.val) == 5
        assert set(split.train) | set(split.val) == set(sel.ids)
        assert not set(split.train) & set(split.val)

    def test_different_seeds_usually_differ(self):
        stats = make_stats(np.linspace(0.1, 1.0, 10))
        sel = selection_of(range(10))
        memberships = {
            tuple(sorted(split_allshuffle(sel, stats, 0.5, seed=s).train)) for s in range(8)
        }
        assert len(memberships) > 1

    def test_same_seed_same_split(self):
        stats = make_stats(np.linspace(0.1, 1.0, 10))
        sel = selection_of(range(10))
        assert split_allshuffle(sel, stats, 0.5, seed=4) == split_allshuffle(
            sel, stats, 0.5, seed=4
        )

    def test_selection_must_be_valid_against_stats(self):
        stats = make_stats([0.1, 0.2])
        with pytest.raises(ValidationError, match="id 9"):
            split_allshuffle(selection_of([0, 9]), stats, 0.5, seed=0)

    def test_train_membership_frequency_matches_ratio(self):
        stats = make_stats(np.linspace(0.1, 1.0, 10))
        sel = selection_of(range(10))
        trials = 4000
        counts = np.zeros(10)
        for seed in range(trials):
            for i in split_allshuffle(sel, stats, 0.5, seed=seed).train:
                counts[i] += 1
        np.testing.assert_allclose(counts / trials, 0.5, atol=0.02)


class TestDisjoint:
    def test_sorted_split_low_to_train(self):
        stats = make_stats(np.arange(1.0, 11.0))
        sel = selection_of(range(10))
        split = split_disjoint(sel, stats, ratio=0.5, low_to_train=True)
        assert sorted(split.train) == [0, 1, 2, 3, 4]
        assert sorted(split.val) == [5, 6, 7, 8, 9]

    def test_complementary_assignment(self):
        stats = make_stats(np.arange(1.0, 11.0))
        sel = selection_of(range(10))
        split = split_disjoint(sel, stats, ratio=0.5, low_to_train=False)
        assert sorted(split.train) == [5, 6, 7, 8, 9]
        assert sorted(split.val) == [0, 1, 2, 3, 4]

    def test_fully_deterministic(self):
        stats = make_stats(np.arange(1.0, 11.0))
        sel = selection_of(range(10))
        assert split_disjoint(sel, stats, 0.5, True) == split_disjoint(sel, stats, 0.5, True)

    def test_entropy_boundary_against_sort_oracle(self):
        rng = np.random.Generator(np.random.Philox(key=77))
        for _ in range(50):
            n = int(rng.integers(2, 30))
            entropies = rng.uniform(0, 3, size=n)
            stats = make_stats(entropies)
            k = int(rng.integers(2, n + 1))
            sel = select_random(stats, k, seed=int(rng.integers(0, 1000)))
            split = split_disjoint(sel, stats, ratio=0.5, low_to_train=True)
            entropy_of = {int(i): float(e) for i, e in zip(stats.ids, stats.entropies)}
            max_train = max(entropy_of[i] for i in split.train)
            min_val = min(entropy_of[i] for i in split.val) if split.val else np.inf
            assert max_train <= min_val


class TestBothModes:
    def test_partition_and_size_rule_on_random_selections(self):
        rng = np.random.Generator(np.random.Philox(key=88))
        for _ in range(40):
            n = int(rng.integers(2, 60))
            stats = make_stats(rng.uniform(0, 2, size=n))
            k = int(rng.integers(1, n + 1))
            sel = select_random(stats, k, seed=int(rng.integers(0, 1000)))
            ratio = float(rng.uniform(0.1, 0.9))
            for split in (
                split_allshuffle(sel, stats, ratio, seed=int(rng.integers(0, 1000))),
                split_disjoint(sel, stats, ratio, low_to_train=bool(rng.integers(0, 2))),
            ):
                assert len(split.train) == train_share(k, ratio)
                assert len(split.val) == k - len(split.train)
                assert set(split.train) | set(split.val) == set(sel.ids)
                assert not set(split.train) & set(split.val)
