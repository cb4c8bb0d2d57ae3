import numpy as np
import pytest

from tapmein.learn import (
    ForestParams,
    HyperGrid,
    SvmParams,
    cross_val_accuracy,
    default_grid,
    grid_search,
)


def blob_problem(rng, n=12, spread=0.4, gap=2.0):
    pos = rng.normal([gap, gap], spread, (n, 2))
    neg = rng.normal([-gap, -gap], spread, (n, 2))
    X = np.vstack([pos, neg])
    y = np.concatenate([np.ones(n), -np.ones(n)])
    return X, y


class TestDefaultGrid:
    def test_canonical_svm_order(self):
        grid = default_grid(100)
        cs = [p.c for p in grid.svm]
        assert cs == sorted(cs)
        gammas_within_first_c = [p.gamma for p in grid.svm if p.c == cs[0]]
        assert gammas_within_first_c == sorted(gammas_within_first_c)
        assert 1 / 100 in {p.gamma for p in grid.svm}

    def test_canonical_forest_order(self):
        grid = default_grid(50)
        assert [(p.tree_count, p.max_depth) for p in grid.forest] == [
            (50, 8), (50, None), (100, 8), (100, None),
        ]


class TestGridSearch:
    def test_single_candidate_is_returned(self, rng):
        X, y = blob_problem(rng)
        only = SvmParams(c=1.0, gamma=0.2)
        assert grid_search(X, y, HyperGrid(svm=(only,), forest=()), kind="svm", seed=1) is only

    def test_empty_grid_rejected(self, rng):
        X, y = blob_problem(rng)
        with pytest.raises(ValueError):
            grid_search(X, y, HyperGrid(svm=(), forest=()), kind="svm", seed=1)

    def test_tie_break_picks_earliest_candidate(self, rng):
        X, y = blob_problem(rng)  # trivially separable: both candidates score 1.0
        first = SvmParams(c=1.0, gamma=0.1)
        second = SvmParams(c=10.0, gamma=0.1)
        best = grid_search(X, y, HyperGrid(svm=(first, second), forest=()), kind="svm", seed=1)
        assert best is first
        assert cross_val_accuracy(X, y, first, seed=1) == cross_val_accuracy(X, y, second, seed=1)

    def test_moderate_gamma_beats_memorizing_gamma(self, rng):
        # positives split into two lobes; a huge gamma memorizes training
        # points and misses the held-out lobe members, a moderate gamma
        # generalizes across folds
        lobe_a = rng.normal([2.0, 0.0], 0.08, (6, 2))
        lobe_b = rng.normal([0.0, 2.0], 0.08, (6, 2))
        neg = rng.normal([-1.5, -1.5], 0.6, (12, 2))
        X = np.vstack([lobe_a, lobe_b, neg])
        y = np.concatenate([np.ones(12), -np.ones(12)])
        moderate = SvmParams(c=1.0, gamma=0.5)
        memorizing = SvmParams(c=100.0, gamma=500.0)
        acc_moderate = cross_val_accuracy(X, y, moderate, seed=3)
        acc_memorizing = cross_val_accuracy(X, y, memorizing, seed=3)
        assert acc_moderate >= acc_memorizing
        best = grid_search(
            X, y, HyperGrid(svm=(memorizing, moderate), forest=()), kind="svm", seed=3
        )
        if acc_moderate > acc_memorizing:
            assert best is moderate

    def test_forest_candidates_work(self, rng):
        X, y = blob_problem(rng)
        grid = HyperGrid(svm=(), forest=(ForestParams(tree_count=15, max_depth=4),))
        best = grid_search(X, y, grid, kind="forest", seed=2)
        assert best.tree_count == 15

    def test_fold_assignment_deterministic(self, rng):
        X, y = blob_problem(rng)
        params = SvmParams(c=1.0, gamma=0.2)
        assert cross_val_accuracy(X, y, params, seed=9) == cross_val_accuracy(X, y, params, seed=9)
