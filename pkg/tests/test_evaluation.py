import math
import time

import numpy as np
import pytest

from extreme_entropy.dataset import Dataset, load_bundled
from extreme_entropy.entropy import Gaussian1D, dcs_gaussian_1d, dcs_last_term
from extreme_entropy.evaluation import (
    EvalReport,
    ModelConfig,
    bench,
    best_report,
    cross_validate,
    cross_validate_tuned,
    derive_seed,
    format_table,
    grid_search_cv,
    make_grid,
    spearman_experiment,
    stability_sweep,
    train,
    tune_by_gaussian_dcs,
    tune_by_kde_dcs,
)
from extreme_entropy.metrics import spearman
from conftest import make_blobs


def _ds(**kw):
    X, y = make_blobs(**kw)
    return Dataset(X, y, "blobs")


class TestConfig:
    def test_eekm_needs_gamma(self):
        with pytest.raises(ValueError):
            ModelConfig("eekm", None, 10)

    def test_eem_needs_activation(self):
        with pytest.raises(ValueError):
            ModelConfig("eem", None, 10)

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            ModelConfig("svm")

    def test_grid_sizes(self):
        assert len(make_grid("eem")) == 5
        assert len(make_grid("eekm", gammas=(0.1, 1.0))) == 10

    def test_seed_derivation(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
        assert derive_seed(1, 2, 3) != derive_seed(1, 2, 4)
        assert 0 <= derive_seed(-1, 5) < 2 ** 63


class TestCrossValidate:
    @pytest.mark.parametrize("cfg", [
        ModelConfig("eem", "rbf", 30),
        ModelConfig("eem", "sig", 30),
        ModelConfig("welm", "sig", 30),
        ModelConfig("eekm", None, 30, 1.0),
    ])
    def test_separable(self, cfg):
        rep = cross_validate(_ds(), cfg, k=5, repeats=2, seed=0)
        assert rep.mean == 1.0
        assert len(rep.fold_scores) == 10 and not rep.skipped

    def test_deterministic(self):
        ds = _ds(gap=1.0)
        cfg = ModelConfig("eem", "rbf", 20)
        a = cross_validate(ds, cfg, k=5, repeats=2, seed=3)
        b = cross_validate(ds, cfg, k=5, repeats=2, seed=3)
        assert a.fold_scores == b.fold_scores

    def test_thread_count_independent(self):
        ds = _ds(gap=1.0)
        cfg = ModelConfig("eem", "sig", 20)
        a = cross_validate(ds, cfg, k=5, repeats=2, seed=3, threads=1)
        b = cross_validate(ds, cfg, k=5, repeats=2, seed=3, threads=4)
        assert a.fold_scores == b.fold_scores

    def test_single_class_training_fold_skipped(self):
        # one positive and k = 2: the fold testing on it trains on negatives only
        X = np.r_[np.full((1, 1), 5.0), np.random.default_rng(0).random((10, 1))]
        ds = Dataset(X, np.r_[1, -np.ones(10, dtype=int)])
        rep = cross_validate(ds, ModelConfig("eem", "rbf", 5, jitter=1e-3), k=2, repeats=1)
        assert len(rep.skipped) == 1 and len(rep.fold_scores) == 1

    def test_report_consistency(self):
        rep = cross_validate(_ds(gap=0.8), ModelConfig("eem", "rbf", 10), k=5, repeats=2)
        assert abs(rep.mean - np.mean(rep.fold_scores)) <= 1e-12
        assert abs(rep.std - np.std(rep.fold_scores)) <= 1e-12
        d = rep.to_dict()
        assert d["gmean_mean"] == rep.mean and len(d["fold_gmeans"]) == 10
        assert all(t > 0 for t in rep.train_seconds)
        assert "GMean" in format_table([rep])

    def test_global_scaling_option(self):
        rep = cross_validate(_ds(), ModelConfig("eem", "rbf", 10), k=5, repeats=1,
                             scale_globally=True)
        assert rep.mean == 1.0


class TestGridSearch:
    def test_singleton(self):
        cfg = ModelConfig("eem", "rbf", 10)
        best, reports = grid_search_cv(_ds(), [cfg], k=3, repeats=1)
        assert best == cfg and len(reports) == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            grid_search_cv(_ds(), [])

    def test_perfect_config_wins(self):
        # a single rbf unit is too coarse to separate the clouds perfectly
        ds = _ds(gap=3.0)
        good = ModelConfig("eem", "rbf", 40)
        weak = ModelConfig("eem", "rbf", 1)
        best, reports = grid_search_cv(ds, [weak, good], k=5, repeats=1)
        assert best == good
        assert max(r.mean for r in reports) == 1.0

    def test_tie_prefers_smaller_h(self):
        best, _ = grid_search_cv(_ds(), make_grid("eem", h_values=(80, 20, 40)), k=3, repeats=1)
        assert best.h == 20

    def test_tie_prefers_smaller_gamma(self):
        reps = [EvalReport(ModelConfig("eekm", None, 10, g), [1.0], [0.1]) for g in (1.0, 0.1)]
        assert best_report(reps).config.gamma == 0.1

    def test_deterministic(self):
        ds = _ds(gap=0.7, seed=4)
        grid = make_grid("eem", h_values=(5, 10, 20))
        assert grid_search_cv(ds, grid, k=5, repeats=2, seed=1)[0] == \
            grid_search_cv(ds, grid, k=5, repeats=2, seed=1)[0]


class TestTuning:
    def test_single_config(self):
        cfg = ModelConfig("eem", "rbf", 10)
        for tuner in (tune_by_gaussian_dcs, tune_by_kde_dcs):
            res = tuner(_ds(), [cfg])
            assert res.config == cfg and res.n_fits == 1

    def test_fit_count(self):
        grid = make_grid("eem", h_values=(5, 10, 20, 40))
        assert tune_by_gaussian_dcs(_ds(gap=1.0), grid).n_fits == len(grid)

    def test_separating_config_wins(self):
        ds = _ds(gap=3.0)
        good = ModelConfig("eem", "rbf", 40)
        weak = ModelConfig("eem", "rbf", 1)
        for tuner in (tune_by_gaussian_dcs, tune_by_kde_dcs):
            assert tuner(ds, [weak, good]).config == good

    def test_identical_projections_tie_to_smaller_h(self):
        # EEKM clamps h to the 100 training rows, so both configs build the same model
        ds = _ds(gap=1.0)
        big, small = ModelConfig("eekm", None, 500, 1.0), ModelConfig("eekm", None, 200, 1.0)
        for tuner in (tune_by_gaussian_dcs, tune_by_kde_dcs):
            res = tuner(ds, [big, small])
            assert res.scores[0][1] == res.scores[1][1]
            assert res.config == small

    def test_unfittable_configs_skipped(self):
        # single-row classes have singular covariances without jitter
        ds = Dataset(np.array([[0.0, 0.0], [1.0, 1.0]]), [1, -1])
        bad = ModelConfig("eem", "rbf", 3)
        ok = ModelConfig("eem", "rbf", 3, jitter=1e-3)
        res = tune_by_gaussian_dcs(ds, [bad, ok], variance="model")
        assert res.config == ok and res.scores[0][1] is None
        with pytest.raises(RuntimeError):
            tune_by_gaussian_dcs(ds, [bad], variance="model")

    def test_welm_rejected(self):
        with pytest.raises(ValueError):
            tune_by_gaussian_dcs(_ds(), [ModelConfig("welm", "sig", 5)])

    def test_model_variance_mode(self):
        res = tune_by_gaussian_dcs(_ds(gap=1.0), make_grid("eem", h_values=(5, 10)), variance="model")
        assert math.isfinite(res.score)
        with pytest.raises(ValueError):
            tune_by_gaussian_dcs(_ds(), [ModelConfig("eem", "rbf", 5)], variance="other")
        with pytest.raises(ValueError):
            tune_by_gaussian_dcs(_ds(), [ModelConfig("eem", "rbf", 5)], formula="other")

    def test_kde_agrees_with_gaussian(self):
        grid = make_grid("eem", "sig", h_values=(1, 3, 10, 30))
        agree = 0
        for seed in range(10):
            ds = _ds(n_pos=60, n_neg=90, d=3, gap=1.5, seed=seed)
            g = tune_by_gaussian_dcs(ds, grid, seed=seed).config
            k = tune_by_kde_dcs(ds, grid, seed=seed).config
            agree += g == k
        assert agree >= 8

    def test_tuned_cross_validation(self):
        grid = make_grid("eem", h_values=(5, 20))
        rep = cross_validate_tuned(_ds(), grid, k=3, repeats=1)
        assert rep.mean == 1.0 and len(rep.chosen) == 3


class TestSpearmanExperiment:
    def test_deterministic_and_shape(self):
        ds = _ds(n_pos=50, n_neg=80, d=3, gap=1.0)
        a = spearman_experiment(ds, (1, 5), 5, 10, seed=2)
        b = spearman_experiment(ds, (1, 5), 5, 10, seed=2)
        assert a == b and set(a) == {1, 5}

    def test_separated_large_set(self):
        ds = _ds(n_pos=1000, n_neg=3000, d=4, gap=3.0)
        res = spearman_experiment(ds, (10,), 10, 20, seed=0)
        assert res[10] >= 0.95

    def test_constant_variance_construction(self):
        # fixed class variances: full Dcs = const + gap term, a strictly monotone map
        gaps = np.random.default_rng(0).uniform(0, 5, 200)
        surrogate, full = [], []
        for g in gaps:
            f, h = Gaussian1D(g, 1.3), Gaussian1D(0.0, 0.4)
            surrogate.append(dcs_last_term(f, h))
            full.append(dcs_gaussian_1d(f, h))
        assert spearman(surrogate, full) == 1.0


class TestStability:
    def test_separable_flat(self):
        res = stability_sweep(_ds(), [10, 20, 30], ModelConfig("eem", "rbf", 10), k=3)
        assert [h for h, _ in res] == [10, 20, 30]
        assert all(v == 1.0 for _, v in res)

    def test_deterministic(self):
        ds = _ds(gap=0.8)
        cfg = ModelConfig("eem", "sig", 10)
        assert stability_sweep(ds, [5, 10], cfg, k=3, seed=1) == \
            stability_sweep(ds, [5, 10], cfg, k=3, seed=1)

    def test_empty(self):
        with pytest.raises(ValueError):
            stability_sweep(_ds(), [], ModelConfig())


class TestBench:
    def test_positive(self):
        assert bench(_ds(), ModelConfig("eem", "rbf", 10), runs=1) > 0

    def test_monotone_in_h(self):
        ds = _ds(n_pos=1000, n_neg=1000, d=5)
        assert bench(ds, ModelConfig("eem", "rbf", 50)) < bench(ds, ModelConfig("eem", "rbf", 1000))

    def test_large_fit_budget(self):
        ds = _ds(n_pos=2500, n_neg=2500, d=10, gap=2.0)
        start = time.perf_counter()
        model = train(ModelConfig("eem", "rbf", 500), ds.features / 12, ds.labels)
        assert time.perf_counter() - start < 60
        assert model.h == 500


def test_bundled_breast_cancer_quick():
    rep = cross_validate(load_bundled("breast-cancer"), ModelConfig("eem", "rbf", 100), k=5, repeats=1)
    assert rep.mean > 0.9
