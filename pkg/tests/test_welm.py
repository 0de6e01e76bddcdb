import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extreme_entropy.feature_map import RandomMapSpec, sample_random_map
from extreme_entropy.metrics import gmean_score
from extreme_entropy.welm import (
    WelmModel,
    fit_welm,
    fit_welm_projected,
    predict_welm,
    project_welm,
    row_weights,
)
from conftest import make_blobs


def test_identity_features():
    m = fit_welm_projected(np.eye(2), np.array([1.0, -1.0]), None, "balanced")
    np.testing.assert_allclose(m.beta, [1, -1], atol=1e-15)


def test_balanced_matches_unweighted_up_to_scale():
    rng = np.random.default_rng(0)
    H = rng.random((40, 6))
    y = np.r_[np.ones(20), -np.ones(20)]
    a = fit_welm_projected(H, y, None, "balanced").beta
    b = fit_welm_projected(H, y, None, "none").beta
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)  # uniform weights cancel


def test_row_weights():
    y = np.array([1, 1, 1, -1])
    np.testing.assert_allclose(row_weights(y, "balanced"), np.sqrt([1 / 3, 1 / 3, 1 / 3, 1]))
    np.testing.assert_allclose(row_weights(y, "balanced-ratio"), [1, 1, 1, np.sqrt(3)])
    np.testing.assert_array_equal(row_weights(y, "none"), 1)
    with pytest.raises(ValueError):
        row_weights(y, "other")


def test_ratio_weighting_same_direction_as_balanced():
    rng = np.random.default_rng(1)
    H = rng.random((50, 5))
    y = np.where(rng.random(50) < 0.3, 1.0, -1.0)
    a = fit_welm_projected(H, y, None, "balanced").beta
    b = fit_welm_projected(H, y, None, "balanced-ratio").beta
    # the two weightings differ by a constant factor
    np.testing.assert_allclose(b, a, rtol=1e-8)


def test_imbalanced_balanced_not_worse():
    wins = 0
    for seed in range(10):
        X, y = make_blobs(n_pos=18, n_neg=162, gap=1.2, seed=seed)
        T, ty = make_blobs(n_pos=200, n_neg=200, gap=1.2, seed=100 + seed)
        spec = sample_random_map(2, 20, "sig", seed)
        bal = gmean_score(ty, predict_welm(fit_welm(X, y, spec, "balanced"), T))
        raw = gmean_score(ty, predict_welm(fit_welm(X, y, spec, "none"), T))
        wins += bal >= raw
    assert wins == 10


def test_predict_hand_example():
    spec = RandomMapSpec("sig", np.zeros((2, 1)), np.array([0.0, 0.0]))
    m = WelmModel(spec, np.array([1.0, 0.0]))
    assert predict_welm(m, np.array([[3.0]]))[0] == 1
    zero = WelmModel(spec, np.zeros(2))
    np.testing.assert_array_equal(predict_welm(zero, np.arange(5.0)[:, None]), 1)


def test_flipping_labels_flips_model():
    X, y = make_blobs(gap=1.0, seed=2)
    spec = sample_random_map(2, 15, "rbf", 0)
    a, b = fit_welm(X, y, spec), fit_welm(X, -y, spec)
    np.testing.assert_allclose(b.beta, -a.beta, atol=1e-12)
    T = np.random.default_rng(0).uniform(-3, 3, (100, 2))
    pa, pb = project_welm(a, T), project_welm(b, T)
    keep = np.abs(pa) > 1e-9
    np.testing.assert_array_equal(predict_welm(b, T)[keep], -predict_welm(a, T)[keep])


def test_dimension_mismatch():
    spec = sample_random_map(3, 4)
    m = WelmModel(spec, np.ones(4))
    with pytest.raises(ValueError, match="dimension mismatch"):
        predict_welm(m, np.ones((2, 2)))


@given(st.integers(1, 8), st.integers(0, 2 ** 32))
def test_square_invertible_interpolates(n, seed):
    rng = np.random.default_rng(seed)
    H = rng.standard_normal((n, n)) + 3 * np.eye(n)
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    m = fit_welm_projected(H, y, None, "none")
    assert np.linalg.norm(H @ m.beta - y) <= 1e-8


@pytest.mark.parametrize("seed", range(3))
def test_least_squares_minimal(seed):
    rng = np.random.default_rng(seed)
    H = rng.random((30, 8))
    y = np.where(rng.random(30) < 0.4, 1.0, -1.0)
    beta = fit_welm_projected(H, y, None, "none").beta
    best = np.sum((H @ beta - y) ** 2)
    for _ in range(100):
        d = rng.standard_normal(8) * rng.uniform(1e-4, 1)
        assert np.sum((H @ (beta + d) - y) ** 2) >= best - 1e-10


def test_rank_deficient_minimum_norm():
    H = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
    y = np.array([1.0, -1.0, 1.0])
    beta = fit_welm_projected(H, y, None, "none").beta
    np.testing.assert_allclose(beta[0], beta[1], atol=1e-14)
    assert np.isfinite(beta).all()
