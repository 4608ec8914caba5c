import numpy as np
import pytest
from hypothesis import given, strategies as st

from rainshape.fpca import (FunctionalSample, covariance_function, cv_scores, dumps_eigensystem,
                            dumps_eigenvalues, eigen_decompose, fit_eigensystem, mean_function,
                            mode_of_variation, principal_scores, reconstruct, select_num_components,
                            variance_explained)
from rainshape.starhull import AngularGrid

G = AngularGrid(200)
T = G.thetas
W = G.step


def rank3_sample(seed, n=60, noise=0.1, grid=G):
    """mu = 1 plus scores with variances (4, 2, 1) on cos, sin, cos 2 (normalized), plus white noise."""
    rng = np.random.default_rng(seed)
    t = grid.thetas
    phi = np.vstack([np.cos(t), np.sin(t), np.cos(2 * t)]) / np.sqrt(np.pi)
    z = rng.standard_normal((n, 3)) * np.sqrt([4.0, 2.0, 1.0])
    x = 1.0 + z @ phi + noise * rng.standard_normal((n, grid.m))
    return FunctionalSample(grid, x)


def inner(a, b):
    return W * float(np.dot(a, b))


def test_single_curve():
    s = FunctionalSample(G, np.sin(T)[None])
    assert np.array_equal(mean_function(s), np.sin(T))
    assert np.all(covariance_function(s) == 0)


def test_symmetric_pair_and_degenerate_weights():
    c = np.cos(3 * T) + 0.5
    assert np.allclose(mean_function(FunctionalSample(G, np.vstack([c, -c]))), 0.0)
    assert np.array_equal(mean_function(FunctionalSample(G, np.vstack([c, -c]), weights=[1.0, 0.0])), c)


def test_rank_one_covariance_is_outer_product():
    a = np.array([-2.0, -1.0, 1.0, 2.0])
    s = FunctionalSample(G, a[:, None] * np.cos(T))
    sigma2 = np.mean(a ** 2)
    assert np.allclose(covariance_function(s), sigma2 * np.outer(np.cos(T), np.cos(T)), atol=1e-13)


def test_uniform_weights_reduce_to_sample_covariance():
    x = np.random.default_rng(0).standard_normal((7, G.m))
    d = x - x.mean(axis=0)
    assert np.abs(covariance_function(FunctionalSample(G, x)) - d.T @ d / 7).max() < 1e-14


def test_analytic_rank_one_operator():
    sigma2 = 2.5
    es = eigen_decompose(sigma2 * np.outer(np.cos(T), np.cos(T)) / np.pi, G)
    assert es.eigenvalues[0] == pytest.approx(sigma2, abs=1e-6)
    assert np.allclose(es.eigenfunctions[0], np.cos(T) / np.sqrt(np.pi), atol=1e-6)
    assert np.all(es.eigenvalues[1:] < 1e-10)


def test_zero_and_white_noise_operators():
    assert np.all(eigen_decompose(np.zeros((G.m, G.m)), G).eigenvalues == 0)
    c = 0.7
    es = eigen_decompose(c / W * np.eye(G.m), G)
    assert np.ptp(es.eigenvalues) < 1e-8
    assert es.eigenvalues[0] == pytest.approx(c)


def test_asymmetric_covariance_rejected():
    k = np.eye(G.m)
    k[0, 1] = 1.0
    with pytest.raises(ValueError, match="symmetric"):
        eigen_decompose(k, G)


def test_dense_and_svd_agree():
    s = rank3_sample(1)
    a, b = fit_eigensystem(s, "dense"), fit_eigensystem(s, "svd")
    assert np.allclose(a.eigenvalues[:10], b.eigenvalues[:10], rtol=1e-9, atol=1e-12)
    for j in range(3):
        assert abs(inner(a.eigenfunctions[j], b.eigenfunctions[j])) == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(a.eigenfunctions[j], b.eigenfunctions[j], atol=1e-7)


def test_orthonormality_trace_and_signs():
    s = rank3_sample(2)
    es = fit_eigensystem(s)
    gram = W * es.eigenfunctions @ es.eigenfunctions.T
    assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-8
    assert es.eigenvalues.sum() == pytest.approx(W * np.trace(covariance_function(s)), rel=1e-10)
    for phi in es.eigenfunctions:
        nz = np.nonzero(np.abs(phi) > 1e-12)[0]
        assert phi[nz[0]] > 0


def test_scores_and_reconstruction():
    s = rank3_sample(3, n=20)
    es = fit_eigensystem(s)
    assert np.allclose(principal_scores(es.mean, es, 5), 0.0)
    c = 0.8
    assert np.allclose(principal_scores(es.mean + c * es.eigenfunctions[0], es, 3), [c, 0, 0], atol=1e-12)
    x = s.curves[4]
    assert np.allclose(reconstruct(x, es, 0), es.mean)
    assert np.allclose(reconstruct(x, es, es.n_components), x, atol=1e-8)
    errs = [np.linalg.norm(x - reconstruct(x, es, j)) for j in range(es.n_components + 1)]
    assert np.all(np.diff(errs) <= 1e-12)
    with pytest.raises(ValueError):
        reconstruct(x, es, es.n_components + 1)


@given(st.integers(0, 10_000))
def test_bessel_inequality(seed):
    rng = np.random.default_rng(seed)
    es = fit_eigensystem(rank3_sample(seed % 7, n=12))
    y = rng.standard_normal(G.m)
    sc = principal_scores(y, es, es.n_components)
    assert np.sum(sc ** 2) <= inner(y - es.mean, y - es.mean) * (1 + 1e-10)


def test_modes_of_variation():
    es = fit_eigensystem(rank3_sample(4))
    assert np.array_equal(mode_of_variation(es, 1, 0.0), es.mean)
    assert np.allclose(mode_of_variation(es, 1, 1.0), es.mean + np.sqrt(es.eigenvalues[0]) * es.eigenfunctions[0])
    assert np.allclose(mode_of_variation(es, 2, 0.7) + mode_of_variation(es, 2, -0.7), 2 * es.mean)
    with pytest.raises(ValueError):
        mode_of_variation(es, 0, 1.0)


def test_variance_explained():
    assert variance_explained([3.0, 1.0], 2) == 100.0
    assert variance_explained([2.0, 0.0, 0.0], 1) == 100.0
    assert variance_explained([3.0, 1.0], 1) == 75.0
    assert np.isnan(variance_explained([0.0, 0.0], 1))


def test_weighted_fit_matches_replicated_sample():
    s = rank3_sample(5, n=6)
    dup = FunctionalSample(G, np.vstack([s.curves, s.curves[:2]]))
    w = np.array([2, 2, 1, 1, 1, 1], float)
    weighted = FunctionalSample(G, s.curves, w / w.sum())
    a, b = fit_eigensystem(dup), fit_eigensystem(weighted)
    assert np.allclose(a.mean, b.mean)
    assert np.allclose(a.eigenvalues[:5], b.eigenvalues[:5])


def test_cv_picks_rank_three():
    assert select_num_components(rank3_sample(6), j_max=8) == 3


def test_cv_noiseless_rank_one():
    a = np.random.default_rng(7).standard_normal(15)
    s = FunctionalSample(G, 2.0 + a[:, None] * np.cos(T))
    scores = cv_scores(s, j_max=5)
    assert select_num_components(s, j_max=5) == 1
    assert scores[0] < 1e-20


def test_cv_ignores_censored_as_targets():
    s = rank3_sample(8, n=10)
    cens = FunctionalSample(G, s.curves, censored=[True] * 9 + [False])
    assert cv_scores(cens, j_max=4).shape == (4,)
    with pytest.raises(ValueError):
        cv_scores(FunctionalSample(G, s.curves[:2]))


def test_without_renormalizes():
    s = FunctionalSample(G, np.zeros((3, G.m)), weights=[0.5, 0.25, 0.25])
    assert np.allclose(s.without(0).weights, [0.5, 0.5])


def test_sample_validation():
    with pytest.raises(ValueError):
        FunctionalSample(G, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        FunctionalSample(G, np.zeros((2, G.m)), weights=[0.3, 0.3])
    with pytest.raises(ValueError):
        FunctionalSample(G, np.full((1, G.m), np.nan))


def test_exports():
    es = fit_eigensystem(rank3_sample(9, n=8))
    text = dumps_eigensystem(es, 2)
    lines = text.splitlines()
    assert lines[0] == "theta,mean,phi_1,phi_2" and len(lines) == G.m + 1
    ev = dumps_eigenvalues(es.eigenvalues, 3).splitlines()
    assert ev[0] == "j,eigenvalue,cumulative_pct" and len(ev) == 4
