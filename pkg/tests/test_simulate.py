import numpy as np
import pytest

from ivsets import fixtures as F
from ivsets.errors import NotPositiveDefinite, NumericFailure, TooFewSamples
from ivsets.iv import IDENTIFIED, identify_effects
from ivsets.simulate import (
    Dataset,
    ParamRanges,
    estimate_covariance,
    random_diagram,
    sample_data,
    sample_parametrization,
)
from ivsets.wright import CovarianceModel, implied_covariance, standardize


def test_same_seed_same_parametrization():
    G = F.mset()
    a, b = sample_parametrization(G, 42), sample_parametrization(G, 42)
    assert a.coefficients == b.coefficients
    assert np.array_equal(a.error_cov, b.error_cov)
    c = sample_parametrization(G, 43)
    assert a.coefficients != c.coefficients


def test_draws_respect_ranges_and_are_positive_definite():
    G = F.mset()
    r = ParamRanges()
    for seed in range(1000):
        theta = sample_parametrization(G, seed)
        np.linalg.cholesky(theta.error_cov)
        theta.check(G)
        for v in theta.coefficients.values():
            assert r.coef_low <= abs(v) <= r.coef_high


def test_drawn_parametrization_runs_through_the_pipeline():
    G = F.fig3()
    theta = sample_parametrization(G, 1)
    S = implied_covariance(G, theta)
    std = standardize(G, theta)
    np.testing.assert_allclose(np.diag(implied_covariance(G, std).matrix), 1.0, atol=1e-12)
    assert S.standardized().is_standardized()


def test_random_diagram_is_seeded():
    assert random_diagram(6, 8, 3, 5) == random_diagram(6, 8, 3, 5)


def test_large_sample_covariance_is_close():
    G = F.mset()
    sigma = implied_covariance(G, sample_parametrization(G, 3))
    d = sample_data(sigma, 100_000, 123)
    S = estimate_covariance(d, standardize=False)
    assert np.max(np.abs(S.matrix - sigma.matrix)) < 0.02


def test_sampling_is_deterministic():
    sigma = implied_covariance(F.fig3(), sample_parametrization(F.fig3(), 0))
    assert np.array_equal(sample_data(sigma, 50, 9).data, sample_data(sigma, 50, 9).data)


def test_sample_boundaries():
    sigma = CovarianceModel(("a", "b"), np.eye(2))
    assert sample_data(sigma, 2, 0).n_samples == 2
    with pytest.raises(TooFewSamples):
        sample_data(sigma, 1, 0)
    with pytest.raises(TooFewSamples):
        Dataset(("a",), np.zeros((1, 1)))


def test_non_pd_sampling_input():
    class Raw:
        variables = ("a", "b")
        matrix = np.array([[1.0, 2.0], [2.0, 1.0]])

    with pytest.raises(NumericFailure):
        sample_data(Raw(), 10, 0)


def test_estimation_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(NotPositiveDefinite):
        estimate_covariance(Dataset(("a", "b"), np.c_[rng.standard_normal(10), np.ones(10)]))
    with pytest.raises(TooFewSamples):
        estimate_covariance(Dataset(("a", "b"), rng.standard_normal((2, 2))))


def test_estimated_correlations_are_standardized():
    d = Dataset(("a", "b"), np.random.default_rng(1).standard_normal((50, 2)) * [3.0, 0.5])
    assert estimate_covariance(d).is_standardized(0.0)


def test_finite_sample_recovery_on_the_chain():
    G = F.fig3()
    theta = sample_parametrization(G, 8)
    d = sample_data(implied_covariance(G, theta), 100_000, 8)
    res = identify_effects(G, ["X"], "Y", estimate_covariance(d))
    assert res["X->Y"].status == IDENTIFIED
    assert res["X->Y"].value == pytest.approx(standardize(G, theta).coefficients["X->Y"], abs=0.05)
