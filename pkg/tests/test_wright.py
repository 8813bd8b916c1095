import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ivsets.diagram import Parametrization, build_diagram
from ivsets.errors import (
    AsymmetryBeyondTolerance,
    DescendantInstrument,
    NotPositiveDefinite,
    NumericFailure,
)
from ivsets.fixtures import fig2, fig3
from ivsets.paths import Path, enumerate_unblocked_paths
from ivsets.simulate import random_diagram, sample_parametrization
from ivsets.wright import (
    CovarianceModel,
    expand_correlation,
    implied_covariance,
    path_term,
    standardize,
    wright_correlation,
)

import oracles


def fig3_theta(a, c, gamma):
    psi = np.eye(3)
    psi[1, 2] = psi[2, 1] = gamma
    return Parametrization({"Z->X": a, "X->Y": c}, psi)


def test_no_edges_gives_psi():
    G = build_diagram(["A", "B"], [], [("A", "B")])
    psi = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert np.array_equal(implied_covariance(G, Parametrization({}, psi)).matrix, psi)
    one = build_diagram(["A"])
    assert implied_covariance(one, Parametrization({}, np.array([[1.7]]))).matrix[0, 0] == 1.7


def test_chain_covariances_by_hand():
    a, c, gamma = 0.7, -0.4, 0.25
    S = implied_covariance(fig3(), fig3_theta(a, c, gamma))
    assert S["Z", "X"] == pytest.approx(a, abs=1e-15)
    assert S["Z", "Y"] == pytest.approx(a * c, abs=1e-15)
    assert S["X", "X"] == pytest.approx(a * a + 1, abs=1e-15)
    assert S["X", "Y"] == pytest.approx(c * (a * a + 1) + gamma, abs=1e-15)


@given(st.integers(1, 8), st.integers(0, 16), st.integers(0, 8), st.integers(0, 10**6))
def test_implied_covariance_matches_propagation(n, nd, nb, seed):
    G = random_diagram(n, nd, nb, seed)
    theta = sample_parametrization(G, seed)
    S = oracles.covariance_by_propagation(G, theta.coefficients, theta.error_cov)
    np.testing.assert_allclose(implied_covariance(G, theta).matrix, S, atol=1e-12)


def test_standardized_chain_coefficient():
    G = fig3()
    std = standardize(G, fig3_theta(2.0, 0.5, 0.0))
    assert std.coefficients["Z->X"] == pytest.approx(2 / math.sqrt(5), abs=1e-15)


@given(st.integers(1, 8), st.integers(0, 16), st.integers(0, 8), st.integers(0, 10**6))
def test_standardization_gives_unit_variances_and_is_idempotent(n, nd, nb, seed):
    G = random_diagram(n, nd, nb, seed)
    std = standardize(G, sample_parametrization(G, seed))
    S = implied_covariance(G, std).matrix
    np.testing.assert_allclose(np.diag(S), 1.0, atol=1e-12)
    again = standardize(G, std)
    for k, v in std.coefficients.items():
        assert again.coefficients[k] == pytest.approx(v, abs=1e-12)
    np.testing.assert_allclose(again.error_cov, std.error_cov, atol=1e-12)


def test_path_terms():
    G = fig3()
    theta = fig3_theta(0.5, 0.4, 0.3)
    assert path_term(G, Path.from_edge_ids(G, "Z", ["Z->X", "X->Y"]), theta) == pytest.approx(0.2)
    assert path_term(G, Path(("Z",)), theta) == 1.0
    assert path_term(G, Path.from_edge_ids(G, "X", ["X<->Y"]), theta) == 0.3


def test_chain_correlation_is_product():
    G = fig3()
    std = standardize(G, fig3_theta(0.8, 0.6, 0.2))
    rho = wright_correlation(G, std, "Z", "Y")
    assert rho == pytest.approx(std.coefficients["Z->X"] * std.coefficients["X->Y"], abs=1e-15)
    assert rho == pytest.approx(implied_covariance(G, std)["Z", "Y"], abs=1e-14)


def test_disconnected_pair_has_zero_correlation():
    G = build_diagram(["A", "B", "C"], [("A", "C")])
    std = standardize(G, sample_parametrization(G, 0))
    assert wright_correlation(G, std, "A", "B") == 0.0


@given(st.integers(2, 8), st.integers(0, 16), st.integers(0, 8), st.integers(0, 10**6))
def test_path_sum_equals_implied_correlation(n, nd, nb, seed):
    G = random_diagram(n, nd, nb, seed)
    std = standardize(G, sample_parametrization(G, seed))
    S = implied_covariance(G, std)
    for i, a in enumerate(G.nodes):
        for b in G.nodes[i + 1:]:
            assert abs(wright_correlation(G, std, a, b) - S[a, b]) < 1e-10


def test_chain_expansion_puts_zero_on_the_arc():
    G = fig3()
    std = standardize(G, fig3_theta(0.8, 0.6, 0.2))
    exp = expand_correlation(G, std, "Z", "Y")
    rho = implied_covariance(G, std)
    assert exp.coefficients["X->Y"] == pytest.approx(rho["Z", "X"], abs=1e-14)
    assert exp.coefficients["X<->Y"] == 0.0


def test_expansion_reproduces_correlation_on_conditional_iv_model():
    G = fig2()
    for seed in range(50):
        std = standardize(G, sample_parametrization(G, seed))
        S = implied_covariance(G, std)
        exp = expand_correlation(G, std, "Z", "Y")
        assert set(exp.coefficients) == {"W->Y", "X->Y", "X<->Y"}
        assert exp.evaluate(G, std) == pytest.approx(S["Z", "Y"], abs=1e-12)


def test_expansion_of_unconnected_instrument_is_zero():
    G = build_diagram(["Q", "X", "Y"], [("X", "Y")], [("X", "Y")])
    std = standardize(G, sample_parametrization(G, 3))
    assert all(v == 0.0 for v in expand_correlation(G, std, "Q", "Y").coefficients.values())


def test_expansion_rejects_descendants():
    G = build_diagram(["X", "Y", "D"], [("X", "Y"), ("Y", "D")])
    std = standardize(G, sample_parametrization(G, 3))
    with pytest.raises(DescendantInstrument):
        expand_correlation(G, std, "D", "Y")


@given(st.integers(2, 7), st.integers(0, 12), st.integers(0, 7), st.integers(0, 10**6))
def test_expansion_identity_on_random_models(n, nd, nb, seed):
    G = random_diagram(n, nd, nb, seed)
    std = standardize(G, sample_parametrization(G, seed))
    S = implied_covariance(G, std)
    for y in G.nodes:
        for z in G.non_descendants(y):
            exp = expand_correlation(G, std, z, y)
            assert exp.evaluate(G, std) == pytest.approx(S[z, y], abs=1e-10)


def test_covariance_model_validation():
    with pytest.raises(AsymmetryBeyondTolerance):
        CovarianceModel(("a", "b"), [[1.0, 0.2], [0.201, 1.0]])
    m = CovarianceModel(("a", "b"), [[1.0, 0.2], [0.2 + 1e-12, 1.0]])
    assert m.matrix[0, 1] == m.matrix[1, 0]
    with pytest.raises(NotPositiveDefinite):
        CovarianceModel(("a", "b"), [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NumericFailure):
        CovarianceModel(("a",), [[float("nan")]])
    with pytest.raises(ValueError):
        m.matrix[0, 0] = 3.0


def test_non_pd_error_covariance_is_numeric_failure():
    G = build_diagram(["A", "B"], [], [("A", "B")])
    with pytest.raises(NumericFailure):
        implied_covariance(G, Parametrization({}, np.array([[1.0, 2.0], [2.0, 1.0]])))


def test_every_unblocked_path_is_collider_free_given_nothing():
    G = fig2()
    for p in enumerate_unblocked_paths(G, "Z", "Y"):
        assert all(
            not (p.edges[k - 1].arrowhead_at(v) and p.edges[k].arrowhead_at(v))
            for k, v in enumerate(p.nodes[1:-1], start=1)
        )
