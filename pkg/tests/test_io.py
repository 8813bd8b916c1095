import numpy as np
import pytest
from hypothesis import given, strategies as st

from ivsets import fixtures as F
from ivsets.errors import AsymmetryBeyondTolerance, FormatError, NotPositiveDefinite, TooFewSamples
from ivsets.io import export_covariance, export_dataset, load_covariance, load_dataset
from ivsets.simulate import Dataset, sample_parametrization
from ivsets.wright import CovarianceModel, implied_covariance


def test_identity_loads_as_correlations():
    m = load_covariance("Z,X,Y\n1,0,0\n0,1,0\n0,0,1\n")
    assert m.variables == ("Z", "X", "Y")
    assert m.is_standardized()


def test_asymmetry_is_rejected():
    with pytest.raises(AsymmetryBeyondTolerance):
        load_covariance("a,b\n1,0.2\n0.201,1\n")


def test_small_asymmetry_is_symmetrized():
    m = load_covariance("a,b\n1,0.2\n0.200000000001,1\n")
    assert m.matrix[0, 1] == m.matrix[1, 0]


@pytest.mark.parametrize(
    "text",
    ["", "a,b\n1,0\n", "a,b\n1,0\n0\n", "a,b\n1,x\n0,1\n", "a,a\n1,0\n0,1\n", "a,\n1,0\n0,1\n"],
)
def test_malformed_input(text):
    with pytest.raises(FormatError):
        load_covariance(text)


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        load_covariance("a,b\n1,2\n2,1\n")


def test_reordering_to_requested_variables():
    m = load_covariance("a,b,c\n1,0.1,0.2\n0.1,2,0.3\n0.2,0.3,3\n", ["c", "a"])
    assert m.variables == ("c", "a")
    assert m.matrix.tolist() == [[3.0, 0.2], [0.2, 1.0]]
    with pytest.raises(FormatError):
        load_covariance("a,b\n1,0\n0,1\n", ["a", "q"])


def test_oracle_export_round_trips_bit_identically():
    G = F.mset()
    sigma = implied_covariance(G, sample_parametrization(G, 17))
    text = export_covariance(sigma)
    again = load_covariance(text)
    assert again.equals(sigma)
    assert export_covariance(again) == text


@given(st.integers(1, 6), st.integers(0, 10**6))
def test_round_trip_random_matrices(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n + 1)) * rng.uniform(1e-3, 1e3)
    S = A @ A.T
    m = CovarianceModel(tuple(f"v{i}" for i in range(n)), (S + S.T) / 2)
    assert load_covariance(export_covariance(m)).equals(m)


def test_dataset_round_trip():
    d = Dataset(("a", "b"), np.array([[0.1, -2.0], [1 / 3, 4e-9], [5.0, 6.0]]))
    again = load_dataset(export_dataset(d))
    assert again.variables == d.variables
    assert np.array_equal(again.data, d.data)
    with pytest.raises(TooFewSamples):
        load_dataset("a,b\n1,2\n")
    with pytest.raises(FormatError):
        load_dataset("a,b\n1,2\n3\n")
