"""Seeded draws of diagrams, parametrizations and Gaussian data.

All randomness flows through ``numpy.random.default_rng(seed)`` (PCG64),
so every draw is reproducible from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import CausalDiagram, Parametrization, build_diagram
from .errors import NotPositiveDefinite, NumericFailure, TooFewSamples
from .wright import CovarianceModel


@dataclass(frozen=True)
class ParamRanges:
    """Magnitude ranges for sampled parameters; signs are drawn uniformly."""

    coef_low: float = 0.1
    coef_high: float = 0.9
    loading_low: float = 0.2
    loading_high: float = 0.7
    var_low: float = 0.5
    var_high: float = 1.5


def _signed(rng: np.random.Generator, low: float, high: float) -> float:
    return float(rng.choice((-1.0, 1.0)) * rng.uniform(low, high))


def sample_parametrization(
    G: CausalDiagram, seed: int | np.random.Generator, ranges: ParamRanges = ParamRanges()
) -> Parametrization:
    """Coefficients in +-[coef_low, coef_high]; error covariance D + sum of rank-one terms.

    Each arc gets its own two-node loading vector, so off-diagonal entries
    appear exactly on the arcs and the result is positive definite.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    coefs = {e.id: _signed(rng, ranges.coef_low, ranges.coef_high) for e in G.directed}
    n = len(G)
    psi = np.diag(rng.uniform(ranges.var_low, ranges.var_high, size=n))
    for e in G.bidirected:
        i, j = G.index(e.a), G.index(e.b)
        li = _signed(rng, ranges.loading_low, ranges.loading_high)
        lj = _signed(rng, ranges.loading_low, ranges.loading_high)
        psi[i, i] += li * li
        psi[j, j] += lj * lj
        psi[i, j] += li * lj
        psi[j, i] += li * lj
    return Parametrization(coefs, psi)


def random_diagram(
    n_nodes: int,
    n_directed: int,
    n_bidirected: int,
    seed: int | np.random.Generator,
    prefix: str = "V",
) -> CausalDiagram:
    """Random recursive diagram; edge counts are capped by what the node count allows."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    nodes = [f"{prefix}{i}" for i in range(n_nodes)]
    pairs = [(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes)]
    nd = min(n_directed, len(pairs))
    nb = min(n_bidirected, len(pairs))
    d_idx = rng.choice(len(pairs), size=nd, replace=False) if nd else []
    b_idx = rng.choice(len(pairs), size=nb, replace=False) if nb else []
    directed = [(nodes[pairs[k][0]], nodes[pairs[k][1]]) for k in sorted(d_idx)]
    bidirected = [(nodes[pairs[k][0]], nodes[pairs[k][1]]) for k in sorted(b_idx)]
    return build_diagram(nodes, directed, bidirected)


@dataclass(frozen=True, eq=False)
class Dataset:
    variables: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] != len(self.variables):
            raise ValueError(f"data shape {data.shape} does not match {len(self.variables)} variables")
        if data.shape[0] < 2:
            raise TooFewSamples("a dataset needs at least 2 rows")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "data", data)

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]


def sample_data(cov: CovarianceModel, n: int, seed: int | np.random.Generator) -> Dataset:
    """``n`` zero-mean Gaussian rows with covariance ``cov``."""
    if n < 2:
        raise TooFewSamples("need n >= 2")
    try:
        L = np.linalg.cholesky(cov.matrix)
    except np.linalg.LinAlgError:
        raise NumericFailure("covariance is not positive definite") from None
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = rng.standard_normal((n, len(cov.variables)))
    return Dataset(cov.variables, draws @ L.T)


def estimate_covariance(d: Dataset, standardize: bool = True) -> CovarianceModel:
    """Sample covariance (n - 1 denominator), by default returned as correlations."""
    n, p = d.data.shape
    if n <= p:
        raise TooFewSamples(f"{n} samples for {p} variables")
    S = np.cov(d.data, rowvar=False, ddof=1).reshape(p, p)
    if np.any(np.diag(S) <= 0):
        bad = [v for v, s in zip(d.variables, np.diag(S)) if s <= 0]
        raise NotPositiveDefinite(f"constant column(s): {', '.join(bad)}")
    model = CovarianceModel(d.variables, (S + S.T) / 2)
    return model.standardized() if standardize else model
