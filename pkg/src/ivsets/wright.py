"""Linear SEM algebra: implied covariance, standardization and path sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .diagram import CausalDiagram, DirectedEdge, Parametrization
from .errors import (
    AsymmetryBeyondTolerance,
    DescendantInstrument,
    MissingParameter,
    NotPositiveDefinite,
    NumericFailure,
    UnknownNode,
)
from .paths import DEFAULT_PATH_CAP, Path, enumerate_unblocked_paths

SYMMETRY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Symmetric positive-definite matrix over named variables.

    Construction symmetrizes exactly, after rejecting asymmetry beyond
    ``SYMMETRY_TOL`` (relative to the largest entry).
    """

    variables: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        variables = tuple(self.variables)
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(variables):
            raise ValueError(f"matrix shape {m.shape} does not match {len(variables)} variables")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        if not np.all(np.isfinite(m)):
            raise NumericFailure("matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL * scale:
            raise AsymmetryBeyondTolerance(
                f"matrix asymmetric by {np.max(np.abs(m - m.T)):.3g}"
            )
        m = (m + m.T) / 2
        if m.size:
            if np.any(np.diag(m) <= 0):
                raise NotPositiveDefinite("non-positive variance on the diagonal")
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise NotPositiveDefinite("matrix is not positive definite") from None
        m.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(variables)})

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownNode(f"variable {v!r} not in covariance model") from None

    def __contains__(self, v: object) -> bool:
        return v in self._index

    def __getitem__(self, pair: tuple[str, str]) -> float:
        a, b = pair
        return float(self.matrix[self.index(a), self.index(b)])

    def sd(self, v: str) -> float:
        return math.sqrt(self[v, v])

    def is_standardized(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.diag(self.matrix) - 1.0) <= tol))

    def standardized(self) -> CovarianceModel:
        """Correlation matrix with an exact unit diagonal."""
        d = np.sqrt(np.diag(self.matrix))
        r = self.matrix / np.outer(d, d)
        np.fill_diagonal(r, 1.0)
        return CovarianceModel(self.variables, r)

    def restricted(self, variables: Sequence[str]) -> CovarianceModel:
        idx = [self.index(v) for v in variables]
        return CovarianceModel(tuple(variables), self.matrix[np.ix_(idx, idx)])

    def equals(self, other: CovarianceModel) -> bool:
        """Bit-exact equality of names and entries."""
        return self.variables == other.variables and np.array_equal(self.matrix, other.matrix)


def total_effects(G: CausalDiagram, theta: Parametrization) -> np.ndarray:
    """(I - C)^-1; entry (j, i) sums directed-path products from i to j."""
    C = theta.coefficient_matrix(G)
    n = len(G)
    return np.linalg.solve(np.eye(n) - C, np.eye(n))


def implied_covariance(G: CausalDiagram, theta: Parametrization) -> CovarianceModel:
    """Sigma(theta) = (I - C)^-1 Psi (I - C)^-T over the diagram's nodes."""
    theta.check(G)
    psi = theta.error_cov
    if len(G):
        try:
            np.linalg.cholesky(psi)
        except np.linalg.LinAlgError:
            raise NumericFailure("error covariance is not positive definite") from None
    B = total_effects(G, theta)
    sigma = B @ psi @ B.T
    sigma = (sigma + sigma.T) / 2
    try:
        return CovarianceModel(G.nodes, sigma)
    except NotPositiveDefinite as exc:
        raise NumericFailure(str(exc)) from None


def standardize(G: CausalDiagram, theta: Parametrization) -> Parametrization:
    """Rescale so every variable has unit variance.

    Coefficient on i->j is multiplied by sd_i/sd_j; error covariances are
    divided by sd_i*sd_j.
    """
    sigma = implied_covariance(G, theta)
    sd = np.sqrt(np.diag(sigma.matrix))
    coefs = {}
    for e in G.directed:
        i, j = G.index(e.tail), G.index(e.head)
        coefs[e.id] = float(theta.coefficients[e.id] * sd[i] / sd[j])
    psi = theta.error_cov / np.outer(sd, sd)
    return Parametrization(coefs, (psi + psi.T) / 2)


def path_term(G: CausalDiagram, p: Path, theta: Parametrization) -> float:
    """Product of edge parameters along ``p``; arcs contribute their error covariance."""
    term = 1.0
    for e in p.edges:
        if isinstance(e, DirectedEdge):
            try:
                term *= theta.coefficients[e.id]
            except KeyError:
                raise MissingParameter(f"no coefficient for {e.id}") from None
        else:
            try:
                term *= float(theta.error_cov[G.index(e.a), G.index(e.b)])
            except IndexError:
                raise MissingParameter(f"no error covariance for {e.id}") from None
    return term


def wright_correlation(
    G: CausalDiagram,
    theta_std: Parametrization,
    a: str,
    b: str,
    cap: int = DEFAULT_PATH_CAP,
) -> float:
    """Correlation of ``a`` and ``b`` as the sum of path terms over unblocked paths.

    ``theta_std`` must already be standardized.
    """
    G.index(a)
    G.index(b)
    if a == b:
        return 1.0
    return math.fsum(path_term(G, p, theta_std) for p in enumerate_unblocked_paths(G, a, b, (), cap))


@dataclass(frozen=True)
class LinearExpansion:
    """rho(z, y) written as sum_l coefficients[l] * lambda_l over Inc(y)."""

    target_pair: tuple[str, str]
    coefficients: Mapping[str, float]

    def evaluate(self, G: CausalDiagram, theta: Parametrization) -> float:
        return math.fsum(a * theta.value(G, eid) for eid, a in self.coefficients.items())


def expand_correlation(
    G: CausalDiagram,
    theta_std: Parametrization,
    z: str,
    y: str,
    cap: int = DEFAULT_PATH_CAP,
) -> LinearExpansion:
    """Split Wright's equation for (z, y) by the Inc(y) edge each path ends with.

    The coefficient of an edge is the summed term of the unblocked paths
    ending in that edge, with the edge's own parameter left out.  For a
    directed edge x->y this equals rho(z, x); for an arc x<->y it is the
    standardized total effect of x on z.
    """
    if z in G.descendants(y):
        raise DescendantInstrument(f"{z!r} is a descendant of {y!r}")
    inc = G.inc_set(y)
    coefs = {e.id: 0.0 for e in inc}
    parts: dict[str, list[float]] = {e.id: [] for e in inc}
    for p in enumerate_unblocked_paths(G, z, y, (), cap):
        last = p.edges[-1]
        if last.id not in parts:
            raise AssertionError(f"unblocked path {p} enters {y} outside Inc({y})")
        parts[last.id].append(path_term(G, p.without_last_edge(), theta_std))
    for eid, terms in parts.items():
        coefs[eid] = math.fsum(terms)
    return LinearExpansion((z, y), coefs)


def correlations_from(cov: CovarianceModel | np.ndarray, variables: Iterable[str] | None = None) -> CovarianceModel:
    """Coerce to a standardized CovarianceModel."""
    if isinstance(cov, CovarianceModel):
        return cov if cov.is_standardized(0.0) else cov.standardized()
    return CovarianceModel(tuple(variables or ()), cov).standardized()
