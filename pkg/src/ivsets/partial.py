"""Partial correlations through the polynomial functions phi and psi.

``phi(1, 2, 3..n)`` is a polynomial in the correlations that is linear in
the correlations with variable 2.  ``psi(i, S)`` is the square root of a
polynomial with constant term 1.  Their ratio

    rho_{12.3..n} = phi(1, 2, 3..n) / (psi(1, 3..n) * psi(2, 3..n))

is the partial correlation.  Both are evaluated by recursion on the last
conditioning variable:

    phi^3(1,2,3)   = r12 - r13 r23
    psi^2(i1,i2)^2 = 1 - r_{i1 i2}^2
    phi^n(1..n)    = psi(n,3..n-1)^2 phi(1,2,3..n-1) - phi(1,n,3..n-1) phi(2,n,3..n-1)
    psi(i1..im)^2  = (psi(i1,i2..im-1) psi(im,i2..im-1))^2 - phi(i1,im,i2..im-1)^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonStandardized, NumericFailure, TooFewVariables
from .wright import CovarianceModel

STANDARDIZED_TOL = 1e-9


class _Recursion:
    """Memoized phi / psi^2 over a raw matrix of correlations.

    The matrix need not be positive definite: phi and psi^2 are
    polynomials, which is what makes indicator-basis extraction of the
    phi coefficients exact.
    """

    def __init__(self, R: np.ndarray):
        self.R = R
        self._phi: dict[tuple[int, ...], float] = {}
        self._psi_sq: dict[tuple[int, ...], float] = {}

    def phi(self, o: tuple[int, ...]) -> float:
        hit = self._phi.get(o)
        if hit is not None:
            return hit
        R = self.R
        n = len(o)
        if n == 2:
            val = R[o[0], o[1]]
        elif n == 3:
            val = R[o[0], o[1]] - R[o[0], o[2]] * R[o[1], o[2]]
        else:
            mid, last = o[2:-1], o[-1]
            val = (
                self.psi_sq((last, *mid)) * self.phi((o[0], o[1], *mid))
                - self.phi((o[0], last, *mid)) * self.phi((o[1], last, *mid))
            )
        self._phi[o] = val
        return val

    def psi_sq(self, o: tuple[int, ...]) -> float:
        hit = self._psi_sq.get(o)
        if hit is not None:
            return hit
        m = len(o)
        if m == 1:
            val = 1.0
        elif m == 2:
            val = 1.0 - self.R[o[0], o[1]] ** 2
        else:
            first, mid, last = o[0], o[1:-1], o[-1]
            val = (
                self.psi_sq((first, *mid)) * self.psi_sq((last, *mid))
                - self.phi((first, last, *mid)) ** 2
            )
        self._psi_sq[o] = val
        return val


def _indices(corr: CovarianceModel, ordering: Sequence[str], minimum: int) -> tuple[int, ...]:
    if len(ordering) < minimum:
        raise TooFewVariables(f"need at least {minimum} variables, got {len(ordering)}")
    if len(set(ordering)) != len(ordering):
        raise ValueError(f"ordering repeats a variable: {list(ordering)}")
    if not corr.is_standardized(STANDARDIZED_TOL):
        raise NonStandardized("phi/psi are defined on correlation matrices")
    return tuple(corr.index(v) for v in ordering)


def phi(corr: CovarianceModel, ordering: Sequence[str]) -> float:
    """phi(1, 2, 3..n) for ``ordering = (v1, v2, v3, ..., vn)``, n >= 3."""
    idx = _indices(corr, ordering, 3)
    return _Recursion(corr.matrix).phi(idx)


def psi(corr: CovarianceModel, ordering: Sequence[str]) -> float:
    """psi(i1, ..., im), m >= 2.  Non-negative root; negative radicand is an error."""
    idx = _indices(corr, ordering, 2)
    sq = _Recursion(corr.matrix).psi_sq(idx)
    if sq < 0:
        raise NumericFailure(f"psi radicand {sq:.3g} < 0: correlation matrix not positive definite")
    return math.sqrt(sq)


def partial_correlation(corr: CovarianceModel, a: str, b: str, cond: Sequence[str] = ()) -> float:
    """rho_{ab.cond} as phi(a, b, cond) / (psi(a, cond) psi(b, cond))."""
    cond = tuple(cond)
    if a == b:
        raise ValueError("a and b must differ")
    if a in cond or b in cond:
        raise ValueError("a and b may not be conditioned on")
    if not cond:
        _indices(corr, (a, b), 2)
        return corr[a, b]
    idx = _indices(corr, (a, b, *cond), 3)
    rec = _Recursion(corr.matrix)
    ia, ib, rest = idx[0], idx[1], idx[2:]
    sq_a, sq_b = rec.psi_sq((ia, *rest)), rec.psi_sq((ib, *rest))
    if sq_a < 0 or sq_b < 0:
        raise NumericFailure("negative psi radicand: correlation matrix not positive definite")
    denom = math.sqrt(sq_a) * math.sqrt(sq_b)
    if denom < 1e-14:
        raise NumericFailure(f"degenerate conditioning set {list(cond)} for ({a}, {b})")
    return rec.phi(idx) / denom


@dataclass(frozen=True)
class PhiEvaluation:
    """phi(z, y, W) together with its coefficients on rho(z, y), rho(w_1, y), ..."""

    value: float
    b_coefficients: tuple[float, ...]


def extract_b_coefficients(corr_without_y: CovarianceModel, z: str, W: Sequence[str]) -> list[float]:
    """Coefficients b_0..b_k with phi(z, Y, W) = b_0 rho(z,Y) + sum_j b_j rho(w_j, Y).

    Only correlations among ``z`` and ``W`` are read.  Each b_j is phi
    evaluated with the Y-correlations set to the j-th indicator vector,
    which is exact because phi is linear in them with no constant term.
    """
    W = tuple(W)
    if not W:
        return [1.0]
    group = (z, *W)
    if len(set(group)) != len(group):
        raise ValueError("instrument and conditioning variables must be distinct")
    if not corr_without_y.is_standardized(STANDARDIZED_TOL):
        raise NonStandardized("b coefficients need correlations")
    sub = corr_without_y.restricted(group).matrix
    k = len(group)
    # slot 0 is z, slot 1 the placeholder Y, slots 2.. the conditioning set
    R = np.eye(k + 1)
    perm = [0, *range(2, k + 1)]
    R[np.ix_(perm, perm)] = sub
    order = tuple(range(k + 1))
    out = []
    for j in range(k):
        Rj = R.copy()
        Rj[1, :] = 0.0
        Rj[:, 1] = 0.0
        Rj[1, 1] = 1.0
        Rj[1, perm[j]] = Rj[perm[j], 1] = 1.0
        val = _Recursion(Rj).phi(order)
        if not math.isfinite(val):
            raise NumericFailure("non-finite b coefficient")
        out.append(val)
    return out


def evaluate_phi(corr: CovarianceModel, z: str, y: str, W: Sequence[str]) -> PhiEvaluation:
    """phi(z, y, W) and its b coefficients from one correlation matrix."""
    W = tuple(W)
    value = corr[z, y] if not W else phi(corr, (z, y, *W))
    b = extract_b_coefficients(corr, z, W)
    return PhiEvaluation(float(value), tuple(b))
