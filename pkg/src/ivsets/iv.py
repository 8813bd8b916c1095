"""Instrumental-variable criteria and the linear system that identifies direct effects.

Workflow for a set of causes ``X`` of ``y``:

1. :func:`find_instrumental_set` searches for triples (instrument,
   conditioning set, path) that pass :func:`check_instrumental_set`.
2. :func:`build_phi_system` turns the triples and a correlation matrix
   into an n x n linear system over the coefficients of ``x -> y``.
3. :func:`solve_identification` solves it, refusing near-singular systems.

:func:`identify_effects` runs all three and reports a status per edge.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .diagram import CausalDiagram, DirectedEdge, Parametrization
from .errors import (
    BudgetExceeded,
    MissingEdge,
    NearSingular,
    NormalizationFailed,
    NumericFailure,
    UnknownNode,
)
from .partial import evaluate_phi
from .paths import DEFAULT_PATH_CAP, Path, d_separates, enumerate_unblocked_paths, is_blocked, points_to, subpath
from .wright import CovarianceModel, expand_correlation, implied_covariance

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_W = 3
DEFAULT_BUDGET = 200_000

IDENTIFIED = "IDENTIFIED"
NOT_FOUND = "NOT-FOUND"
NEAR_SINGULAR = "NEAR-SINGULAR"


def _target_edge(G: CausalDiagram, x: str, y: str) -> DirectedEdge:
    G.index(x)
    G.index(y)
    e = G.directed_edge(x, y)
    if e is None:
        raise MissingEdge(f"no edge {x}->{y}")
    return e


# -- single conditional instrument ---------------------------------------------


def check_conditional_iv(G: CausalDiagram, z: str, W: Iterable[str], x: str, y: str) -> bool:
    """Graphical conditional-IV test for the edge ``x -> y``.

    Holds when W has no descendants of y, W d-separates z from y once
    ``x -> y`` is removed, and W does not d-separate z from x there.
    """
    e = _target_edge(G, x, y)
    W = frozenset(W)
    G.index(z)
    for w in W:
        G.index(w)
    if z in W or z in (x, y) or x in W:
        return False
    if W & G.descendants(y):
        return False
    Gc = G.delete_edges([e.id])
    return d_separates(Gc, W, z, y) and not d_separates(Gc, W, z, x)


def find_conditional_iv(
    G: CausalDiagram, x: str, y: str, max_w: int = DEFAULT_MAX_W
) -> tuple[str, tuple[str, ...]] | None:
    """First (z, W) passing :func:`check_conditional_iv`, in node order then |W|."""
    _target_edge(G, x, y)
    pool = G.non_descendants(y)
    for z in G.nodes:
        others = [v for v in pool if v != z]
        for size in range(max_w + 1):
            for W in itertools.combinations(others, size):
                if check_conditional_iv(G, z, W, x, y):
                    return z, W
    return None


def partial_covariance(cov: CovarianceModel, a: str, b: str, W: Sequence[str]) -> float:
    """sigma_{ab.W} via the Schur complement."""
    if not W:
        return cov[a, b]
    ia, ib = cov.index(a), cov.index(b)
    iw = [cov.index(w) for w in W]
    S = cov.matrix
    S_ww = S[np.ix_(iw, iw)]
    coef = np.linalg.solve(S_ww, S[iw, ib])
    return float(S[ia, ib] - S[ia, iw] @ coef)


def conditional_iv_estimate(cov: CovarianceModel, z: str, W: Sequence[str], x: str, y: str) -> float:
    """sigma_{zy.W} / sigma_{zx.W}, on the scale of ``cov``."""
    W = tuple(W)
    num = partial_covariance(cov, z, y, W)
    den = partial_covariance(cov, z, x, W)
    scale = math.sqrt(partial_covariance(cov, z, z, W) * partial_covariance(cov, x, x, W))
    if abs(den) <= 1e-12 * max(scale, 1e-300):
        raise NumericFailure(f"sigma_{{{z}{x}.W}} vanishes; {z} carries no signal about {x}")
    return num / den


# -- instrumental sets ---------------------------------------------------------


@dataclass(frozen=True)
class IvTriple:
    instrument: str
    conditioning: tuple[str, ...]
    path: Path

    def __post_init__(self) -> None:
        object.__setattr__(self, "conditioning", tuple(self.conditioning))
        if self.path.start != self.instrument:
            raise ValueError(f"path {self.path} does not start at {self.instrument}")
        if not self.path.edges:
            raise ValueError("path must contain at least one edge")

    @property
    def target(self) -> str:
        """Tail of the final edge, i.e. the cause this triple instruments."""
        last = self.path.edges[-1]
        return last.tail if isinstance(last, DirectedEdge) else last.a

    def describe(self) -> str:
        w = "{" + ", ".join(self.conditioning) + "}"
        return f"({self.instrument}, {w}, {self.path})"

    def to_json(self) -> dict:
        return {
            "instrument": self.instrument,
            "conditioning": list(self.conditioning),
            "path": str(self.path),
        }


def _points_in(p_i: Path, p_j: Path, v: str) -> bool:
    return points_to(p_i, v, "end") and points_to(p_j, v, "start")


def instrumental_set_violations(
    G: CausalDiagram, triples: Sequence[IvTriple], X_targets: Sequence[str], y: str
) -> list[str]:
    """Reasons the triples fail to form an instrumental set (empty when they pass).

    With two or more triples each path must be unblocked given the empty
    set.  A lone triple only needs its path unblocked given its own W,
    which makes the one-triple case coincide with the conditional-IV
    criterion (colliders opened by W are allowed).
    """
    edges = [_target_edge(G, x, y) for x in X_targets]
    problems: list[str] = []
    single = len(triples) == 1
    if len(triples) != len(X_targets):
        return [f"{len(triples)} triples for {len(X_targets)} targets"]
    if len(set(X_targets)) != len(X_targets):
        return ["repeated target"]
    desc_y = G.descendants(y)

    for i, (t, e) in enumerate(zip(triples, edges)):
        p = t.path
        tag = f"triple {i + 1}"
        for v in (t.instrument, *t.conditioning):
            G.index(v)
        if p.end != y or p.edges[-1].id != e.id:
            problems.append(f"{tag}: path {p} does not end with {e.id}")
            continue
        if t.instrument in desc_y:
            problems.append(f"{tag}: instrument {t.instrument} descends from {y}")
        bad_w = [w for w in t.conditioning if w in desc_y]
        if bad_w:
            problems.append(f"{tag}: conditioning {bad_w} descends from {y}")
        if t.instrument in t.conditioning:
            problems.append(f"{tag}: instrument inside its own conditioning set")
        if is_blocked(p, t.conditioning if single else (), G):
            problems.append(f"{tag}: path {p} is blocked")
    if problems:
        return problems

    G_bar = G.delete_edges(e.id for e in edges)
    for i, t in enumerate(triples):
        tag = f"triple {i + 1}"
        if not d_separates(G_bar, t.conditioning, t.instrument, y):
            problems.append(f"{tag}: W does not d-separate {t.instrument} from {y} with the targets removed")
        if is_blocked(t.path, t.conditioning, G):
            problems.append(f"{tag}: W blocks {t.path}")

    for i, j in itertools.combinations(range(len(triples)), 2):
        p_i, p_j = triples[i].path, triples[j].path
        if triples[j].instrument in p_i:
            problems.append(f"triples {i + 1},{j + 1}: instrument {triples[j].instrument} lies on {p_i}")
            continue
        for v in sorted(set(p_i.nodes) & set(p_j.nodes) - {y}, key=G.index):
            if not _points_in(p_i, p_j, v):
                problems.append(f"triples {i + 1},{j + 1}: shared {v} is not pointed to by both paths")
    return problems


def check_instrumental_set(
    G: CausalDiagram, triples: Sequence[IvTriple], X_targets: Sequence[str], y: str
) -> bool:
    return not instrumental_set_violations(G, triples, X_targets, y)


def _is_directed_back(p: Path, k: int) -> bool:
    """Whether p[start ~ nodes[k]] is a directed path from nodes[k] to the start."""
    for m in range(k):
        e = p.edges[m]
        if not isinstance(e, DirectedEdge) or e.head != p.nodes[m]:
            return False
    return True


def normalize_triples(G: CausalDiagram, triples: Sequence[IvTriple], y: str) -> list[IvTriple]:
    """Make paths pairwise disjoint apart from y and earlier instruments.

    While p_i and a later p_j share a node V other than Z_i and y, take
    the shared V nearest to X_i on p_i and replace triple i by
    (V, W_i, p_i[V ~ y]).
    """
    out = list(triples)
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(out)), 2):
            t = out[i]
            p_i = t.path
            shared = (set(p_i.nodes) & set(out[j].path.nodes)) - {t.instrument, y}
            if not shared:
                continue
            v = max(shared, key=p_i.position)
            k = p_i.position(v)
            if not points_to(p_i, v, "end") or not _is_directed_back(p_i, k):
                raise NormalizationFailed(
                    f"paths {p_i} and {out[j].path} share {v} without the required orientation"
                )
            if v in t.conditioning:
                raise NormalizationFailed(f"{v} is conditioned on while lying on {p_i}")
            out[i] = IvTriple(v, t.conditioning, subpath(p_i, v, y))
            changed = True
            break
    targets = [t.target for t in out]
    problems = instrumental_set_violations(G, out, targets, y)
    if problems:
        raise NormalizationFailed("; ".join(problems))
    return out


def _pair_ok(earlier: IvTriple, later: IvTriple, y: str) -> bool:
    if later.instrument in earlier.path:
        return False
    for v in set(earlier.path.nodes) & set(later.path.nodes) - {y}:
        if not _points_in(earlier.path, later.path, v):
            return False
    return True


def candidate_triples(
    G: CausalDiagram,
    x: str,
    y: str,
    G_bar: CausalDiagram,
    max_w: int = DEFAULT_MAX_W,
    path_cap: int = DEFAULT_PATH_CAP,
    _path_cache: dict | None = None,
    single: bool = False,
) -> list[IvTriple]:
    """Every triple for ``x -> y`` passing the single-triple conditions, in search order.

    ``single`` selects the lone-triple reading, where the path only has to
    be unblocked given W.
    """
    e = _target_edge(G, x, y)
    pool = G.non_descendants(y)
    cache = _path_cache if _path_cache is not None else {}
    out = []
    for z in pool:
        if not single:
            if z not in cache:
                cache[z] = enumerate_unblocked_paths(G, z, y, (), path_cap)
            base = [p for p in cache[z] if p.edges[-1].id == e.id]
            if not base:
                continue
        others = [v for v in pool if v != z]
        for size in range(max_w + 1):
            for W in itertools.combinations(others, size):
                if not d_separates(G_bar, W, z, y):
                    continue
                if single:
                    paths = [
                        p for p in enumerate_unblocked_paths(G, z, y, W, path_cap)
                        if p.edges[-1].id == e.id
                    ]
                    # collider-free paths first, so the strict reading wins when it applies
                    paths.sort(key=lambda p: is_blocked(p, (), G))
                else:
                    # an unblocked path has no colliders, so W blocks it iff W meets it
                    paths = [p for p in base if not set(W) & set(p.intermediates)]
                out.extend(IvTriple(z, W, p) for p in paths)
    return out


def find_instrumental_set(
    G: CausalDiagram,
    X_targets: Sequence[str],
    y: str,
    budget: int = DEFAULT_BUDGET,
    max_w: int = DEFAULT_MAX_W,
    path_cap: int = DEFAULT_PATH_CAP,
) -> list[IvTriple] | None:
    """Deterministic search for an instrumental set relative to ``X_targets`` and ``y``.

    Returns normalized triples (their order fixes which triple is "earlier"),
    or None if the bounded search space holds no set.  Raises BudgetExceeded
    when ``budget`` candidate placements are tried without a verdict.
    """
    edges = [_target_edge(G, x, y) for x in X_targets]
    if not X_targets or len(set(X_targets)) != len(X_targets):
        raise ValueError("targets must be a non-empty list of distinct causes")
    G_bar = G.delete_edges(e.id for e in edges)
    cache: dict = {}
    single = len(X_targets) == 1
    cands = {x: candidate_triples(G, x, y, G_bar, max_w, path_cap, cache, single) for x in X_targets}
    if any(not c for c in cands.values()):
        return None

    steps = 0
    n = len(X_targets)
    for order in itertools.permutations(X_targets):
        chosen: list[IvTriple] = []

        def place(k: int) -> list[IvTriple] | None:
            nonlocal steps
            if k == n:
                try:
                    return normalize_triples(G, chosen, y)
                except NormalizationFailed as exc:
                    log.debug("candidate set rejected after normalization: %s", exc)
                    return None
            for c in cands[order[k]]:
                steps += 1
                if steps > budget:
                    raise BudgetExceeded(f"no verdict within {budget} candidate placements")
                if all(_pair_ok(prev, c, y) for prev in chosen):
                    chosen.append(c)
                    found = place(k + 1)
                    if found is not None:
                        return found
                    chosen.pop()
            return None

        found = place(0)
        if found is not None:
            return found
    return None


# -- the linear system ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhiSystem:
    q_matrix: np.ndarray
    rhs: np.ndarray
    lambda_index: tuple[str, ...]
    det_q: float
    triples: tuple[IvTriple, ...] = field(default=())


def _check_targets(triples: Sequence[IvTriple], X_targets: Sequence[str]) -> list[str]:
    targets = [t.target for t in triples]
    if sorted(targets) != sorted(X_targets):
        raise ValueError(f"triples instrument {targets}, not {list(X_targets)}")
    return targets


def build_phi_system(
    G: CausalDiagram,
    triples: Sequence[IvTriple],
    X_targets: Sequence[str],
    y: str,
    corr: CovarianceModel,
) -> PhiSystem:
    """Row i: phi(Z_i, y, W_i) = sum_l q_il lambda_l, with q_il = sum_j b_ij rho(V_j, X_l).

    Columns follow the triples' targets; ``corr`` is standardized on entry.
    """
    targets = _check_targets(triples, X_targets)
    if not corr.is_standardized(1e-12):
        corr = corr.standardized()
    for v in G.nodes:
        if v not in corr and any(v == t.instrument or v in t.conditioning or v in (y, t.target) for t in triples):
            raise UnknownNode(f"{v!r} missing from the correlation matrix")
    n = len(triples)
    Q = np.empty((n, n))
    rhs = np.empty(n)
    for i, t in enumerate(triples):
        ev = evaluate_phi(corr, t.instrument, y, t.conditioning)
        rhs[i] = ev.value
        vs = (t.instrument, *t.conditioning)
        for l, x in enumerate(targets):
            Q[i, l] = math.fsum(b * corr[v, x] for b, v in zip(ev.b_coefficients, vs))
    if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(rhs))):
        raise NumericFailure("non-finite entries in the linear system")
    det = float(np.linalg.det(Q))
    lambda_index = tuple(f"{x}->{y}" for x in targets)
    return PhiSystem(Q, rhs, lambda_index, det, tuple(triples))


def solve_identification(system: PhiSystem, tol: float = DEFAULT_TOL) -> dict[str, float]:
    """Solve Q lambda = rhs; NearSingular when |det Q| < tol * max(1, ||Q||_F)."""
    Q = system.q_matrix
    threshold = tol * max(1.0, float(np.linalg.norm(Q)))
    if abs(system.det_q) < threshold:
        raise NearSingular(
            f"|det Q| = {abs(system.det_q):.3g} below {threshold:.3g}", det_q=system.det_q
        )
    lam = np.linalg.solve(Q, system.rhs)
    return {eid: float(v) for eid, v in zip(system.lambda_index, lam)}


def inc_coefficient_rows(
    G: CausalDiagram,
    triples: Sequence[IvTriple],
    y: str,
    theta_std: Parametrization,
    path_cap: int = DEFAULT_PATH_CAP,
) -> list[dict[str, float]]:
    """q_il for every edge l of Inc(y), from path sums under a known parametrization.

    Diagnostic for the structure of the system: columns of edges outside
    the targets should vanish, target columns should match
    :func:`build_phi_system`.
    """
    corr = implied_covariance(G, theta_std).standardized()
    rows = []
    for t in triples:
        ev = evaluate_phi(corr, t.instrument, y, t.conditioning)
        vs = (t.instrument, *t.conditioning)
        expansions = [expand_correlation(G, theta_std, v, y, path_cap).coefficients for v in vs]
        row = {}
        for e in G.inc_set(y):
            row[e.id] = math.fsum(b * a[e.id] for b, a in zip(ev.b_coefficients, expansions))
        rows.append(row)
    return rows


# -- end-to-end ----------------------------------------------------------------


@dataclass(frozen=True)
class EdgeResult:
    status: str
    value: float | None = None
    value_original_scale: float | None = None
    triples: tuple[IvTriple, ...] | None = None
    det_q: float | None = None
    note: str | None = None

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.value is not None:
            out["value"] = self.value
        if self.value_original_scale is not None:
            out["value_original_scale"] = self.value_original_scale
        if self.triples is not None:
            out["triples"] = [t.to_json() for t in self.triples]
        if self.det_q is not None:
            out["det_q"] = self.det_q
        if self.note:
            out["note"] = self.note
        return out


def identify_effects(
    G: CausalDiagram,
    X_targets: Sequence[str],
    y: str,
    cov: CovarianceModel,
    *,
    tol: float = DEFAULT_TOL,
    max_w: int = DEFAULT_MAX_W,
    path_cap: int = DEFAULT_PATH_CAP,
    budget: int = DEFAULT_BUDGET,
) -> dict[str, EdgeResult]:
    """Status of each ``x -> y`` edge: IDENTIFIED, NOT-FOUND or NEAR-SINGULAR.

    Tries the whole target list first, then smaller subsets, so edges that
    can be identified are reported even when others cannot.  NOT-FOUND only
    means the bounded search found no instrumental set.
    """
    for x in X_targets:
        _target_edge(G, x, y)
    corr = cov.standardized()
    original = not cov.is_standardized(1e-12)
    results: dict[str, EdgeResult] = {}
    remaining = list(dict.fromkeys(X_targets))
    budget_hit = False

    while remaining:
        hit = None
        for size in range(len(remaining), 0, -1):
            for subset in itertools.combinations(remaining, size):
                try:
                    triples = find_instrumental_set(G, list(subset), y, budget, max_w, path_cap)
                except BudgetExceeded:
                    budget_hit = True
                    continue
                if triples is not None:
                    hit = triples
                    break
            if hit is not None:
                break
        if hit is None:
            note = "search budget exhausted" if budget_hit else "no instrumental set within search bounds"
            for x in remaining:
                results[f"{x}->{y}"] = EdgeResult(NOT_FOUND, note=note)
            break

        targets = [t.target for t in hit]
        system = build_phi_system(G, hit, targets, y, corr)
        try:
            values = solve_identification(system, tol)
        except NearSingular:
            for eid in system.lambda_index:
                results[eid] = EdgeResult(NEAR_SINGULAR, triples=tuple(hit), det_q=system.det_q)
        else:
            for x, (eid, v) in zip(targets, values.items()):
                orig = v * cov.sd(y) / cov.sd(x) if original else None
                results[eid] = EdgeResult(IDENTIFIED, v, orig, tuple(hit), system.det_q)
        remaining = [x for x in remaining if x not in targets]

    return {f"{x}->{y}": results[f"{x}->{y}"] for x in dict.fromkeys(X_targets)}
