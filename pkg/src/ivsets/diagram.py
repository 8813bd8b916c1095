"""Mixed-graph data model for recursive linear causal diagrams.

A diagram holds directed edges (direct effects) and bidirected edges
(correlated errors).  Node declaration order doubles as the recursive
order: every directed edge must point forward in it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateEdge,
    DuplicateNode,
    InvalidEdge,
    NonConformingParametrization,
    OrderViolation,
    UnknownEdge,
    UnknownNode,
)


@dataclass(frozen=True)
class DirectedEdge:
    tail: str
    head: str
    label: str | None = None

    kind = "directed"

    @property
    def id(self) -> str:
        return f"{self.tail}->{self.head}"

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.tail, self.head)

    def other(self, v: str) -> str:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise UnknownNode(f"{v!r} is not an endpoint of {self.id}")

    def arrowhead_at(self, v: str) -> bool:
        if v not in self.endpoints:
            raise UnknownNode(f"{v!r} is not an endpoint of {self.id}")
        return v == self.head

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class BidirectedEdge:
    """Correlated-error arc.  ``a`` precedes ``b`` in the diagram's node order."""

    a: str
    b: str

    kind = "bidirected"

    @property
    def id(self) -> str:
        return f"{self.a}<->{self.b}"

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.a, self.b)

    def other(self, v: str) -> str:
        if v == self.a:
            return self.b
        if v == self.b:
            return self.a
        raise UnknownNode(f"{v!r} is not an endpoint of {self.id}")

    def arrowhead_at(self, v: str) -> bool:
        if v not in self.endpoints:
            raise UnknownNode(f"{v!r} is not an endpoint of {self.id}")
        return True

    def __str__(self) -> str:
        return self.id


Edge = DirectedEdge | BidirectedEdge


@dataclass(frozen=True)
class CausalDiagram:
    """Immutable validated mixed graph.  Build with :func:`build_diagram`."""

    nodes: tuple[str, ...]
    directed: tuple[DirectedEdge, ...] = ()
    bidirected: tuple[BidirectedEdge, ...] = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _edges: dict = field(init=False, repr=False, compare=False, hash=False)
    _incident: dict = field(init=False, repr=False, compare=False, hash=False)
    _children: dict = field(init=False, repr=False, compare=False, hash=False)
    _desc_cache: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            dup = next(n for n in self.nodes if self.nodes.count(n) > 1)
            raise DuplicateNode(f"node {dup!r} declared twice")
        index = {n: i for i, n in enumerate(self.nodes)}
        edges: dict[str, Edge] = {}
        incident: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        children: dict[str, list[str]] = {n: [] for n in self.nodes}

        for e in self.directed:
            for v in e.endpoints:
                if v not in index:
                    raise UnknownNode(f"edge {e.id} references undeclared node {v!r}")
            if e.tail == e.head:
                raise CycleDetected(f"self-loop {e.id}")
            if e.id in edges:
                raise DuplicateEdge(f"directed edge {e.id} declared twice")
            edges[e.id] = e
            children[e.tail].append(e.head)
        for e in self.bidirected:
            for v in e.endpoints:
                if v not in index:
                    raise UnknownNode(f"arc {e.id} references undeclared node {v!r}")
            if e.a == e.b:
                raise InvalidEdge(f"bidirected self-loop at {e.a!r}")
            if index[e.a] > index[e.b]:
                raise InvalidEdge(f"arc {e.id} endpoints not in node order")
            if e.id in edges:
                raise DuplicateEdge(f"arc {e.id} declared twice")
            edges[e.id] = e

        _check_acyclic(self.nodes, children)
        for e in self.directed:
            if index[e.tail] > index[e.head]:
                raise OrderViolation(
                    f"edge {e.id} points backwards in the declared node order"
                )

        for e in (*self.directed, *self.bidirected):
            incident[e.endpoints[0]].append(e)
            incident[e.endpoints[1]].append(e)

        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_incident", {k: tuple(v) for k, v in incident.items()})
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})
        object.__setattr__(self, "_desc_cache", {})

    # -- lookups ---------------------------------------------------------------

    def __contains__(self, v: object) -> bool:
        return v in self._index

    def __len__(self) -> int:
        return len(self.nodes)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownNode(f"unknown node {v!r}") from None

    @property
    def edges(self) -> tuple[Edge, ...]:
        return (*self.directed, *self.bidirected)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[edge_id]
        except KeyError:
            raise UnknownEdge(f"unknown edge {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edges

    def edge_order(self, edge_id: str) -> int:
        """Position of an edge in the canonical edge listing (directed first)."""
        for i, e in enumerate(self.edges):
            if e.id == edge_id:
                return i
        raise UnknownEdge(f"unknown edge {edge_id!r}")

    def incident(self, v: str) -> tuple[Edge, ...]:
        self.index(v)
        return self._incident[v]

    def children(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return self._children[v]

    def parents(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return tuple(e.tail for e in self.directed if e.head == v)

    def directed_edge(self, tail: str, head: str) -> DirectedEdge | None:
        e = self._edges.get(f"{tail}->{head}")
        return e if isinstance(e, DirectedEdge) else None

    # -- structural queries ----------------------------------------------------

    def descendants(self, v: str) -> frozenset[str]:
        """Nodes reachable from ``v`` along directed edges, ``v`` included."""
        self.index(v)
        cached = self._desc_cache.get(v)
        if cached is not None:
            return cached
        seen = {v}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in self._children[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        result = frozenset(seen)
        self._desc_cache[v] = result
        return result

    def non_descendants(self, v: str) -> tuple[str, ...]:
        desc = self.descendants(v)
        return tuple(n for n in self.nodes if n not in desc)

    def ancestral_closure(self, vs: Iterable[str]) -> frozenset[str]:
        """All nodes having a descendant in ``vs`` (``vs`` included)."""
        targets = set(vs)
        for t in targets:
            self.index(t)
        return frozenset(n for n in self.nodes if self.descendants(n) & targets)

    def inc_set(self, y: str) -> tuple[Edge, ...]:
        """Edges with an arrowhead at ``y`` whose other end is a non-descendant.

        Every directed edge into ``y`` qualifies; a bidirected edge qualifies
        when its other endpoint does not descend from ``y``.
        """
        desc = self.descendants(y)
        out = []
        for e in self.edges:
            if y not in e.endpoints:
                continue
            if isinstance(e, DirectedEdge):
                if e.head == y:
                    out.append(e)
            elif e.other(y) not in desc:
                out.append(e)
        return tuple(out)

    def delete_edges(self, edge_ids: Iterable[str]) -> CausalDiagram:
        ids = set(edge_ids)
        for i in ids:
            if i not in self._edges:
                raise UnknownEdge(f"unknown edge {i!r}")
        return CausalDiagram(
            self.nodes,
            tuple(e for e in self.directed if e.id not in ids),
            tuple(e for e in self.bidirected if e.id not in ids),
        )

    def subgraph_on_edges(self, edge_ids: Iterable[str]) -> CausalDiagram:
        """Same node set, keeping only the listed edges."""
        keep = set(edge_ids)
        for i in keep:
            self.edge(i)
        return self.delete_edges(e.id for e in self.edges if e.id not in keep)


def _check_acyclic(nodes: Sequence[str], children: Mapping[str, Sequence[str]]) -> None:
    indeg = {n: 0 for n in nodes}
    for n in nodes:
        for c in children[n]:
            indeg[c] += 1
    queue = deque(n for n in nodes if indeg[n] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for c in children[u]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if seen != len(nodes):
        stuck = sorted((n for n in nodes if indeg[n] > 0), key=list(nodes).index)
        raise CycleDetected(f"directed cycle among {', '.join(stuck)}")


def build_diagram(
    node_list: Iterable[str],
    directed_specs: Iterable[Sequence[str]] = (),
    bidirected_specs: Iterable[Sequence[str]] = (),
) -> CausalDiagram:
    """Validate and build a diagram.

    ``directed_specs`` holds ``(tail, head)`` or ``(tail, head, label)``
    tuples; ``bidirected_specs`` holds unordered pairs.  Raises
    CycleDetected, OrderViolation, DuplicateEdge or UnknownNode.
    """
    nodes = tuple(node_list)
    index = {n: i for i, n in enumerate(nodes)}
    directed = []
    for spec in directed_specs:
        if len(spec) not in (2, 3):
            raise ValueError(f"bad directed edge spec {spec!r}")
        directed.append(DirectedEdge(spec[0], spec[1], spec[2] if len(spec) == 3 else None))
    bidirected = []
    for a, b in bidirected_specs:
        for v in (a, b):
            if v not in index:
                raise UnknownNode(f"arc {a}<->{b} references undeclared node {v!r}")
        if index[a] > index[b]:
            a, b = b, a
        bidirected.append(BidirectedEdge(a, b))
    return CausalDiagram(nodes, tuple(directed), tuple(bidirected))


@dataclass(frozen=True, eq=False)
class Parametrization:
    """Edge coefficients (keyed by edge id) and the error covariance matrix.

    ``error_cov`` is indexed in the diagram's node order.  Off-diagonal
    entries are read from the matrix; the coefficient map holds only
    directed-edge coefficients.
    """

    coefficients: Mapping[str, float]
    error_cov: np.ndarray

    def __post_init__(self) -> None:
        cov = np.array(self.error_cov, dtype=float)
        cov.setflags(write=False)
        object.__setattr__(self, "error_cov", cov)
        object.__setattr__(self, "coefficients", dict(self.coefficients))

    def value(self, G: CausalDiagram, edge_id: str) -> float:
        """Parameter of an edge: coefficient, or error covariance for an arc."""
        e = G.edge(edge_id)
        if isinstance(e, DirectedEdge):
            return float(self.coefficients[edge_id])
        return float(self.error_cov[G.index(e.a), G.index(e.b)])

    def coefficient_matrix(self, G: CausalDiagram) -> np.ndarray:
        """C with ``C[j, i]`` the coefficient of node i in node j's equation."""
        self.check(G)
        C = np.zeros((len(G), len(G)))
        for e in G.directed:
            C[G.index(e.head), G.index(e.tail)] = self.coefficients[e.id]
        return C

    def check(self, G: CausalDiagram, tol: float = 0.0) -> None:
        """Raise NonConformingParametrization unless this fits ``G``."""
        n = len(G)
        if self.error_cov.shape != (n, n):
            raise NonConformingParametrization(
                f"error covariance is {self.error_cov.shape}, expected {(n, n)}"
            )
        if not np.allclose(self.error_cov, self.error_cov.T, rtol=0, atol=1e-12):
            raise NonConformingParametrization("error covariance is not symmetric")
        directed_ids = {e.id for e in G.directed}
        missing = directed_ids - set(self.coefficients)
        if missing:
            raise NonConformingParametrization(f"no coefficient for {sorted(missing)}")
        extra = set(self.coefficients) - directed_ids
        if extra:
            raise NonConformingParametrization(f"coefficients for unknown edges {sorted(extra)}")
        arcs = {frozenset(e.endpoints) for e in G.bidirected}
        for i in range(n):
            for j in range(i + 1, n):
                if abs(self.error_cov[i, j]) > tol and frozenset((G.nodes[i], G.nodes[j])) not in arcs:
                    raise NonConformingParametrization(
                        f"nonzero error covariance between {G.nodes[i]} and {G.nodes[j]} "
                        "without a bidirected edge"
                    )

    def restricted_to(self, G: CausalDiagram) -> Parametrization:
        """Drop coefficients of edges absent from ``G`` (e.g. after deletion)."""
        ids = {e.id for e in G.directed}
        cov = np.diag(np.diag(self.error_cov))
        for e in G.bidirected:
            i, j = G.index(e.a), G.index(e.b)
            cov[i, j] = cov[j, i] = self.error_cov[i, j]
        return Parametrization({k: v for k, v in self.coefficients.items() if k in ids}, cov)
