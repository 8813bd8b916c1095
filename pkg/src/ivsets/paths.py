"""Paths, colliders, blocking and d-separation on mixed graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

from .diagram import BidirectedEdge, CausalDiagram, Edge
from .errors import NodeNotOnPath, NotIntermediate, PathBudgetExceeded

DEFAULT_PATH_CAP = 10_000

Side = Literal["start", "end"]


@dataclass(frozen=True)
class Path:
    """A simple path, stored as its node sequence and the edges between them.

    Orientation of each step is carried by the edge itself, so a path read
    in either direction keeps its arrowheads.  A single node with no edges
    is the empty path at that node.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a path has exactly one more node than edges")
        for k, e in enumerate(self.edges):
            if set(e.endpoints) != {self.nodes[k], self.nodes[k + 1]}:
                raise ValueError(f"edge {e.id} does not join {self.nodes[k]} and {self.nodes[k + 1]}")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise ValueError("path repeats an edge")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("path repeats a node")

    @classmethod
    def from_edge_ids(cls, G: CausalDiagram, start: str, edge_ids: Iterable[str]) -> Path:
        nodes = [start]
        edges = []
        for eid in edge_ids:
            e = G.edge(eid)
            nodes.append(e.other(nodes[-1]))
            edges.append(e)
        return cls(tuple(nodes), tuple(edges))

    @property
    def start(self) -> str:
        return self.nodes[0]

    @property
    def end(self) -> str:
        return self.nodes[-1]

    @property
    def intermediates(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, v: object) -> bool:
        return v in self.nodes

    def position(self, v: str) -> int:
        try:
            return self.nodes.index(v)
        except ValueError:
            raise NodeNotOnPath(f"{v!r} is not on path {self}") from None

    def reversed(self) -> Path:
        return Path(self.nodes[::-1], self.edges[::-1])

    def without_last_edge(self) -> Path:
        return Path(self.nodes[:-1], self.edges[:-1])

    def __str__(self) -> str:
        parts = [self.nodes[0]]
        for k, e in enumerate(self.edges):
            if isinstance(e, BidirectedEdge):
                arrow = "<->"
            elif e.tail == self.nodes[k]:
                arrow = "->"
            else:
                arrow = "<-"
            parts.append(f" {arrow} {self.nodes[k + 1]}")
        return "".join(parts)


def is_collider(p: Path, v: str) -> bool:
    k = p.position(v)
    if k == 0 or k == len(p.nodes) - 1:
        raise NotIntermediate(f"{v!r} is an endpoint of {p}")
    return p.edges[k - 1].arrowhead_at(v) and p.edges[k].arrowhead_at(v)


def is_blocked(p: Path, Z: Iterable[str], G: CausalDiagram) -> bool:
    """True iff a non-collider of ``p`` is in ``Z``, or some collider is
    outside ``Z`` with no descendant in ``Z`` (descendants taken in ``G``)."""
    Z = frozenset(Z)
    for v in p.intermediates:
        if is_collider(p, v):
            if not (G.descendants(v) & Z):
                return True
        elif v in Z:
            return True
    return False


def subpath(p: Path, u: str, v: str) -> Path:
    """Contiguous segment of ``p`` from ``u`` to ``v`` (read in that direction)."""
    i, j = p.position(u), p.position(v)
    if i <= j:
        return Path(p.nodes[i : j + 1], p.edges[i:j])
    return Path(p.nodes[j : i + 1], p.edges[j:i]).reversed()


def points_to(p: Path, v: str, side: Side) -> bool:
    """Whether the step of ``p`` at ``v`` on the given side has an arrowhead at ``v``.

    ``side="start"`` inspects the step joining ``v`` to its predecessor,
    ``side="end"`` the step joining it to its successor.
    """
    k = p.position(v)
    if side == "start":
        if k == 0:
            raise NotIntermediate(f"{v!r} has no step toward the start of {p}")
        return p.edges[k - 1].arrowhead_at(v)
    if side == "end":
        if k == len(p.nodes) - 1:
            raise NotIntermediate(f"{v!r} has no step toward the end of {p}")
        return p.edges[k].arrowhead_at(v)
    raise ValueError(f"side must be 'start' or 'end', not {side!r}")


def canonical_key(G: CausalDiagram):
    """Sort key: node sequence in declared order, then edges in listing order."""
    edge_pos = {e.id: i for i, e in enumerate(G.edges)}

    def key(p: Path):
        return (tuple(G.index(n) for n in p.nodes), tuple(edge_pos[e.id] for e in p.edges))

    return key


def enumerate_unblocked_paths(
    G: CausalDiagram,
    a: str,
    b: str,
    Z: Iterable[str] = (),
    cap: int = DEFAULT_PATH_CAP,
) -> list[Path]:
    """All simple paths between ``a`` and ``b`` not blocked by ``Z``, canonically ordered.

    Raises PathBudgetExceeded when more than ``cap`` such paths exist.
    """
    G.index(a)
    G.index(b)
    if a == b:
        raise ValueError("endpoints must differ")
    if cap <= 0:
        raise ValueError("cap must be positive")
    Z = frozenset(Z)
    for z in Z:
        G.index(z)
    anc = G.ancestral_closure(Z)

    found: list[Path] = []
    nodes = [a]
    edges: list[Edge] = []
    on_path = {a}

    def passable(v: str, e_in: Edge, e_out: Edge) -> bool:
        if e_in.arrowhead_at(v) and e_out.arrowhead_at(v):
            return v in anc
        return v not in Z

    def extend(u: str) -> None:
        for e in G.incident(u):
            w = e.other(u)
            if w in on_path:
                continue
            if edges and not passable(u, edges[-1], e):
                continue
            nodes.append(w)
            edges.append(e)
            if w == b:
                found.append(Path(tuple(nodes), tuple(edges)))
                if len(found) > cap:
                    raise PathBudgetExceeded(
                        f"more than {cap} unblocked paths between {a} and {b}"
                    )
            else:
                on_path.add(w)
                extend(w)
                on_path.discard(w)
            nodes.pop()
            edges.pop()

    extend(a)
    found.sort(key=canonical_key(G))
    return found


def d_separates(G: CausalDiagram, Z: Iterable[str], a: str, b: str) -> bool:
    """Whether ``Z`` blocks every path between ``a`` and ``b``.

    Reachability over (node, arrived-with-arrowhead) states; this never
    materialises paths, so it stays cheap on dense diagrams.
    """
    G.index(a)
    G.index(b)
    Z = frozenset(Z)
    for z in Z:
        G.index(z)
    if a == b:
        raise ValueError("endpoints must differ")
    if a in Z or b in Z:
        raise ValueError("endpoints may not be in the conditioning set")
    anc = G.ancestral_closure(Z)

    seen: set[tuple[str, bool]] = set()
    stack: list[tuple[str, bool]] = []
    for e in G.incident(a):
        w = e.other(a)
        stack.append((w, e.arrowhead_at(w)))
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        v, into = state
        if v == b:
            return False
        for e in G.incident(v):
            if into and e.arrowhead_at(v):
                ok = v in anc
            else:
                ok = v not in Z
            if ok:
                w = e.other(v)
                stack.append((w, e.arrowhead_at(w)))
    return True
