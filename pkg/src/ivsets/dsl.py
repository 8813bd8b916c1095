"""Line-oriented model description language.

    # conditional instrument
    node Z W X Y
    edge Z -> X = 0.5 as a
    edge W -> Y as b
    edge X -> Y as c
    arc Z <-> W = 0.2
    var Z = 1.0

``node`` lines declare variables; declaration order is the recursive order
and every ``edge`` must point forward in it.  ``= value`` attaches a
coefficient (edges), an error covariance (arcs) or an error variance
(``var``; unspecified variances default to 1).  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Mapping

import numpy as np

from .diagram import BidirectedEdge, CausalDiagram, DirectedEdge, Parametrization
from .errors import IdentificationError, ModelSyntaxError, SemanticError

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arc><->)
  | (?P<arrow>->)
  | (?P<eq>=)
  | (?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

KEYWORDS = ("node", "edge", "arc", "var")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


@dataclass(frozen=True, eq=False)
class ModelDocument:
    diagram: CausalDiagram
    coefficients: Mapping[str, float] = field(default_factory=dict)
    arc_values: Mapping[str, float] = field(default_factory=dict)
    variances: Mapping[str, float] = field(default_factory=dict)
    name: str | None = None
    comments: tuple[str, ...] = ()
    source: str = ""

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelDocument):
            return NotImplemented
        return (
            self.diagram == other.diagram
            and dict(self.coefficients) == dict(other.coefficients)
            and dict(self.arc_values) == dict(other.arc_values)
            and dict(self.variances) == dict(other.variances)
            and self.name == other.name
            and self.comments == other.comments
        )

    def parametrization(self) -> Parametrization | None:
        """Full parametrization, or None when some edge or arc has no value."""
        G = self.diagram
        if any(e.id not in self.coefficients for e in G.directed):
            return None
        if any(e.id not in self.arc_values for e in G.bidirected):
            return None
        psi = np.diag([float(self.variances.get(v, 1.0)) for v in G.nodes])
        for e in G.bidirected:
            i, j = G.index(e.a), G.index(e.b)
            psi[i, j] = psi[j, i] = self.arc_values[e.id]
        return Parametrization(dict(self.coefficients), psi)


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self) -> None:
        self.nodes: list[str] = []
        self.index: dict[str, int] = {}
        self.directed: list[DirectedEdge] = []
        self.bidirected: list[BidirectedEdge] = []
        self.coefficients: dict[str, float] = {}
        self.arc_values: dict[str, float] = {}
        self.variances: dict[str, float] = {}
        self.comments: list[str] = []

    def node_ref(self, tok: _Tok, lineno: int) -> str:
        if tok.kind != "name":
            raise ModelSyntaxError(f"expected a node name, got {tok.text!r}", lineno, tok.col)
        if tok.text not in self.index:
            raise SemanticError(f"unknown node {tok.text!r}", lineno, tok.col)
        return tok.text

    def value(self, toks: list[_Tok], k: int, lineno: int) -> tuple[float | None, int]:
        if k < len(toks) and toks[k].kind == "eq":
            if k + 1 >= len(toks) or toks[k + 1].kind != "number":
                col = toks[k + 1].col if k + 1 < len(toks) else toks[k].col + 1
                raise ModelSyntaxError("expected a number after '='", lineno, col)
            return float(toks[k + 1].text), k + 2
        return None, k

    def statement(self, toks: list[_Tok], lineno: int) -> None:
        head = toks[0]
        if head.kind != "name" or head.text not in KEYWORDS:
            raise ModelSyntaxError(
                f"expected one of {', '.join(KEYWORDS)}, got {head.text!r}", lineno, head.col
            )
        getattr(self, f"_{head.text}")(toks, lineno)

    def _node(self, toks: list[_Tok], lineno: int) -> None:
        if len(toks) == 1:
            raise ModelSyntaxError("node needs at least one name", lineno, toks[0].col + 4)
        for t in toks[1:]:
            if t.kind != "name":
                raise ModelSyntaxError(f"expected a node name, got {t.text!r}", lineno, t.col)
            if t.text in KEYWORDS:
                raise ModelSyntaxError(f"{t.text!r} is a keyword", lineno, t.col)
            if t.text in self.index:
                raise SemanticError(f"node {t.text!r} declared twice", lineno, t.col)
            self.index[t.text] = len(self.nodes)
            self.nodes.append(t.text)

    def _pair(self, toks: list[_Tok], lineno: int, arrow: str) -> tuple[str, str]:
        if len(toks) < 4:
            end = toks[-1].col + len(toks[-1].text)
            raise ModelSyntaxError(f"expected 'A {'->' if arrow == 'arrow' else '<->'} B'", lineno, end)
        a = self.node_ref(toks[1], lineno)
        if toks[2].kind != arrow:
            want = "->" if arrow == "arrow" else "<->"
            raise ModelSyntaxError(f"expected {want!r}, got {toks[2].text!r}", lineno, toks[2].col)
        b = self.node_ref(toks[3], lineno)
        return a, b

    def _edge(self, toks: list[_Tok], lineno: int) -> None:
        a, b = self._pair(toks, lineno, "arrow")
        if a == b:
            raise SemanticError(f"self-loop {a} -> {a}", lineno, toks[1].col)
        if self.index[a] > self.index[b]:
            raise SemanticError(
                f"edge {a} -> {b} violates the declared recursive order", lineno, toks[1].col
            )
        val, k = self.value(toks, 4, lineno)
        label = None
        if k < len(toks) and toks[k].kind == "name" and toks[k].text == "as":
            if k + 1 >= len(toks) or toks[k + 1].kind != "name":
                raise ModelSyntaxError("expected a label after 'as'", lineno, toks[k].col + 2)
            label = toks[k + 1].text
            k += 2
        if k < len(toks):
            raise ModelSyntaxError(f"unexpected {toks[k].text!r}", lineno, toks[k].col)
        e = DirectedEdge(a, b, label)
        if any(d.id == e.id for d in self.directed):
            raise SemanticError(f"duplicate edge {e.id}", lineno, toks[0].col)
        self.directed.append(e)
        if val is not None:
            self.coefficients[e.id] = val

    def _arc(self, toks: list[_Tok], lineno: int) -> None:
        a, b = self._pair(toks, lineno, "arc")
        if a == b:
            raise SemanticError(f"bidirected self-loop at {a}", lineno, toks[1].col)
        if self.index[a] > self.index[b]:
            a, b = b, a
        val, k = self.value(toks, 4, lineno)
        if k < len(toks):
            raise ModelSyntaxError(f"unexpected {toks[k].text!r}", lineno, toks[k].col)
        e = BidirectedEdge(a, b)
        if any(d.id == e.id for d in self.bidirected):
            raise SemanticError(f"duplicate arc {e.id}", lineno, toks[0].col)
        self.bidirected.append(e)
        if val is not None:
            self.arc_values[e.id] = val

    def _var(self, toks: list[_Tok], lineno: int) -> None:
        if len(toks) < 2:
            raise ModelSyntaxError("var needs a node name", lineno, toks[0].col + 3)
        v = self.node_ref(toks[1], lineno)
        val, k = self.value(toks, 2, lineno)
        if val is None:
            col = toks[2].col if len(toks) > 2 else toks[1].col + len(v)
            raise ModelSyntaxError("var needs '= value'", lineno, col)
        if k < len(toks):
            raise ModelSyntaxError(f"unexpected {toks[k].text!r}", lineno, toks[k].col)
        if val <= 0:
            raise SemanticError(f"error variance of {v} must be positive", lineno, toks[k - 1].col)
        self.variances[v] = val


def parse_model(text: str, name: str | None = None) -> ModelDocument:
    """Parse model text; errors carry 1-based line and column."""
    if text.startswith("\ufeff"):
        text = text[1:]
    p = _Parser()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            if raw.strip().startswith("#"):
                p.comments.append(comment.strip())
            continue
        p.statement(_tokenize(body, lineno), lineno)
    try:
        G = CausalDiagram(tuple(p.nodes), tuple(p.directed), tuple(p.bidirected))
    except IdentificationError as exc:
        raise SemanticError(str(exc), 0, 0) from exc
    return ModelDocument(
        G, p.coefficients, p.arc_values, p.variances, name, tuple(p.comments), text
    )


def serialize_model(doc: ModelDocument) -> str:
    G = doc.diagram
    lines = [f"# {c}" if c else "#" for c in doc.comments]
    if G.nodes:
        lines.append("node " + " ".join(G.nodes))
    for e in G.directed:
        line = f"edge {e.tail} -> {e.head}"
        if e.id in doc.coefficients:
            line += f" = {float(doc.coefficients[e.id])!r}"
        if e.label:
            line += f" as {e.label}"
        lines.append(line)
    for e in G.bidirected:
        line = f"arc {e.a} <-> {e.b}"
        if e.id in doc.arc_values:
            line += f" = {float(doc.arc_values[e.id])!r}"
        lines.append(line)
    for v in G.nodes:
        if v in doc.variances:
            lines.append(f"var {v} = {float(doc.variances[v])!r}")
    return "\n".join(lines) + "\n"


def document_from(
    G: CausalDiagram, theta: Parametrization | None = None, name: str | None = None, comments=()
) -> ModelDocument:
    """Model document for a diagram, carrying ``theta``'s values when given."""
    if theta is None:
        return ModelDocument(G, name=name, comments=tuple(comments))
    coefs = {e.id: float(theta.coefficients[e.id]) for e in G.directed}
    arcs = {e.id: float(theta.error_cov[G.index(e.a), G.index(e.b)]) for e in G.bidirected}
    variances = {v: float(theta.error_cov[i, i]) for i, v in enumerate(G.nodes)}
    return ModelDocument(G, coefs, arcs, variances, name, tuple(comments))


def load_model(path: str | FsPath) -> ModelDocument:
    path = FsPath(path)
    return parse_model(path.read_text(encoding="utf-8"), name=path.stem)
