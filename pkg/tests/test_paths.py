import itertools

import pytest
from hypothesis import given, strategies as st

from ivsets.diagram import build_diagram
from ivsets.errors import NodeNotOnPath, NotIntermediate, PathBudgetExceeded, UnknownNode
from ivsets.fixtures import fig2, fig3, fig4
from ivsets.paths import (
    Path,
    canonical_key,
    d_separates,
    enumerate_unblocked_paths,
    is_blocked,
    is_collider,
    points_to,
    subpath,
)
from ivsets.simulate import random_diagram

import oracles

COLLIDER = build_diagram(["Z", "W", "X"], [("Z", "X"), ("W", "X")])


def path(G, start, *edge_ids):
    return Path.from_edge_ids(G, start, edge_ids)


def strs(paths):
    return [str(p) for p in paths]


def test_collider_examples():
    assert is_collider(path(COLLIDER, "Z", "Z->X", "W->X"), "X")
    G = fig3()
    assert not is_collider(path(G, "Z", "Z->X", "X->Y"), "X")
    assert is_collider(path(G, "Z", "Z->X", "X<->Y"), "X")
    with pytest.raises(NotIntermediate):
        is_collider(path(G, "Z", "Z->X", "X->Y"), "Z")
    with pytest.raises(NodeNotOnPath):
        is_collider(path(G, "Z", "Z->X"), "Y")


def test_blocking_examples():
    G = fig4()
    p = path(G, "Z", "Z<->W", "W->Y")
    assert is_blocked(p, {"W"}, G)
    assert not is_blocked(p, set(), G)
    q = path(COLLIDER, "Z", "Z->X", "W->X")
    assert is_blocked(q, set(), COLLIDER)
    assert not is_blocked(q, {"X"}, COLLIDER)


def test_collider_opened_by_descendant():
    G = build_diagram(["Z", "W", "X", "D"], [("Z", "X"), ("W", "X"), ("X", "D")])
    q = path(G, "Z", "Z->X", "W->X")
    assert not is_blocked(q, {"D"}, G)


def test_instrument_chain_has_one_unblocked_path():
    assert strs(enumerate_unblocked_paths(fig3(), "Z", "Y")) == ["Z -> X -> Y"]


def test_conditional_iv_model_paths():
    G = fig2()
    got = strs(enumerate_unblocked_paths(G, "Z", "Y"))
    assert got == ["Z <-> W -> Y", "Z -> X -> Y"]
    every = {tuple(s[1] for s in steps) for steps in oracles.all_simple_paths(G, "Z", "Y")}
    assert len(every) == 6


def test_disconnected_pair_has_no_paths():
    G = build_diagram(["A", "B", "C"], [("A", "C")])
    assert enumerate_unblocked_paths(G, "A", "B") == []
    assert d_separates(G, [], "A", "B")


def test_d_separation_examples():
    G = fig4()
    assert d_separates(G, {"W"}, "Z", "Y")
    assert not d_separates(G, {"W"}, "Z", "X")
    assert d_separates(build_diagram(["a", "b"]), set(), "a", "b")
    with pytest.raises(UnknownNode):
        d_separates(G, {"Q"}, "Z", "Y")
    with pytest.raises(ValueError):
        d_separates(G, {"Z"}, "Z", "Y")


def test_subpath_and_points_to():
    G = fig2()
    p = path(G, "Z", "Z->X", "X->Y")
    assert str(subpath(p, "X", "Y")) == "X -> Y"
    zero = subpath(p, "Z", "Z")
    assert zero.nodes == ("Z",) and zero.edges == ()
    assert str(subpath(p, "Y", "Z")) == "Y <- X <- Z"
    q = path(G, "Z", "Z<->W", "W->Y")
    assert str(subpath(q, "W", "Y")) == "W -> Y"
    assert points_to(p, "X", "start")
    assert not points_to(p, "X", "end")
    arc = path(G, "X", "X<->Y")
    assert points_to(arc, "Y", "start")
    assert points_to(arc, "X", "end")


def test_path_validation():
    G = fig3()
    with pytest.raises(ValueError):
        Path(("Z", "Y"), (G.edge("Z->X"),))
    with pytest.raises(ValueError):
        Path(("X", "Y", "X"), (G.edge("X->Y"), G.edge("X<->Y")))


def test_cap_is_enforced():
    nodes = [f"V{i}" for i in range(8)]
    G = build_diagram(nodes, list(itertools.combinations(nodes, 2)))
    with pytest.raises(PathBudgetExceeded):
        enumerate_unblocked_paths(G, "V0", "V7", cap=50)
    full = enumerate_unblocked_paths(G, "V0", "V7", cap=10**5)
    # in a complete DAG the unblocked V0..V7 paths are the 2^6 directed chains
    assert len(full) == len(oracles.unblocked_edge_sequences(G, "V0", "V7")) == 64


def graphs_and_queries():
    return st.tuples(
        st.integers(2, 7), st.integers(0, 14), st.integers(0, 7), st.integers(0, 10**6), st.randoms()
    )


@given(graphs_and_queries())
def test_enumeration_matches_brute_force(args):
    n, nd, nb, seed, rnd = args
    G = random_diagram(n, nd, nb, seed)
    a, b = rnd.sample(G.nodes, 2)
    Z = [v for v in G.nodes if v not in (a, b) and rnd.random() < 0.3]
    got = enumerate_unblocked_paths(G, a, b, Z)
    assert {p.edge_ids for p in got} == oracles.unblocked_edge_sequences(G, a, b, Z)
    for p in got:
        assert not is_blocked(p, Z, G)
    assert got == sorted(got, key=canonical_key(G))


@given(graphs_and_queries())
def test_d_separation_agrees_with_path_enumeration(args):
    # two unrelated routes: reachability over states vs explicit simple paths
    n, nd, nb, seed, rnd = args
    G = random_diagram(n, nd, nb, seed)
    a, b = rnd.sample(G.nodes, 2)
    Z = [v for v in G.nodes if v not in (a, b) and rnd.random() < 0.4]
    assert d_separates(G, Z, a, b) == (not enumerate_unblocked_paths(G, a, b, Z))
    assert d_separates(G, Z, a, b) == d_separates(G, Z, b, a)


def test_d_separation_exhaustive_on_small_graphs():
    for seed in range(40):
        G = random_diagram(5, 5, 3, seed)
        for a, b in itertools.combinations(G.nodes, 2):
            rest = [v for v in G.nodes if v not in (a, b)]
            for k in range(len(rest) + 1):
                for Z in itertools.combinations(rest, k):
                    brute = not oracles.unblocked_edge_sequences(G, a, b, Z)
                    assert d_separates(G, Z, a, b) == brute, (seed, a, b, Z)


@given(st.integers(2, 7), st.integers(0, 14), st.integers(0, 7), st.integers(0, 10**6))
def test_every_unblocked_path_into_y_uses_one_inc_edge(n, nd, nb, seed):
    G = random_diagram(n, nd, nb, seed)
    for y in G.nodes:
        inc = {e.id for e in G.inc_set(y)}
        for z in G.non_descendants(y):
            for p in enumerate_unblocked_paths(G, z, y):
                assert len(inc & set(p.edge_ids)) == 1
                assert p.edges[-1].id in inc
