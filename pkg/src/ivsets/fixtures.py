"""Reference diagrams used by the tests, the acceptance suite and ``models/*.mod``."""

from __future__ import annotations

import numpy as np

from .diagram import CausalDiagram, Parametrization, build_diagram


def fig2() -> CausalDiagram:
    """Z instruments X -> Y only once W blocks the Z <-> W <-> X <-> ... route."""
    return build_diagram(
        "Z W X Y".split(),
        [("Z", "X", "a"), ("W", "Y", "b"), ("X", "Y", "c")],
        [("Z", "W"), ("W", "X"), ("X", "Y")],
    )


def fig3() -> CausalDiagram:
    """Textbook instrument: Z -> X -> Y with X, Y confounded."""
    return build_diagram("Z X Y".split(), [("Z", "X"), ("X", "Y")], [("X", "Y")])


def fig4() -> CausalDiagram:
    """fig2 without X -> Y; W d-separates Z from Y."""
    return build_diagram(
        "Z W X Y".split(),
        [("Z", "X", "a"), ("W", "Y", "b")],
        [("Z", "W"), ("W", "X"), ("X", "Y")],
    )


def bow() -> CausalDiagram:
    return build_diagram("X Y".split(), [("X", "Y")], [("X", "Y")])


def mset() -> CausalDiagram:
    """Two confounded causes of Y sharing two instruments.

    Neither edge has a conditional instrument on its own; {Z1, Z2} jointly
    identify both.
    """
    return build_diagram(
        "Z1 Z2 X1 X2 Y".split(),
        [("Z1", "X1"), ("Z1", "X2"), ("Z2", "X1"), ("Z2", "X2"), ("X1", "Y"), ("X2", "Y")],
        [("X1", "Y"), ("X2", "Y")],
    )


def redundant_pair() -> CausalDiagram:
    """Z2 reaches Y only through Z1, so {Z1, Z2} carries one instrument's worth of signal."""
    return build_diagram(
        "Z2 Z1 X1 X2 Y".split(),
        [("Z2", "Z1"), ("Z1", "X1"), ("Z1", "X2"), ("X1", "Y"), ("X2", "Y")],
        [("X1", "Y"), ("X2", "Y")],
    )


def fig6a() -> CausalDiagram:
    """Bow-free; X1 instruments itself, X2 needs Z conditioned."""
    return build_diagram(
        "Z X1 X2 Y".split(),
        [("Z", "X2"), ("X1", "Y"), ("X2", "Y")],
        [("Z", "X1"), ("Z", "Y"), ("X1", "X2")],
    )


def fig6b() -> CausalDiagram:
    """X2 instruments X1 through an arc; Z instruments X2."""
    return build_diagram(
        "Z X2 X1 Y".split(),
        [("Z", "X2"), ("X2", "X1"), ("X1", "Y"), ("X2", "Y")],
        [("X2", "X1"), ("X1", "Y")],
    )


def fig6b_with_descendant() -> CausalDiagram:
    """fig6b plus D, a child of X2 whose paths need normalizing."""
    return build_diagram(
        "Z X2 D X1 Y".split(),
        [("Z", "X2"), ("X2", "D"), ("X2", "X1"), ("X1", "Y"), ("X2", "Y")],
        [("X2", "X1"), ("X1", "Y")],
    )


def fig6c() -> CausalDiagram:
    """mset plus X3, a bow with Y that nothing can instrument."""
    return build_diagram(
        "Z1 Z2 X1 X2 X3 Y".split(),
        [
            ("Z1", "X1"), ("Z1", "X2"), ("Z2", "X1"), ("Z2", "X2"),
            ("X1", "Y"), ("X2", "Y"), ("X3", "Y"),
        ],
        [("X1", "Y"), ("X2", "Y"), ("X3", "Y")],
    )


def opened_collider() -> CausalDiagram:
    """Z instruments X -> Y only by conditioning on the collider W of Z -> W <-> X."""
    return build_diagram(
        "Z W X Y".split(), [("Z", "W"), ("W", "Y"), ("X", "Y")], [("W", "X"), ("X", "Y")]
    )


FIXTURES = {
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "bow": bow,
    "mset": mset,
    "redundant_pair": redundant_pair,
    "fig6a": fig6a,
    "fig6b": fig6b,
    "fig6c": fig6c,
    "opened_collider": opened_collider,
}

# edges each instrumental-set fixture is expected to identify, as (targets, y)
SET_TARGETS = {
    "mset": (("X1", "X2"), "Y"),
    "fig6a": (("X1", "X2"), "Y"),
    "fig6b": (("X1", "X2"), "Y"),
    "fig6c": (("X1", "X2"), "Y"),
}


def proportional_mset() -> tuple[CausalDiagram, Parametrization]:
    """mset with Z2's effects on (X1, X2) a multiple of Z1's, so the two instrument rows are proportional."""
    G = mset()
    coefs = {
        "Z1->X1": 0.4, "Z1->X2": 0.2, "Z2->X1": 0.6, "Z2->X2": 0.3,
        "X1->Y": 0.5, "X2->Y": -0.4,
    }
    psi = np.eye(len(G))
    i1, i2, iy = G.index("X1"), G.index("X2"), G.index("Y")
    psi[i1, iy] = psi[iy, i1] = 0.3
    psi[i2, iy] = psi[iy, i2] = -0.2
    return G, Parametrization(coefs, psi)
