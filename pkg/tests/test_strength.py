from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonehunt.strength import (
    MissingWeightError,
    friendship_graph,
    mutual_friends_graph,
    strength_of_relationship,
)
from clonehunt.weights import WeightedEdgeSet, weigh_graph

from conftest import make_graph


def test_friendship_graph_examples():
    iso = make_graph(2)
    fg = friendship_graph(iso, 0)
    assert fg.nodes == {0} and fg.edges == set()
    star = make_graph(4, [(0, 1), (0, 2), (0, 3)])
    fg = friendship_graph(star, 0)
    assert len(fg.nodes) == 4 and len(fg.edges) == 3
    tri = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert friendship_graph(tri, 0).edges == {(0, 1), (0, 2), (1, 2)}


def test_mutual_friends_graph_examples():
    g = make_graph(3)
    mfg = mutual_friends_graph(g, 0, 2)
    assert mfg.nodes == {0, 2} and mfg.edges == set()
    path = make_graph(3, [(0, 1), (1, 2)])
    mfg = mutual_friends_graph(path, 0, 2)
    assert mfg.nodes == {0, 1, 2} and mfg.edges == {(0, 1), (1, 2)}
    adj = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert mutual_friends_graph(adj, 0, 2).edges == {(0, 1), (1, 2), (0, 2)}
    with pytest.raises(ValueError):
        mutual_friends_graph(adj, 1, 1)


def test_sr_path_example():
    g = make_graph(3, [(0, 1), (1, 2)])
    ws = WeightedEdgeSet({(0, 1): 2, (1, 2): 3})
    sr = strength_of_relationship(ws, g, 0, 2)
    assert sr.value == 1 and not sr.degenerate


def test_sr_empty_mfg_and_degenerate():
    g = make_graph(4, [(0, 1), (2, 3)])
    ws = WeightedEdgeSet({(0, 1): 1, (2, 3): 1})
    assert strength_of_relationship(ws, g, 0, 2).value == 0
    zero = WeightedEdgeSet({(0, 1): 0, (2, 3): 0})
    sr = strength_of_relationship(zero, g, 0, 2)
    assert sr.value == 0 and sr.degenerate


def test_sr_missing_weight():
    g = make_graph(3, [(0, 1), (1, 2)], [(0, 1)], likes={0: {"x"}, 1: {"x"}})
    with pytest.raises(MissingWeightError):
        strength_of_relationship(WeightedEdgeSet({(0, 1): 1}), g, 0, 2)
    sr = strength_of_relationship(WeightedEdgeSet({(0, 1): 1}), g, 0, 2, compute_missing=True)
    assert sr.value == 1
    with pytest.raises(KeyError):
        strength_of_relationship(WeightedEdgeSet(), g, 0, 9)


def test_fixture_clone_has_lower_sr(fixture20_clone):
    g, clone = fixture20_clone
    ws = weigh_graph(g)
    assert strength_of_relationship(ws, g, 35, clone).value < strength_of_relationship(ws, g, 35, 36).value


# -- brute-force oracle ------------------------------------------------------------


def brute_sr(g, weights, v, c):
    """Evaluate the ratio by testing membership predicates on every parent edge."""
    nv, nc = g.neighbors(v), g.neighbors(c)

    def in_fg(x, e):
        a, b = e
        nx = g.neighbors(x)
        touches = (a == x and b in nx) or (b == x and a in nx)
        between_friends = a in nx and b in nx
        return touches or between_friends

    def in_mfg(e):
        allowed = {v, c} | (nv & nc)
        return e[0] in allowed and e[1] in allowed

    num = Fraction(0)
    den = Fraction(0)
    for e in g.edges():
        w = Fraction(weights[e])
        if in_mfg(e):
            num += w
        if in_fg(v, e):
            den += w
        if in_fg(c, e):
            den += w
    return num / den if den else Fraction(0)


@st.composite
def weighted_graphs(draw):
    n = draw(st.integers(2, 30))
    pairs = list(combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 4 * n), unique=True))
    g = make_graph(n, edges)
    wvals = st.fractions(min_value=0, max_value=5, max_denominator=6)
    ws = WeightedEdgeSet({e: draw(wvals) for e in g.edges()})
    v, c = draw(st.sampled_from(pairs))
    return g, ws, v, c


@settings(max_examples=100, deadline=None)
@given(weighted_graphs())
def test_sr_equals_brute_force(case):
    g, ws, v, c = case
    sr = strength_of_relationship(ws, g, v, c)
    assert Fraction(sr.value) == brute_sr(g, ws, v, c)
    assert sr.value == strength_of_relationship(ws, g, c, v).value
    assert sr.value >= 0
    if sr.degenerate:
        assert sr.value == 0
    mfg = mutual_friends_graph(g, v, c).nodes
    assert mfg <= friendship_graph(g, v).nodes | friendship_graph(g, c).nodes | {v, c}


@settings(max_examples=60, deadline=None)
@given(weighted_graphs())
def test_mfg_edges_lie_in_a_friendship_graph(case):
    # no edge is "MFG-only", so the ratio never exceeds 1
    g, ws, v, c = case
    mfg = mutual_friends_graph(g, v, c).edges
    assert mfg <= friendship_graph(g, v).edges | friendship_graph(g, c).edges
    assert strength_of_relationship(ws, g, v, c).value <= 1
