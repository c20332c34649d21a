"""Friendship graphs, mutual-friends graphs and the strength-of-relationship ratio."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .graph import SocialGraph
from .weights import WeightedEdgeSet, edge_weight


class MissingWeightError(KeyError):
    pass


@dataclass(frozen=True)
class Subgraph:
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class SrScore:
    value: Rational
    degenerate: bool = False

    def __float__(self) -> float:
        return float(self.value)


def _induced_edges(graph: SocialGraph, nodes: frozenset[int]) -> frozenset[tuple[int, int]]:
    edges = set()
    for u in nodes:
        for v in graph.neighbors(u) & nodes:
            if u < v:
                edges.add((u, v))
    return frozenset(edges)


def friendship_graph(graph: SocialGraph, v: int) -> Subgraph:
    """``v``, its friends, and every edge among that node set.

    Every edge inside ``{v} ∪ N(v)`` either touches ``v`` or joins two
    friends, so the induced subgraph is exactly the friendship graph.
    """
    nodes = frozenset({v}) | graph.neighbors(v)
    return Subgraph(nodes, _induced_edges(graph, nodes))


def mutual_friends_graph(graph: SocialGraph, v: int, c: int) -> Subgraph:
    """``v``, ``c``, their common friends, and every edge among those nodes."""
    if v == c:
        raise ValueError("mutual friends graph needs two distinct nodes")
    nodes = frozenset({v, c}) | (graph.neighbors(v) & graph.neighbors(c))
    return Subgraph(nodes, _induced_edges(graph, nodes))


def _mass(weights: WeightedEdgeSet, edges, graph: SocialGraph | None) -> Rational:
    total = 0
    for e in sorted(edges):
        w = weights.get(*e)
        if w is None:
            if graph is None:
                raise MissingWeightError(f"no weight for edge {e}")
            w = edge_weight(graph, *e)
        total += w
    return total


def strength_of_relationship(
    weights: WeightedEdgeSet,
    graph: SocialGraph,
    v: int,
    c: int,
    compute_missing: bool = False,
) -> SrScore:
    """Weighted mass of ``MFG(v, c)`` over the combined mass of ``FG(v)`` and ``FG(c)``.

    A zero denominator yields ``SrScore(0, degenerate=True)``. Edges absent
    from ``weights`` raise :class:`MissingWeightError` unless
    ``compute_missing`` is set, in which case they are weighed on the spot.
    """
    for x in (v, c):
        if x not in graph:
            raise KeyError(f"unknown node id {x!r}")
    fallback = graph if compute_missing else None
    num = _mass(weights, mutual_friends_graph(graph, v, c).edges, fallback)
    den = _mass(weights, friendship_graph(graph, v).edges, fallback) + _mass(
        weights, friendship_graph(graph, c).edges, fallback
    )
    if den == 0:
        return SrScore(0, True)
    return SrScore(Fraction(num) / Fraction(den))
