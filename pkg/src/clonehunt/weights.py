"""Interaction-based edge weights.

``w(i, j) = |common active friends| + |common page likes| + URL Jaccard``.

Counts and the URL fraction are summed as-is, with no rescaling, so an edge
weight is an exact rational (an ``int``, or a ``Fraction`` when the URL term
is non-zero).
"""

from __future__ import annotations

import csv
from fractions import Fraction
from numbers import Rational
from pathlib import Path

from .graph import SocialGraph


def _check(graph: SocialGraph, *nodes):
    for v in nodes:
        if v not in graph:
            raise KeyError(f"unknown node id {v!r}")


def _check_pair(graph, i, j):
    _check(graph, i, j)
    if int(i) == int(j):
        raise ValueError("pair endpoints must differ")


def active_friends(graph: SocialGraph, i: int) -> frozenset[int]:
    """Friends of ``i`` that ``i`` has interacted with."""
    _check(graph, i)
    return graph.neighbors(i) & graph.interactions(i)


def active_friend_count(graph: SocialGraph, i: int) -> int:
    """Node-level active-friends feature. Reported only; not part of the edge weight."""
    return len(active_friends(graph, i))


def common_active_friends(graph: SocialGraph, i: int, j: int) -> frozenset[int]:
    _check_pair(graph, i, j)
    return active_friends(graph, i) & active_friends(graph, j)


def common_page_likes(graph: SocialGraph, i: int, j: int) -> frozenset[str]:
    _check_pair(graph, i, j)
    return graph.page_likes(i) & graph.page_likes(j)


def _jaccard(a: frozenset, b: frozenset) -> Rational:
    union = len(a | b)
    if union == 0:
        return 0
    inter = len(a & b)
    return Fraction(inter, union) if inter else 0


def common_url_fraction(graph: SocialGraph, i: int, j: int) -> Rational:
    """Jaccard coefficient of the two URL sets; 0 when both are empty."""
    _check_pair(graph, i, j)
    return _jaccard(graph.urls(i), graph.urls(j))


def edge_weight(graph: SocialGraph, i: int, j: int) -> Rational:
    _check_pair(graph, i, j)
    return (
        len(common_active_friends(graph, i, j))
        + len(common_page_likes(graph, i, j))
        + common_url_fraction(graph, i, j)
    )


class WeightedEdgeSet:
    """Weights keyed by unordered node pair. Lookups are symmetric."""

    def __init__(self, weights: dict[tuple[int, int], Rational] | None = None):
        self._w: dict[tuple[int, int], Rational] = {}
        for (u, v), w in (weights or {}).items():
            self._w[(u, v) if u < v else (v, u)] = w

    def __len__(self) -> int:
        return len(self._w)

    def __contains__(self, pair) -> bool:
        u, v = pair
        return ((u, v) if u < v else (v, u)) in self._w

    def __getitem__(self, pair) -> Rational:
        u, v = pair
        return self._w[(u, v) if u < v else (v, u)]

    def get(self, u: int, v: int, default=None):
        return self._w.get((u, v) if u < v else (v, u), default)

    def items(self):
        return self._w.items()

    def __eq__(self, other):
        if not isinstance(other, WeightedEdgeSet):
            return NotImplemented
        return self._w == other._w

    def to_csv(self, path: str | Path) -> None:
        """Write ``src,dst,weight`` rows sorted by pair; weights with 6 decimals."""
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["src", "dst", "weight"])
            for (u, v), wt in sorted(self._w.items()):
                w.writerow([u, v, f"{float(wt):.6f}"])


def weigh_graph(graph: SocialGraph) -> WeightedEdgeSet:
    """Weight every friendship edge.

    Works on internal indices with precomputed active-friend sets; the result
    equals :func:`edge_weight` evaluated edge by edge.
    """
    n = len(graph)
    active = [graph.adj_index(i) & graph.inter_index(i) for i in range(n)]
    ids = graph.nodes
    out = {}
    for i, j in graph.edge_index_array().tolist():
        out[(ids[i], ids[j])] = (
            len(active[i] & active[j])
            + len(graph.likes_index(i) & graph.likes_index(j))
            + _jaccard(graph.urls_index(i), graph.urls_index(j))
        )
    ws = WeightedEdgeSet()
    ws._w = out
    return ws


def weigh_pairs(graph: SocialGraph, pairs) -> WeightedEdgeSet:
    """Weights for an explicit set of node pairs."""
    return WeightedEdgeSet({(u, v): edge_weight(graph, u, v) for u, v in pairs})
