"""Attribute similarity, top-K pair selection and the augmented adjacency.

Profile similarity is the equal-weight mean of a normalized Levenshtein name
score and exact matches on the eight categorical fields. The K most similar
node pairs are added on top of the friendship adjacency, giving
``W = A + S`` with entries in ``{0, 1, 2}``.

Pairs are ranked by descending score, then ascending ``(min_id, max_id)``.
Scores are produced by one fixed sequence of float operations in both the
scalar and the vectorized path, so equal inputs give bit-equal scores and the
ranking is a total order independent of how the work is chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from rapidfuzz.distance import Levenshtein
from rapidfuzz.process import cdist, cpdist

from .graph import CATEGORICAL_FIELDS, AttributeProfile, GraphError, SocialGraph

N_COMPONENTS = 1 + len(CATEGORICAL_FIELDS)

#: above this node count, pairs come from blocking instead of full enumeration
EXACT_PAIR_LIMIT = 10_000


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """``1 - editdistance(a, b) / max(|a|, |b|)``; 1.0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def profile_similarity(a: AttributeProfile, b: AttributeProfile) -> float:
    matches = 0
    for f in CATEGORICAL_FIELDS:
        x, y = getattr(a, f), getattr(b, f)
        if x is not None and x == y:
            matches += 1
    return (name_similarity(a.name, b.name) + matches) / N_COMPONENTS


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense symmetric similarity matrix with zero diagonal, in internal index order."""

    node_ids: np.ndarray
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def score(self, u: int, v: int) -> float:
        pos = {int(x): i for i, x in enumerate(self.node_ids)}
        return float(self.values[pos[u], pos[v]])


class _Encoded:
    """Integer-coded profile columns for vectorized scoring. ``-1`` is absent."""

    def __init__(self, graph: SocialGraph):
        profiles = graph.profiles
        self.names = [p.name for p in profiles]
        self.name_len = np.array([len(s) for s in self.names], dtype=np.int64)
        codes = np.empty((len(CATEGORICAL_FIELDS), len(profiles)), dtype=np.int64)
        for k, f in enumerate(CATEGORICAL_FIELDS):
            vocab: dict = {}
            for i, p in enumerate(profiles):
                v = getattr(p, f)
                codes[k, i] = -1 if v is None else vocab.setdefault(v, len(vocab))
        self.codes = codes

    def matches(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        out = np.zeros(np.broadcast_shapes(i.shape, j.shape), dtype=np.int64)
        for row in self.codes:
            a, b = row[i], row[j]
            out += (a == b) & (a >= 0)
        return out

    def combine(self, dist: np.ndarray, longest: np.ndarray, matches: np.ndarray) -> np.ndarray:
        safe = np.where(longest == 0, 1, longest)
        name = np.where(longest == 0, 1.0, 1.0 - dist / safe)
        return (name + matches) / N_COMPONENTS

    def pair_scores(self, i: np.ndarray, j: np.ndarray, workers: int = 1) -> np.ndarray:
        if len(i) == 0:
            return np.zeros(0)
        a = [self.names[k] for k in i]
        b = [self.names[k] for k in j]
        dist = cpdist(a, b, scorer=Levenshtein.distance, dtype=np.int64, workers=workers)
        longest = np.maximum(self.name_len[i], self.name_len[j])
        return self.combine(dist, longest, self.matches(i, j))

    def block_scores(self, rows: np.ndarray, workers: int = 1) -> np.ndarray:
        """Scores of ``rows`` against every node, shape ``(len(rows), n)``."""
        dist = cdist(
            [self.names[k] for k in rows],
            self.names,
            scorer=Levenshtein.distance,
            dtype=np.int64,
            workers=workers,
        )
        longest = np.maximum(self.name_len[rows][:, None], self.name_len[None, :])
        cols = np.arange(len(self.names))
        return self.combine(dist, longest, self.matches(rows[:, None], cols[None, :]))


def similarity_matrix(graph: SocialGraph, workers: int = 1) -> SimilarityMatrix:
    """Dense ``n x n`` similarity. Memory is quadratic; intended for small graphs."""
    n = len(graph)
    if n == 0:
        raise GraphError("similarity matrix of an empty graph")
    enc = _Encoded(graph)
    values = enc.block_scores(np.arange(n), workers=workers)
    np.fill_diagonal(values, 0.0)
    return SimilarityMatrix(graph.node_ids.copy(), values)


def compute_k(alpha: float, edge_count: int) -> int:
    """Number of augmented pairs, ``floor(alpha * |E|)``.

    The product is rounded to 12 significant digits before flooring so that
    values such as ``0.68 * 50`` (33.99999... in binary) floor to 34.
    """
    if alpha < 0 or edge_count < 0:
        raise ValueError("alpha and edge_count must be non-negative")
    return int(math.floor(float(f"{alpha * edge_count:.12g}")))


def _rank(scores: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Order indices by descending score then ascending ``(i, j)``."""
    return np.lexsort((j, i, -scores))


def top_k_pairs(C: SimilarityMatrix, K: int) -> set[tuple[int, int]]:
    """The K highest-scoring unordered pairs, as external-id tuples ``(u, v)`` with ``u < v``."""
    n = C.n
    total = n * (n - 1) // 2
    if not 0 <= K <= total:
        raise ValueError(f"K={K} outside [0, {total}]")
    i, j = np.triu_indices(n, k=1)
    order = _rank(C.values[i, j], i, j)[:K]
    ids = C.node_ids
    return {(int(ids[a]), int(ids[b])) for a, b in zip(i[order], j[order])}


@dataclass(frozen=True)
class ScoredPairs:
    """Internal-index pairs ``i < j`` with scores, in rank order."""

    i: np.ndarray
    j: np.ndarray
    score: np.ndarray

    def __len__(self) -> int:
        return len(self.i)


def _merge_top(parts: list[ScoredPairs], K: int) -> ScoredPairs:
    i = np.concatenate([p.i for p in parts])
    j = np.concatenate([p.j for p in parts])
    s = np.concatenate([p.score for p in parts])
    order = _rank(s, i, j)[:K]
    return ScoredPairs(i[order], j[order], s[order])


def _exact_top(enc: _Encoded, n: int, K: int, workers: int, block: int) -> ScoredPairs:
    best = ScoredPairs(np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))
    if K == 0:
        return best
    for start in range(0, n - 1, block):
        rows = np.arange(start, min(start + block, n - 1))
        scores = enc.block_scores(rows, workers=workers)
        r, c = np.nonzero(np.arange(n)[None, :] > rows[:, None])
        s = scores[r, c]
        gi = rows[r]
        if len(s) > K:
            # cheap prefilter: nothing strictly below the K-th largest can survive
            kth = np.partition(s, len(s) - K)[len(s) - K]
            keep = s >= kth
            gi, c, s = gi[keep], c[keep], s[keep]
        best = _merge_top([best, ScoredPairs(gi, c, s)], K)
    return best


def candidate_pairs(graph: SocialGraph, window: int = 16, max_block: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Blocking-based candidate generation for large graphs.

    Nodes are grouped by a normalized name prefix and by several attribute
    combinations. Small groups contribute all their pairs; larger groups are
    sorted by (name, index) and each node is paired with the next ``window``
    members. Returns deduplicated internal-index arrays ``(i, j)`` with ``i < j``.
    """
    profiles = graph.profiles
    keys = [
        lambda p: ("name", "".join(p.name.lower().split())[:4]),
        lambda p: ("se", p.school, p.employer),
        lambda p: ("epl", p.employer, p.position, p.location),
        lambda p: ("sdl", p.school, p.degree, p.location),
        lambda p: ("ebl", p.employer, p.birth_year, p.location),
    ]
    out_i, out_j = [], []
    for key in keys:
        groups: dict = {}
        for idx, p in enumerate(profiles):
            k = key(p)
            if None in k[1:]:
                continue
            groups.setdefault(k, []).append(idx)
        for members in groups.values():
            g = len(members)
            if g < 2:
                continue
            if g <= max_block:
                m = np.array(members, dtype=np.int64)
                a, b = np.triu_indices(g, k=1)
                out_i.append(m[a])
                out_j.append(m[b])
            else:
                m = np.array(sorted(members, key=lambda x: (profiles[x].name, x)), dtype=np.int64)
                for step in range(1, window + 1):
                    out_i.append(m[:-step])
                    out_j.append(m[step:])
    if not out_i:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    i = np.concatenate(out_i)
    j = np.concatenate(out_j)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    n = len(profiles)
    code = np.unique(lo * n + hi)
    return code // n, code % n


def top_similar_pairs(
    graph: SocialGraph,
    K: int,
    exact_limit: int = EXACT_PAIR_LIMIT,
    workers: int = 1,
    block: int = 256,
) -> ScoredPairs:
    """Top-K most similar pairs without materializing the dense matrix.

    Exact enumeration up to ``exact_limit`` nodes; above it, candidates come
    from :func:`candidate_pairs` and K is capped at the candidate count.
    """
    n = len(graph)
    total = n * (n - 1) // 2
    if not 0 <= K <= total:
        raise ValueError(f"K={K} outside [0, {total}]")
    enc = _Encoded(graph)
    if n <= exact_limit:
        return _exact_top(enc, n, K, workers, block)
    i, j = candidate_pairs(graph)
    scores = np.empty(len(i))
    chunk = 1 << 20
    for s in range(0, len(i), chunk):
        scores[s : s + chunk] = enc.pair_scores(i[s : s + chunk], j[s : s + chunk], workers)
    order = _rank(scores, i, j)[:K]
    return ScoredPairs(i[order], j[order], scores[order])


@dataclass(frozen=True)
class AugmentedAdjacency:
    """``W = A + S`` over internal indices, plus the augmented pair list."""

    node_ids: np.ndarray
    W: sp.csr_matrix
    pairs: np.ndarray  # (K, 2) internal indices, i < j

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def augmented_pairs(self) -> set[tuple[int, int]]:
        ids = self.node_ids
        return {(int(ids[a]), int(ids[b])) for a, b in self.pairs}

    def weight(self, u: int, v: int) -> int:
        pos = np.searchsorted(self.node_ids, [u, v])
        return int(self.W[pos[0], pos[1]])


def augment(graph: SocialGraph, pairs) -> AugmentedAdjacency:
    """Add the indicator of ``pairs`` to the friendship adjacency.

    ``pairs`` is either an iterable of external-id pairs or a
    :class:`ScoredPairs` of internal indices. Pairs that are also friendship
    edges yield an entry of 2.
    """
    n = len(graph)
    if isinstance(pairs, ScoredPairs):
        pi, pj = pairs.i.astype(np.int64), pairs.j.astype(np.int64)
    else:
        rows = []
        for u, v in pairs:
            if u not in graph or v not in graph:
                raise GraphError(f"augmented pair ({u}, {v}) references unknown node")
            a, b = graph.index(u), graph.index(v)
            if a == b:
                raise GraphError(f"augmented pair ({u}, {v}) is a self-pair")
            rows.append((min(a, b), max(a, b)))
        rows = sorted(set(rows))
        arr = np.array(rows, dtype=np.int64).reshape(-1, 2)
        pi, pj = arr[:, 0], arr[:, 1]
    S = sp.csr_matrix(
        (np.ones(2 * len(pi), dtype=np.int8), (np.concatenate([pi, pj]), np.concatenate([pj, pi]))),
        shape=(n, n),
    )
    W = (graph.adjacency_matrix() + S).tocsr()
    W.sum_duplicates()
    W.sort_indices()
    return AugmentedAdjacency(graph.node_ids.copy(), W, np.column_stack([pi, pj]))


def augmented_adjacency(graph: SocialGraph, alpha: float, workers: int = 1) -> AugmentedAdjacency:
    """Compute ``K``, pick the top-K similar pairs and return ``W``."""
    n = len(graph)
    K = compute_k(alpha, graph.edge_count)
    K = min(K, n * (n - 1) // 2)
    return augment(graph, top_similar_pairs(graph, K, workers=workers))

