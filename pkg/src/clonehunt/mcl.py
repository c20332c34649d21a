"""Markov Clustering on sparse column-stochastic matrices.

Matrices are ``scipy.sparse.csc_matrix`` with sorted indices. Every column
sum is accumulated with ``np.bincount`` in row order, so results do not depend
on how columns are grouped into blocks or spread over threads.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MclParams:
    """MCL knobs.

    ``max_column_entries`` additionally keeps only the largest entries of each
    column after thresholding (ties by row index); ``None`` disables it. On
    graphs with fewer nodes than the cap it has no effect.
    """

    inflation: float = 2.0
    prune_threshold: float = 1e-4
    convergence_tol: float = 1e-6
    max_iterations: int = 100
    max_column_entries: int | None = 1000

    def __post_init__(self):
        if not self.inflation > 1:
            raise ValueError("inflation must be > 1")
        if self.prune_threshold < 0:
            raise ValueError("prune_threshold must be >= 0")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.max_column_entries is not None and self.max_column_entries < 1:
            raise ValueError("max_column_entries must be >= 1 or None")


@dataclass
class ClusterSet:
    """A partition of the node set produced by :func:`run_mcl`."""

    clusters: list[tuple[int, ...]]
    assignment: dict[int, int]
    converged: bool = True
    iterations: int = 0
    history: list[tuple[int, float, int]] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.clusters)

    def cluster_of(self, node: int) -> int:
        try:
            return self.assignment[int(node)]
        except KeyError:
            raise KeyError(f"node {node} is not assigned to any cluster") from None

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "clusters": [list(c) for c in self.clusters],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ClusterSet":
        clusters = [tuple(int(x) for x in c) for c in doc["clusters"]]
        assignment = {x: k for k, c in enumerate(clusters) for x in c}
        return cls(clusters, assignment, bool(doc.get("converged", True)), int(doc.get("iterations", 0)))


def _col_index(M: sp.csc_matrix) -> np.ndarray:
    return np.repeat(np.arange(M.shape[1]), np.diff(M.indptr))


def column_sums(M: sp.csc_matrix) -> np.ndarray:
    return np.bincount(_col_index(M), weights=M.data, minlength=M.shape[1])


def _normalize(M: sp.csc_matrix) -> sp.csc_matrix:
    sums = column_sums(M)
    cols = _col_index(M)
    if np.any(sums <= 0):
        raise ArithmeticError("cannot normalize a column with no mass")
    M.data /= sums[cols]
    return M


def _as_csc(M) -> sp.csc_matrix:
    M = sp.csc_matrix(M, dtype=np.float64, copy=True)
    M.sum_duplicates()
    M.sort_indices()
    return M


def canonical_transition(W) -> sp.csc_matrix:
    """``(W + I) D^-1`` with ``D`` the column sums of ``W + I``.

    Args:
        W: an :class:`~clonehunt.similarity.AugmentedAdjacency` or any square
            non-negative sparse/dense matrix.
    """
    W = getattr(W, "W", W)
    n = W.shape[0]
    M = _as_csc(sp.csc_matrix(W, dtype=np.float64) + sp.identity(n, format="csc"))
    return _normalize(M)


def expand(M: sp.csc_matrix) -> sp.csc_matrix:
    """``M @ M``."""
    out = (M @ M).tocsc()
    out.sort_indices()
    return out


def inflate(M: sp.csc_matrix, r: float) -> sp.csc_matrix:
    """Raise entries to the power ``r`` and renormalize every column."""
    if not r > 1:
        raise ValueError("inflation exponent must be > 1")
    out = M.copy()
    np.power(out.data, r, out=out.data)
    return _normalize(out)


def prune(M: sp.csc_matrix, eps: float, max_entries: int | None = None) -> sp.csc_matrix:
    """Drop entries below ``eps`` (and beyond the ``max_entries`` largest per column), then renormalize.

    The largest entry of a column always survives, so no column is emptied.
    """
    if eps < 0:
        raise ValueError("prune threshold must be >= 0")
    n = M.shape[1]
    data, rows, cols = M.data, M.indices, _col_index(M)
    nonempty = np.diff(M.indptr) > 0
    colmax = np.zeros(n)
    colmax[nonempty] = np.maximum.reduceat(data, M.indptr[:-1][nonempty])
    keep = (data >= eps) | (data == colmax[cols])
    if max_entries is not None:
        # rank only survivors in columns that still overflow the cap
        counts = np.bincount(cols[keep], minlength=n)
        over = np.nonzero(keep & (counts[cols] > max_entries))[0]
        if len(over):
            c, r, v = cols[over], rows[over], data[over]
            order = np.lexsort((r, -v, c))
            c_sorted = c[order]
            starts = np.searchsorted(c_sorted, c_sorted, side="left")
            rank = np.arange(len(order)) - starts
            keep[over[order[rank >= max_entries]]] = False
    if keep.all():
        return M.copy()
    out = sp.csc_matrix((data[keep], rows[keep], np.concatenate([[0], np.cumsum(np.bincount(cols[keep], minlength=n))])), shape=M.shape)
    return _normalize(out)


def _blocks(M: sp.csc_matrix, budget: int) -> list[tuple[int, int]]:
    """Split columns so each block's expansion touches at most ~``budget`` products."""
    n = M.shape[1]
    nnz = np.diff(M.indptr)
    cost = np.bincount(_col_index(M), weights=nnz[M.indices], minlength=n)
    out, start, acc = [], 0, 0.0
    for j in range(n):
        acc += cost[j]
        if acc > budget and j > start:
            out.append((start, j))
            start, acc = j, cost[j]
    out.append((start, n))
    return out


def mcl_step(M: sp.csc_matrix, params: MclParams, threads: int = 1, budget: int = 20_000_000) -> sp.csc_matrix:
    """One expand, inflate, prune round, computed block-by-block over columns.

    Equal to ``prune(inflate(expand(M), r), eps, cap)`` but never holds the
    full unpruned square in memory.
    """

    def work(span):
        a, b = span
        block = (M @ M[:, a:b]).tocsc()
        block.sort_indices()
        block = inflate(block, params.inflation)
        return prune(block, params.prune_threshold, params.max_column_entries)

    spans = _blocks(M, budget)
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    out = parts[0] if len(parts) == 1 else sp.hstack(parts, format="csc")
    out.sort_indices()
    return out


def extract_clusters(M: sp.csc_matrix, node_ids) -> tuple[list[tuple[int, ...]], dict[int, int]]:
    """Interpret a (near) stable flow matrix as a partition.

    Attractors are rows with a positive diagonal entry. Node ``j`` joins the
    attractor row holding the largest value in column ``j`` (lowest row on
    ties); a column without any attractor entry falls back to its overall
    largest row.
    """
    n = M.shape[1]
    ids = np.asarray(node_ids)
    if n == 0:
        return [], {}
    attractor = M.diagonal() > 0
    rows, cols, data = M.indices, _col_index(M), M.data
    pos = data > 0
    label = np.full(n, -1, dtype=np.int64)
    for mask in (pos & attractor[rows], pos):
        r, c, v = rows[mask], cols[mask], data[mask]
        order = np.lexsort((r, -v, c))
        c_sorted = c[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = c_sorted[1:] != c_sorted[:-1]
        pick_c, pick_r = c_sorted[first], r[order][first]
        unset = label[pick_c] < 0
        label[pick_c[unset]] = pick_r[unset]
    missing = label < 0
    label[missing] = np.nonzero(missing)[0]

    groups: dict[int, list[int]] = {}
    for j in range(n):
        groups.setdefault(int(label[j]), []).append(j)
    members = sorted(groups.values(), key=lambda g: g[0])
    clusters = [tuple(int(ids[j]) for j in g) for g in members]
    assignment = {x: k for k, c in enumerate(clusters) for x in c}
    return clusters, assignment


def run_mcl(W, params: MclParams | None = None, threads: int = 1, node_ids=None) -> ClusterSet:
    """Cluster an augmented adjacency with MCL.

    Iterates expand, inflate and prune until the largest absolute entrywise
    change drops below ``params.convergence_tol`` or ``max_iterations`` is
    reached; in the latter case the clustering of the last iterate is
    returned with ``converged=False``.
    """
    params = params or MclParams()
    if node_ids is None:
        node_ids = getattr(W, "node_ids", None)
    M = canonical_transition(W)
    n = M.shape[0]
    if node_ids is None:
        node_ids = np.arange(n)
    history = []
    converged = n == 0
    it = 0
    while not converged and it < params.max_iterations:
        it += 1
        nxt = mcl_step(M, params, threads=threads)
        diff = abs(nxt - M)
        delta = float(diff.max()) if diff.nnz else 0.0
        M = nxt
        history.append((it, delta, int(M.nnz)))
        log.debug("mcl iteration %d: max delta %.3g, nnz %d", it, delta, M.nnz)
        converged = delta < params.convergence_tol
    if not converged:
        log.warning("MCL did not converge within %d iterations", params.max_iterations)
    clusters, assignment = extract_clusters(M, node_ids)
    return ClusterSet(clusters, assignment, converged, it, history)


def write_history_csv(history, path: str | Path) -> None:
    """Dump per-iteration ``iteration,max_delta,nonzeros`` rows."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "max_delta", "nonzeros"])
        for it, delta, nnz in history:
            w.writerow([it, f"{delta:.6e}", nnz])
