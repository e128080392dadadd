"""Modularity and seeded Louvain community detection."""
from __future__ import annotations

import numpy as np
from scipy import sparse

from .. import kernels
from ..netbuild import Network


def modularity(net: Network, partition) -> float:
    """Newman-Girvan modularity of ``partition`` (community id per node)."""
    m = net.edge_count
    if m == 0:
        raise ValueError("modularity is undefined for a graph without edges")
    labels = np.asarray(partition)
    if labels.shape != (net.node_count,):
        raise ValueError("partition must assign every node")
    _, comm = np.unique(labels, return_inverse=True)
    k = np.zeros(net.node_count)
    inside = np.zeros(comm.max() + 1)
    for u, v in net.edges:
        k[u] += 1
        k[v] += 1
        if comm[u] == comm[v]:
            inside[comm[u]] += 1
    tot = np.bincount(comm, weights=k, minlength=len(inside))
    return float(np.sum(inside / m - (tot / (2.0 * m)) ** 2))


def _canonical(labels: np.ndarray) -> np.ndarray:
    """Renumber communities by order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, c in enumerate(labels.tolist()):
        out[i] = mapping.setdefault(c, len(mapping))
    return out


def louvain_once(net: Network, rng: np.random.Generator) -> np.ndarray:
    n = net.node_count
    a = sparse.csr_matrix(net.adjacency())
    membership = np.arange(n, dtype=np.int64)
    m2 = float(a.sum())
    while True:
        size = a.shape[0]
        a.sort_indices()
        strength = np.asarray(a.sum(axis=1)).ravel()
        comm = np.arange(size, dtype=np.int64)
        order = rng.permutation(size).astype(np.int64)
        moved = kernels.louvain_move(a.indptr.astype(np.int32), a.indices.astype(np.int32),
                                     a.data.astype(np.float64), strength, order, comm, m2)
        if not moved:
            break
        comm = _canonical(comm)
        membership = comm[membership]
        agg = sparse.csr_matrix((np.ones(size), (np.arange(size), comm)),
                                shape=(size, comm.max() + 1))
        a = sparse.csr_matrix(agg.T @ a @ agg)
    return _canonical(membership)


def detect_communities(net: Network, seed: int = 0, restarts: int = 10) -> np.ndarray:
    """Best-modularity partition over ``restarts`` seeded Louvain runs.

    The first run reaching the best modularity wins. Edgeless graphs get
    one community per node.
    """
    if net.edge_count == 0:
        return np.arange(net.node_count, dtype=np.int64)
    best, best_q = None, -np.inf
    for r in range(restarts):
        part = louvain_once(net, np.random.default_rng([seed, r]))
        q = modularity(net, part)
        if q > best_q:
            best, best_q = part, q
    return best
