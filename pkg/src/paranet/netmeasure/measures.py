"""Per-node topological measures of an unweighted network."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import expm

from .. import kernels
from ..netbuild import Network


class ConvergenceWarning(RuntimeWarning):
    pass


def degree(net: Network) -> np.ndarray:
    k = np.zeros(net.node_count)
    for u, v in net.edges:
        k[u] += 1
        k[v] += 1
    return k


def betweenness(net: Network) -> np.ndarray:
    """Unnormalized betweenness summed over unordered pairs ``{s, t}`` excluding the node."""
    return kernels.betweenness(*net.csr())


def clustering(net: Network) -> np.ndarray:
    a = net.adjacency()
    k = a.sum(axis=1)
    links = ((a @ a) * a).sum(axis=1) / 2.0
    denom = k * (k - 1)
    return np.divide(2.0 * links, denom, out=np.zeros_like(k), where=k >= 2)


def distances(net: Network) -> np.ndarray:
    """Hop-distance matrix, ``-1`` where no path exists."""
    return kernels.bfs_distances(*net.csr())


def neighborhood(net: Network, h: int = 3, dist: np.ndarray | None = None) -> np.ndarray:
    """Number of nodes exactly ``h`` hops away (the ring, not the ball)."""
    if h < 1:
        raise ValueError("h must be at least 1")
    dist = distances(net) if dist is None else dist
    return (dist == h).sum(axis=1).astype(float)


def eccentricity(net: Network, dist: np.ndarray | None = None) -> np.ndarray:
    """Largest distance to any reachable node; 0 for isolated nodes."""
    dist = distances(net) if dist is None else dist
    return dist.max(axis=1).clip(min=0).astype(float)


def closeness(net: Network, dist: np.ndarray | None = None) -> np.ndarray:
    """``n_c / sum(d_ij)`` over the node's own component of size ``n_c``."""
    dist = distances(net) if dist is None else dist
    reach = dist >= 0
    size = reach.sum(axis=1).astype(float)
    total = np.where(reach, dist, 0).sum(axis=1).astype(float)
    return np.divide(size, total, out=np.zeros_like(size), where=total > 0)


def eigenvector_centrality(net: Network, tol: float = 1e-10, max_iter: int = 10_000
                           ) -> np.ndarray:
    """Leading adjacency eigenvector by power iteration, L2-normalized.

    Iterates on ``A + I`` (same eigenvectors, no oscillation on bipartite
    components) starting from the all-ones vector.
    """
    n = net.node_count
    if net.edge_count == 0:
        warnings.warn("eigenvector centrality of an edgeless graph is zero", ConvergenceWarning,
                      stacklevel=2)
        return np.zeros(n)
    a = net.adjacency()
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        y = a @ x + x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tol:
            return y
        x = y
    warnings.warn(f"eigenvector centrality did not converge in {max_iter} iterations",
                  ConvergenceWarning, stacklevel=2)
    return x


def transition_matrix(net: Network) -> np.ndarray:
    """Uniform random-walk matrix ``T_ij = A_ij / k_i``; rows of isolated nodes are zero."""
    a = net.adjacency()
    k = a.sum(axis=1)
    return np.divide(a, k[:, None], out=np.zeros_like(a), where=k[:, None] > 0)


def _exp_entropy(p: np.ndarray) -> np.ndarray:
    logp = np.log(p, out=np.zeros_like(p), where=p > 0)
    return np.exp(-(p * logp).sum(axis=1))


def accessibility(net: Network, h: int, transition: np.ndarray | None = None) -> np.ndarray:
    """Exponential of the entropy of the ``h``-step walk distribution from each node."""
    t = transition_matrix(net) if transition is None else transition
    p = np.linalg.matrix_power(t, h)
    alpha = _exp_entropy(p)
    alpha[t.sum(axis=1) == 0] = 0.0
    return alpha


def walk_kernel(transition: np.ndarray) -> np.ndarray:
    """``exp(T) / e``: walks of length l weighted by ``1/l!``."""
    return expm(transition) / np.e


def generalized_accessibility(net: Network, transition: np.ndarray | None = None) -> np.ndarray:
    t = transition_matrix(net) if transition is None else transition
    alpha = _exp_entropy(walk_kernel(t))
    alpha[t.sum(axis=1) == 0] = 0.0
    return alpha


def symmetry_levels(net: Network, hmax: int, merged: bool) -> np.ndarray:
    """Symmetry of every node at levels ``1..hmax``; column ``h`` holds level ``h``."""
    return kernels.symmetry(*net.csr(), hmax, merged)


def symmetry(net: Network, h: int, variant: str = "backbone") -> np.ndarray:
    """Backbone or merged concentric symmetry at level ``h``.

    Walkers spread outward level by level, splitting evenly over next-level
    neighbours (merged: over next-level groups of connected same-level
    nodes). Nodes with no outward link are dead ends: their mass is dropped
    and they add to the denominator.
    """
    if variant not in ("backbone", "merged"):
        raise ValueError(f"unknown symmetry variant {variant!r}")
    if h < 1:
        raise ValueError("h must be at least 1")
    return symmetry_levels(net, h, variant == "merged")[:, h]
