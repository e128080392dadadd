"""Paragraph similarity networks: tf-idf vectors, cosine weights, density thresholding."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .corpus import Paragraph


class DegenerateCorpusWarning(UserWarning):
    pass


class NoSignalError(ValueError):
    pass


@dataclass(frozen=True)
class TfIdfVector:
    paragraph_index: int
    weights: dict[str, float]

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights.values()))


@dataclass(frozen=True)
class WeightedNetwork:
    weights: np.ndarray
    node_labels: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Network:
    """Unweighted simple graph on nodes ``0..n-1``.

    ``edges`` is sorted with ``u < v`` in every pair; ``edge_weights`` keeps
    the similarity of each retained edge when the network came from
    thresholding.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    target_density: float | None = None
    edge_weights: tuple[float, ...] | None = None
    node_labels: tuple[int, ...] | None = None

    @classmethod
    def from_edges(cls, n: int, edges, **kwargs) -> "Network":
        canon = sorted({(min(u, v), max(u, v)) for u, v in edges})
        for u, v in canon:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} nodes")
        return cls(n, tuple(canon), **kwargs)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count))
        if self.edges:
            e = np.asarray(self.edges)
            a[e[:, 0], e[:, 1]] = 1.0
            a[e[:, 1], e[:, 0]] = 1.0
        return a

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency as CSR ``(indptr, indices)`` with sorted neighbour lists."""
        adj = self.neighbors()
        indptr = np.zeros(self.node_count + 1, dtype=np.int32)
        indptr[1:] = np.cumsum([len(a) for a in adj])
        indices = np.fromiter((v for a in adj for v in a), dtype=np.int32,
                              count=int(indptr[-1]))
        return indptr, indices

    def relabel(self, perm: Sequence[int]) -> "Network":
        """Return the network with node ``i`` renamed ``perm[i]``."""
        return Network.from_edges(self.node_count, [(perm[u], perm[v]) for u, v in self.edges],
                                  target_density=self.target_density)


def tfidf_vectors(paragraphs: Sequence[Paragraph], log: Callable[[float], float] = math.log
                  ) -> list[TfIdfVector]:
    """tf-idf weight of word w in paragraph d: ``count(w, d) / n * log(|D| / d_w)``.

    ``n`` is the token count of the whole paragraph collection and ``d_w``
    the number of paragraphs containing ``w``.
    """
    counts = [Counter(p.tokens) for p in paragraphs]
    n_docs = len(paragraphs)
    if n_docs < 2:
        warnings.warn("degenerate corpus: fewer than two paragraphs, every idf is zero",
                      DegenerateCorpusWarning, stacklevel=2)
    total = sum(sum(c.values()) for c in counts)
    doc_freq: Counter = Counter()
    for c in counts:
        doc_freq.update(c.keys())
    idf = {w: log(n_docs / df) for w, df in doc_freq.items()}
    vectors = []
    for p, c in zip(paragraphs, counts):
        weights = {}
        for w, f in c.items():
            value = f / total * idf[w]
            if value > 0:
                weights[w] = value
        vectors.append(TfIdfVector(p.index, weights))
    return vectors


def cosine_similarity(u: TfIdfVector, v: TfIdfVector) -> float:
    nu, nv = u.norm(), v.norm()
    if nu == 0 or nv == 0:
        return 0.0
    small, large = (u.weights, v.weights) if len(u.weights) <= len(v.weights) else (v.weights, u.weights)
    dot = sum(w * large.get(k, 0.0) for k, w in small.items())
    return min(1.0, max(0.0, dot / (nu * nv)))


def _tfidf_matrix(vectors: Sequence[TfIdfVector]) -> sparse.csr_matrix:
    vocab: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for i, vec in enumerate(vectors):
        for word in sorted(vec.weights):
            rows.append(i)
            cols.append(vocab.setdefault(word, len(vocab)))
            vals.append(vec.weights[word])
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(vectors), max(1, len(vocab))))


def build_weighted(paragraphs: Sequence[Paragraph], log: Callable[[float], float] = math.log
                   ) -> WeightedNetwork:
    """Complete graph over paragraphs weighted by tf-idf cosine similarity."""
    if len(paragraphs) < 2:
        raise ValueError("need at least two paragraphs to build a network")
    vectors = tfidf_vectors(paragraphs, log=log)
    x = _tfidf_matrix(vectors)
    norms = np.sqrt(np.asarray(x.multiply(x).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    x = sparse.diags(inv) @ x
    w = np.asarray((x @ x.T).todense())
    np.fill_diagonal(w, 0.0)
    w = np.clip((w + w.T) / 2, 0.0, 1.0)
    return WeightedNetwork(w, tuple(p.index for p in paragraphs))


def target_edge_count(n: int, density: float) -> int:
    """``max(1, round(density * n(n-1)/2))`` with halves rounded up."""
    return max(1, math.floor(density * n * (n - 1) / 2 + 0.5))


def threshold_density(wn: WeightedNetwork, density: float = 0.05) -> Network:
    """Keep the heaviest edges so the graph has the target density.

    Ties at the cutoff weight go to the lexicographically smallest pair.
    """
    if not 0 < density <= 1:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    n = wn.node_count
    iu, ju = np.triu_indices(n, k=1)
    w = wn.weights[iu, ju]
    if not np.any(w > 0):
        raise NoSignalError("no signal: every edge weight is zero")
    m = min(target_edge_count(n, density), len(w))
    # triu order is already lexicographic, so a stable sort on -w keeps the tie rule
    order = np.argsort(-w, kind="stable")[:m]
    order.sort()
    edges = tuple(zip(iu[order].tolist(), ju[order].tolist()))
    return Network(n, edges, target_density=density, edge_weights=tuple(w[order].tolist()),
                   node_labels=wn.node_labels)
