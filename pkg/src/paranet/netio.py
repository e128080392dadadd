"""GraphML and edge-list serialization for paragraph networks."""
from __future__ import annotations

from pathlib import Path

import networkx as nx

from .netbuild import Network


class NetworkFormatError(ValueError):
    pass


def to_networkx(net: Network, **graph_attrs) -> nx.Graph:
    g = nx.Graph(**{k: v for k, v in graph_attrs.items() if v is not None})
    labels = net.node_labels or tuple(range(net.node_count))
    for i in range(net.node_count):
        g.add_node(i, paragraph=int(labels[i]))
    if net.edge_weights is not None:
        for (u, v), w in zip(net.edges, net.edge_weights):
            g.add_edge(u, v, weight=float(w))
    else:
        g.add_edges_from(net.edges)
    return g


def write_graphml(net: Network, path: str | Path, **graph_attrs):
    """Write ``net`` as GraphML; node ids are 0-based paragraph positions."""
    if net.target_density is not None:
        graph_attrs.setdefault("density", float(net.target_density))
    nx.write_graphml(to_networkx(net, **graph_attrs), str(path))


def read_graphml(path: str | Path) -> tuple[Network, dict]:
    """Load a network written by :func:`write_graphml`; returns it with the graph attributes."""
    path = Path(path)
    try:
        g = nx.read_graphml(str(path), node_type=int)
    except Exception as exc:  # networkx raises a mix of parse and value errors
        raise NetworkFormatError(f"malformed network file {path}: {exc}") from exc
    if g.is_directed() or g.is_multigraph():
        raise NetworkFormatError(f"malformed network file {path}: expected a simple undirected graph")
    n = g.number_of_nodes()
    if sorted(g.nodes) != list(range(n)):
        raise NetworkFormatError(f"malformed network file {path}: node ids must be 0..{n - 1}")
    edges = sorted((min(u, v), max(u, v)) for u, v in g.edges)
    weights = None
    if edges and all("weight" in d for _, _, d in g.edges(data=True)):
        weights = tuple(float(g.edges[u, v]["weight"]) for u, v in edges)
    labels = tuple(int(g.nodes[i].get("paragraph", i)) for i in range(n))
    attrs = {k: v for k, v in g.graph.items() if k not in ("node_default", "edge_default")}
    try:
        net = Network.from_edges(n, edges, target_density=attrs.get("density"),
                                 edge_weights=weights, node_labels=labels)
    except ValueError as exc:
        raise NetworkFormatError(f"malformed network file {path}: {exc}") from exc
    return net, attrs


def write_edgelist(net: Network, path: str | Path):
    """One edge per line as ``u v [w]``."""
    with open(path, "w", encoding="utf-8") as fh:
        if net.edge_weights is None:
            for u, v in net.edges:
                fh.write(f"{u} {v}\n")
        else:
            for (u, v), w in zip(net.edges, net.edge_weights):
                fh.write(f"{u} {v} {w!r}\n")


def read_edgelist(path: str | Path, node_count: int | None = None) -> Network:
    edges, weights = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) not in (2, 3):
                raise NetworkFormatError(f"{path}:{lineno}: expected 'u v [w]'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
                if len(parts) == 3:
                    weights.append(float(parts[2]))
            except ValueError as exc:
                raise NetworkFormatError(f"{path}:{lineno}: {exc}") from exc
    if weights and len(weights) != len(edges):
        raise NetworkFormatError(f"{path}: weights given for only some edges")
    if node_count is None:
        node_count = 1 + max((max(e) for e in edges), default=-1)
    order = sorted(range(len(edges)), key=lambda k: (min(edges[k]), max(edges[k])))
    edges = [(min(edges[k]), max(edges[k])) for k in order]
    if len(set(edges)) != len(edges):
        raise NetworkFormatError(f"{path}: duplicate edge")
    try:
        return Network.from_edges(node_count, edges,
                                  edge_weights=tuple(weights[k] for k in order) if weights else None)
    except ValueError as exc:
        raise NetworkFormatError(f"{path}: {exc}") from exc
