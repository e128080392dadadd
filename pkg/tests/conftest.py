import itertools
import random

import networkx as nx
import pytest

from paranet import kernels
from paranet.netbuild import Network


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    previous = kernels.use(request.param)
    yield request.param
    kernels.use(previous)


def from_nx(g: nx.Graph) -> Network:
    g = nx.convert_node_labels_to_integers(g)
    return Network.from_edges(g.number_of_nodes(), g.edges())


def random_graph(rng: random.Random, n_max: int = 50) -> Network:
    n = rng.randint(1, n_max)
    p = rng.choice([0.02, 0.05, 0.1, 0.2, 0.4, 0.8])
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Network.from_edges(n, edges)


def to_nx(net: Network) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(net.node_count))
    g.add_edges_from(net.edges)
    return g
